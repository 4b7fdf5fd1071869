use std::process::{Command, Output};

use serde_json::Value;

fn jacobsthal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobsthal"))
        .args(args)
        .env_remove(jacobsthal_cli::TABLE_ENV)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend_from_slice(&["--format", "json"]);
    let o = jacobsthal(&full);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(jacobsthal(&["g", "10"]).status.code(), Some(0));
    assert_eq!(jacobsthal(&["--help"]).status.code(), Some(0));
    assert_eq!(jacobsthal(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(jacobsthal(&["g", "ten"]).status.code(), Some(2));
    assert_eq!(jacobsthal(&["find-prime", "x", "7"]).status.code(), Some(2));
    assert_eq!(jacobsthal(&["find-prime", "1", "0"]).status.code(), Some(2));
    assert_eq!(jacobsthal(&["find-prime", "4", "6"]).status.code(), Some(1));
    assert_eq!(
        jacobsthal(&["find-prime", "1", "77"]).status.code(),
        Some(1)
    );
    assert_eq!(
        jacobsthal(&["find-prime", "1", "43", "--mode", "cw"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        jacobsthal(&["h", "31", "--table-only"]).status.code(),
        Some(1)
    );
    assert_eq!(
        jacobsthal(&["h", "12", "--compute", "--node-limit", "5"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        jacobsthal(&["primes", "1", "2", "--count", "10"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn errors_go_to_stderr() {
    let o = jacobsthal(&["find-prime", "4", "6"]);
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not eligible"));
}

#[test]
fn json_is_byte_stable() {
    for args in [
        &["find-prime", "9", "7", "--format", "json"][..],
        &["primes", "0", "1", "--count", "3", "--format", "json"],
        &["bound-table", "--format", "json"],
        &["h", "6", "--format", "json"],
    ] {
        let a = jacobsthal(args);
        let b = jacobsthal(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let serial = jacobsthal(&["h", "9", "--compute", "--workers", "1", "--format", "json"]);
    let parallel = jacobsthal(&["h", "9", "--compute", "--workers", "3", "--format", "json"]);
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn find_prime_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let o = jacobsthal(&["find-prime", "-5", "7", "--out", cert.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("prime 23 in 2 + 7Z"));
    let v = jacobsthal(&["verify", cert.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    assert!(stdout(&v).starts_with("OK"));

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    doc["prime"] = Value::String("25".into());
    std::fs::write(&cert, doc.to_string()).unwrap();
    let v = jacobsthal(&["verify", cert.to_str().unwrap(), "--format", "json"]);
    assert_eq!(v.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&v.stdout).unwrap();
    assert_eq!(report["ok"], false);
    let failures = report["certificates"][0]["failures"].as_array().unwrap();
    assert!(failures.iter().any(|f| f == "prime_equals_c_plus_d_m"));

    std::fs::write(&cert, "{ not json").unwrap();
    assert_eq!(
        jacobsthal(&["verify", cert.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn conditional_certificates_are_flagged() {
    let c = json(&["find-prime", "2", "7", "--mode", "cw"]);
    assert_eq!(c["mode"], "cw");
    assert_eq!(c["h_source"], "cw");
    assert_eq!(c["k"], "50");
    assert!(!c["notes"].as_array().unwrap().is_empty());
}

#[test]
fn worked_outputs() {
    let g = json(&["g", "2310"]);
    assert_eq!(
        (g["g"].as_u64(), g["witness_start"].as_u64()),
        (Some(14), Some(114))
    );
    let h = json(&["h", "5"]);
    assert_eq!(h["source"], "paper");
    assert_eq!(h["witness"]["start"], "114");
    let w = json(&["witness-lower", "5"]);
    assert_eq!(
        (w["start"].as_str(), w["length"].as_u64()),
        (Some("114"), Some(13))
    );
    let s = json(&["h-search", "13", "--primes", "5"]);
    assert_eq!(s["coverable"], true);
    assert_eq!(s["witness"]["verified"], true);
    assert_eq!(
        json(&["h-search", "14", "--primes", "5"])["coverable"],
        false
    );
    let iso = json(&["iso", "1", "7", "--k", "3", "--width", "2"]);
    assert_eq!(iso["c"], "120");
    assert_eq!(iso["rows"].as_array().unwrap().len(), 5);
    let m = json(&["max-d"]);
    assert_eq!((m["max_d"].as_u64(), m["k"].as_u64()), (Some(76), Some(54)));
    assert_eq!(m["bound"], "76.888");
    let cw = json(&["max-d", "--mode", "cw"]);
    assert_eq!(
        (cw["max_d"].as_u64(), cw["k"].as_u64()),
        (Some(42), Some(8119))
    );
}

#[test]
fn bound_table_reports_missing_rows() {
    let t = json(&["bound-table", "--ks", "5,60", "--compute-up-to", "0"]);
    let rows = t["rows"].as_array().unwrap();
    assert_eq!(rows[0]["bound"], "11.133");
    assert!(rows[1]["error"].as_str().unwrap().contains("60"));
}

#[test]
fn alternative_table_from_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    std::fs::write(&path, "# trimmed\n5,14,paper\n").unwrap();
    let p = path.to_str().unwrap();
    let m = json(&["max-d", "--table", p, "--compute-up-to", "0"]);
    assert_eq!((m["max_d"].as_u64(), m["k"].as_u64()), (Some(11), Some(5)));

    let o = Command::new(env!("CARGO_BIN_EXE_jacobsthal"))
        .args(["max-d", "--compute-up-to", "0", "--format", "json"])
        .env(jacobsthal_cli::TABLE_ENV, p)
        .output()
        .unwrap();
    let m: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(m["max_d"].as_u64(), Some(11));

    std::fs::write(&path, "5,3,paper\n").unwrap();
    let bad = jacobsthal(&["max-d", "--table", p]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 1"));
}

#[test]
fn in_process_runner_matches_binary() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = jacobsthal_cli::run(
        ["jacobsthal", "primes", "1", "3", "--count", "2"],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    assert_eq!(
        out,
        jacobsthal(&["primes", "1", "3", "--count", "2"]).stdout
    );
}
