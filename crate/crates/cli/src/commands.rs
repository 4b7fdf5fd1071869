use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use jacobsthal_core::dirichlet::{self, verify_certificate, BoundRow};
use jacobsthal_core::hsearch::{self, CoverWitness};
use jacobsthal_core::isomorph::{make_eligible, s_good_iso, shares_factor};
use jacobsthal_core::jacobsthal::{g_of_with, ScanBudget};
use jacobsthal_core::{
    arith, EligibleAp, Error, HProvider, Int, KnownHTable, Mode, Policy, PrimeCertificate,
};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::{Cli, CliConfig, Command, Format, TABLE_ENV};

/// How a command that ran to completion turned out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// The command ran but its answer is negative (a failed verification).
    DomainFailure,
}

pub(crate) fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let cfg = &cli.config;
    let mode: Mode = cfg.mode.into();
    match &cli.command {
        Command::G { n } => cmd_g(cfg, *n, out),
        Command::H {
            k,
            compute,
            table_only,
        } => cmd_h(cfg, *k, *compute, *table_only, out),
        Command::HSearch { length, primes } => cmd_h_search(cfg, *length, *primes, out),
        Command::WitnessLower { n } => cmd_witness_lower(cfg, *n, out),
        Command::Iso { a, d, k, width } => cmd_iso(cfg, a, *d, *k, *width, out),
        Command::FindPrime { a, d, out: file } => {
            let ap = eligible(a, *d)?;
            let provider = provider(cfg)?;
            let cert = dirichlet::find_prime(ap, &provider, mode)?;
            if let Some(path) = file {
                write_file(path, &cert.to_json())?;
            }
            match cfg.format {
                Format::Json => writeln!(out, "{}", cert.to_json())?,
                Format::Human => describe_certificate(&cert, out)?,
            }
            Ok(Outcome::Success)
        }
        Command::Verify { file } => cmd_verify(cfg, file, out),
        Command::Primes {
            a,
            d,
            count,
            out: file,
        } => cmd_primes(cfg, a, *d, *count, file.as_deref(), out, err),
        Command::BoundTable { ks } => cmd_bound_table(cfg, ks, out),
        Command::MaxD => {
            let provider = provider(cfg)?;
            let (d, k) = dirichlet::max_provable_d(&provider, mode)?;
            let row = (k > 0)
                .then(|| dirichlet::bound(k, &provider, mode))
                .transpose()?;
            match cfg.format {
                Format::Json => print_json(
                    out,
                    &json!({
                        "mode": mode.as_str(),
                        "max_d": d,
                        "k": k,
                        "bound": row.as_ref().map(BoundRow::render),
                    }),
                )?,
                Format::Human => match row {
                    Some(row) => writeln!(
                        out,
                        "max d = {d}  (k = {k}, bound {}, mode {})",
                        row.render(),
                        mode.as_str()
                    )?,
                    None => writeln!(
                        out,
                        "max d = 0  (no usable h values, mode {})",
                        mode.as_str()
                    )?,
                },
            }
            Ok(Outcome::Success)
        }
    }
}

fn load_table(cfg: &CliConfig) -> Result<KnownHTable> {
    let path = cfg.table.clone().or_else(|| {
        std::env::var_os(TABLE_ENV)
            .filter(|v| !v.is_empty())
            .map(Into::into)
    });
    match path {
        Some(p) => {
            KnownHTable::load(&p).with_context(|| format!("loading h table {}", p.display()))
        }
        None => Ok(KnownHTable::shipped()),
    }
}

fn provider(cfg: &CliConfig) -> Result<HProvider> {
    let policy = if cfg.compute_up_to == 0 {
        Policy::TableOnly
    } else {
        Policy::Compute {
            max_k: cfg.compute_up_to,
            search: cfg.search(),
        }
    };
    Ok(HProvider::new(load_table(cfg)?, policy))
}

fn parse_int(s: &str) -> Result<Int> {
    s.parse::<BigInt>()
        .map_err(|_| Error::InvalidArgument(format!("{s:?} is not an integer")).into())
}

fn eligible(a: &str, d: u64) -> Result<EligibleAp> {
    Ok(make_eligible(&parse_int(a)?, d)?)
}

fn print_json(out: &mut dyn Write, value: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))
}

fn witness_json(w: &CoverWitness) -> Value {
    json!({
        "start": w.start.to_string(),
        "length": w.length,
        "primes": w.assignment.primes,
        "offsets": w.assignment.offsets,
        "verified": w.verify(),
    })
}

fn describe_witness(w: &CoverWitness, modulus: &str, out: &mut dyn Write) -> Result<()> {
    let last = &w.start + w.length as u64 - 1u32;
    writeln!(
        out,
        "witness: {}..{} ({} integers, each sharing a factor with {modulus}; {})",
        w.start,
        last,
        w.length,
        if w.verify() {
            "verified"
        } else {
            "VERIFICATION FAILED"
        }
    )?;
    Ok(())
}

fn cmd_g(cfg: &CliConfig, n: u64, out: &mut dyn Write) -> Result<Outcome> {
    let budget = ScanBudget {
        search: cfg.search(),
        ..ScanBudget::default()
    };
    let r = g_of_with(n, &budget)?;
    match cfg.format {
        Format::Json => print_json(out, &serde_json::to_value(r)?)?,
        Format::Human => {
            writeln!(out, "g({n}) = {}", r.g)?;
            if r.witness_length > 0 {
                writeln!(
                    out,
                    "witness: {}..{} ({} integers, none coprime to {n})",
                    r.witness_start,
                    r.witness_start + r.witness_length - 1,
                    r.witness_length
                )?;
            }
        }
    }
    Ok(Outcome::Success)
}

fn cmd_h(
    cfg: &CliConfig,
    k: usize,
    force: bool,
    table_only: bool,
    out: &mut dyn Write,
) -> Result<Outcome> {
    if k == 0 {
        return Err(Error::InvalidArgument("h(k) needs k >= 1".into()).into());
    }
    let table = load_table(cfg)?;
    let primes = arith::first_primes(k)?.into_vec();
    let entry = table.get(k).cloned();

    let mut witness = entry.as_ref().and_then(|e| {
        e.witness_start.as_ref().map(|start| {
            let length = e.h as usize - 1;
            let assignment = hsearch::CoverAssignment {
                offsets: primes
                    .iter()
                    .map(|&p| {
                        let p = BigInt::from(p);
                        let r = ((-start) % &p + &p) % &p;
                        u64::try_from(r).expect("residue below p")
                    })
                    .collect(),
                primes: primes.clone(),
                length,
            };
            CoverWitness {
                start: start.clone(),
                length,
                assignment,
            }
        })
    });
    let want_search =
        !table_only && (force || entry.is_none() || (witness.is_none() && k <= cfg.compute_up_to));
    let mut computed = None;
    if want_search {
        let (len, assignment) = hsearch::max_cover_length(&primes, &cfg.search())?;
        computed = Some(len as u64 + 1);
        witness = Some(hsearch::witness_integer(&assignment));
    }
    let (h, source) = match (&entry, computed) {
        (Some(e), Some(c)) if e.h != c => {
            return Err(Error::Inconsistent(format!(
                "table has h({k}) = {} ({}), search gives {c}",
                e.h, e.source
            ))
            .into())
        }
        (Some(e), _) => (e.h, e.source.as_str()),
        (None, Some(c)) => (c, "computed"),
        (None, None) => return Err(Error::Unavailable(k).into()),
    };
    let modulus = arith::primorial(k)?;
    match cfg.format {
        Format::Json => print_json(
            out,
            &json!({
                "k": k,
                "h": h,
                "source": source,
                "searched": computed.is_some(),
                "witness": witness.as_ref().map(witness_json),
            }),
        )?,
        Format::Human => {
            let agree = if computed.is_some() && entry.is_some() {
                "; search agrees"
            } else {
                ""
            };
            writeln!(out, "h({k}) = {h}  [{source}{agree}]")?;
            if let Some(w) = &witness {
                describe_witness(w, &format!("p_{k}# = {modulus}"), out)?;
            }
        }
    }
    Ok(Outcome::Success)
}

fn cmd_h_search(cfg: &CliConfig, length: usize, k: usize, out: &mut dyn Write) -> Result<Outcome> {
    let primes = arith::first_primes(k)?.into_vec();
    let found = hsearch::coverable(length, &primes, &cfg.search())?;
    let witness = found.as_ref().map(hsearch::witness_integer);
    match cfg.format {
        Format::Json => print_json(
            out,
            &json!({
                "length": length,
                "k": k,
                "coverable": witness.is_some(),
                "witness": witness.as_ref().map(witness_json),
            }),
        )?,
        Format::Human => match &witness {
            Some(w) => {
                writeln!(
                    out,
                    "{length} consecutive integers can share factors with p_{k}#"
                )?;
                describe_witness(w, &format!("p_{k}#"), out)?;
            }
            None => writeln!(
                out,
                "no {length} consecutive integers all share a factor with p_{k}#"
            )?,
        },
    }
    Ok(Outcome::Success)
}

fn cmd_witness_lower(cfg: &CliConfig, n: usize, out: &mut dyn Write) -> Result<Outcome> {
    let w = hsearch::elementary_lower_witness(n)?;
    match cfg.format {
        Format::Json => print_json(out, &witness_json(&w))?,
        Format::Human => {
            writeln!(out, "h({n}) >= {}", w.length + 1)?;
            describe_witness(&w, &format!("p_{n}#"), out)?;
        }
    }
    Ok(Outcome::Success)
}

fn cmd_iso(
    cfg: &CliConfig,
    a: &str,
    d: u64,
    k: usize,
    width: i64,
    out: &mut dyn Write,
) -> Result<Outcome> {
    if width < 0 {
        return Err(Error::InvalidArgument(format!("width must be >= 0, got {width}")).into());
    }
    let ap = eligible(a, d)?;
    let primes = arith::first_primes(k)?.into_vec();
    let iso = s_good_iso(ap, &primes)?;
    let rows = iso.window(width);
    match cfg.format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(n, x)| {
                    json!({
                        "n": n.to_string(),
                        "image": x.to_string(),
                        "n_coprime": !shares_factor(n, &primes),
                        "image_coprime": !shares_factor(x, &primes),
                    })
                })
                .collect();
            print_json(
                out,
                &json!({
                    "a": ap.a(),
                    "d": d,
                    "k": k,
                    "primes": primes,
                    "c": iso.c.to_string(),
                    "rows": rows,
                }),
            )?
        }
        Format::Human => {
            let set: Vec<String> = primes.iter().map(u64::to_string).collect();
            writeln!(out, "progression: {ap}")?;
            writeln!(out, "S = {{{}}}", set.join(", "))?;
            writeln!(out, "c = {}", iso.c)?;
            writeln!(
                out,
                "map: n -> {} + {d} n   (* marks values coprime to every prime in S)",
                iso.c
            )?;
            let nw = rows
                .iter()
                .map(|(n, _)| n.to_string().len())
                .max()
                .unwrap_or(1);
            let xw = rows
                .iter()
                .map(|(_, x)| x.to_string().len())
                .max()
                .unwrap_or(1);
            for (n, x) in &rows {
                let mark = |v: &Int| if shares_factor(v, &primes) { ' ' } else { '*' };
                writeln!(
                    out,
                    "{:>nw$}{}  {:>xw$}{}",
                    n.to_string(),
                    mark(n),
                    x.to_string(),
                    mark(x)
                )?;
            }
        }
    }
    Ok(Outcome::Success)
}

fn describe_certificate(cert: &PrimeCertificate, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "prime {} in {} + {}Z", cert.prime, cert.a, cert.d)?;
    writeln!(
        out,
        "  k = {}, h({}) = {} [{}], mode {}",
        cert.k,
        cert.k,
        cert.h_value,
        cert.h_source,
        cert.mode.as_str()
    )?;
    writeln!(
        out,
        "  c = {}, m = {}, prime = c + {} m",
        cert.c, cert.m, cert.d
    )?;
    let failed: Vec<&str> = cert
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        writeln!(out, "  all {} checks passed", cert.checks.len())?;
    } else {
        writeln!(out, "  FAILED: {}", failed.join(", "))?;
    }
    for note in &cert.notes {
        writeln!(out, "  note: {note}")?;
    }
    Ok(())
}

/// Certificates held by a file: a single certificate, an array of them, or
/// an object with a `certificates` array.
fn certificates_in(text: &str) -> Result<Vec<PrimeCertificate>> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let items = match value {
        Value::Array(items) => items,
        Value::Object(mut map) if map.contains_key("certificates") => {
            match map.remove("certificates") {
                Some(Value::Array(items)) => items,
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        message: "certificates is not an array".into(),
                    }
                    .into())
                }
            }
        }
        single => vec![single],
    };
    items
        .into_iter()
        .map(|v| PrimeCertificate::from_json_value(v).map_err(Into::into))
        .collect()
}

fn cmd_verify(cfg: &CliConfig, file: &Path, out: &mut dyn Write) -> Result<Outcome> {
    let text = std::fs::read_to_string(file)
        .map_err(Error::from)
        .with_context(|| format!("reading {}", file.display()))?;
    let certs = certificates_in(&text)?;
    let provider = provider(cfg)?;
    let results: Vec<_> = certs
        .iter()
        .map(|c| (c, verify_certificate(c, &provider)))
        .collect();
    let all_ok = results.iter().all(|(_, v)| v.ok());
    match cfg.format {
        Format::Json => {
            let items: Vec<Value> = results
                .iter()
                .map(|(c, v)| {
                    json!({
                        "a": c.a,
                        "d": c.d,
                        "prime": c.prime.to_string(),
                        "ok": v.ok(),
                        "failures": v.failures(),
                    })
                })
                .collect();
            print_json(out, &json!({ "ok": all_ok, "certificates": items }))?
        }
        Format::Human => {
            for (c, v) in &results {
                if v.ok() {
                    writeln!(out, "OK    {} in {} + {}Z (k = {})", c.prime, c.a, c.d, c.k)?;
                } else {
                    writeln!(
                        out,
                        "FAIL  {} in {} + {}Z: {}",
                        c.prime,
                        c.a,
                        c.d,
                        v.failures().join(", ")
                    )?;
                }
            }
        }
    }
    Ok(if all_ok {
        Outcome::Success
    } else {
        Outcome::DomainFailure
    })
}

fn cmd_primes(
    cfg: &CliConfig,
    a: &str,
    d: u64,
    count: usize,
    file: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Outcome> {
    let ap = eligible(a, d)?;
    let provider = provider(cfg)?;
    let stream = dirichlet::prime_stream(ap, count, &provider, cfg.mode.into());
    let doc = json!({
        "a": ap.a(),
        "d": ap.d(),
        "count": count,
        "primes": stream.primes().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "progressions": stream
            .steps
            .iter()
            .map(|s| json!({ "a": s.sub_ap.a(), "d": s.sub_ap.d() }))
            .collect::<Vec<_>>(),
        "certificates": stream
            .steps
            .iter()
            .map(|s| s.certificate.to_json_value())
            .collect::<Vec<_>>(),
        "stopped": stream.stopped.as_ref().map(ToString::to_string),
    });
    if let Some(path) = file {
        write_file(path, &serde_json::to_string_pretty(&doc)?)?;
    }
    match cfg.format {
        Format::Json => print_json(out, &doc)?,
        Format::Human => {
            for s in &stream.steps {
                writeln!(
                    out,
                    "{}  from {}  (k = {})",
                    s.certificate.prime, s.sub_ap, s.certificate.k
                )?;
            }
        }
    }
    match stream.stopped {
        None => Ok(Outcome::Success),
        Some(e) => {
            writeln!(
                err,
                "stopped after {} of {count} primes",
                stream.steps.len()
            )?;
            Err(e.into())
        }
    }
}

fn cmd_bound_table(cfg: &CliConfig, ks: &[usize], out: &mut dyn Write) -> Result<Outcome> {
    let provider = provider(cfg)?;
    let mode: Mode = cfg.mode.into();
    let rows = dirichlet::bound_table(ks, &provider, mode);
    if let Some(e) = rows
        .iter()
        .find_map(|(_, r)| r.as_ref().err().filter(|e| e.is_budget()))
    {
        return Err(e.clone().into());
    }
    match cfg.format {
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(k, r)| match r {
                    Ok(row) => json!({
                        "k": k,
                        "p_next": row.p_next,
                        "h": row.h,
                        "source": row.provenance.as_str(),
                        "numerator": row.numerator,
                        "denominator": row.denominator,
                        "bound": row.render(),
                    }),
                    Err(e) => json!({ "k": k, "error": e.to_string() }),
                })
                .collect();
            print_json(out, &json!({ "mode": mode.as_str(), "rows": items }))?
        }
        Format::Human => {
            writeln!(
                out,
                "{:>5}  {:>7}  {:>10}  {:<9}  {:>10}",
                "k", "p_{k+1}", "h(k)", "source", "bound"
            )?;
            for (k, r) in &rows {
                match r {
                    Ok(row) => writeln!(
                        out,
                        "{k:>5}  {:>7}  {:>10}  {:<9}  {:>10}",
                        row.p_next,
                        row.h,
                        row.provenance.as_str(),
                        row.render()
                    )?,
                    Err(e) => writeln!(out, "{k:>5}  {e}")?,
                }
            }
        }
    }
    Ok(Outcome::Success)
}
