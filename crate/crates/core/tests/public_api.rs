use jacobsthal_core::dirichlet::{find_prime, prime_stream, verify_certificate};
use jacobsthal_core::hsearch::{h_of, max_cover_length, witness_integer};
use jacobsthal_core::isomorph::make_eligible;
use jacobsthal_core::{
    arith, HProvider, HSource, Int, KnownHTable, Mode, Policy, PrimeCertificate, SearchConfig,
};

#[test]
fn computed_entries_survive_a_save_and_reload() {
    let mut table = KnownHTable::shipped().restrict(10);
    let policy = Policy::Compute {
        max_k: 9,
        search: SearchConfig::serial(),
    };
    for k in 1..=9 {
        h_of(k, &mut table, &policy).unwrap();
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    table.save(&path).unwrap();
    let back = KnownHTable::load(&path).unwrap();
    assert_eq!(back, table);
    let e = back.get(9).unwrap();
    assert_eq!((e.h, e.source), (40, HSource::Computed));
    assert!(e.witness_start.is_some());
    assert_eq!(back.get(10).unwrap().source, HSource::Published);
}

#[test]
fn search_witness_start_is_a_real_run() {
    let primes = arith::first_primes(6).unwrap().into_vec();
    let (len, a) = max_cover_length(&primes, &SearchConfig::serial()).unwrap();
    assert_eq!(len, 21);
    let w = witness_integer(&a);
    let n: u64 = primes.iter().product();
    let start = u64::try_from(&w.start).unwrap();
    for x in start..start + len as u64 {
        assert_ne!(num_gcd(x, n), 1, "{x}");
    }
}

fn num_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[test]
fn certificates_round_trip_through_json() {
    let provider = HProvider::new(KnownHTable::shipped(), Policy::quick());
    for d in 1..=24u64 {
        for a in (0..d).filter(|&a| num_gcd(a, d) == 1) {
            let ap = make_eligible(&Int::from(a), d).unwrap();
            let cert = find_prime(ap, &provider, Mode::Unconditional).unwrap();
            let back = PrimeCertificate::from_json(&cert.to_json()).unwrap();
            assert_eq!(back, cert);
            assert!(verify_certificate(&back, &provider).ok());
        }
    }
}

#[test]
fn verification_needs_the_same_h_values() {
    let computing = HProvider::new(KnownHTable::shipped(), Policy::quick());
    let ap = make_eligible(&Int::from(5), 12).unwrap();
    let cert = find_prime(ap, &computing, Mode::Unconditional).unwrap();
    assert_eq!(cert.h_source.as_str(), "computed");
    let without = HProvider::new(KnownHTable::shipped(), Policy::TableOnly);
    assert!(!verify_certificate(&cert, &without).ok());
}

#[test]
fn every_streamed_prime_lies_in_the_origin() {
    let provider = HProvider::new(KnownHTable::shipped(), Policy::quick());
    let ap = make_eligible(&Int::from(3), 5).unwrap();
    let out = prime_stream(ap, 3, &provider, Mode::Unconditional);
    assert!(out.is_complete());
    // the fourth step would need modulus 80, beyond what the table proves
    let longer = prime_stream(ap, 4, &provider, Mode::Unconditional);
    assert_eq!(longer.steps.len(), 3);
    assert!(!longer.is_complete());
    let primes = out.primes();
    for (i, p) in primes.iter().enumerate() {
        assert!(ap.contains(p));
        assert!(arith::is_prime(p).unwrap());
        assert!(!primes[..i].contains(p));
    }
}
