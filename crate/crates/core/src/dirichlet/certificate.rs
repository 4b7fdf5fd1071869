use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::bound::{cw_upper, min_k_for, BoundRow, HProvenance};
use super::Mode;
use crate::arith::{self, gcd, Int};
use crate::error::{Error, Result};
use crate::hsearch::HProvider;
use crate::isomorph::{residue, s_good_iso, segment_of_ap_in_range, EligibleAp};

/// `2 <= n < p_{k+1}^2` and `n` coprime to `p_k#`, which forces `n` prime.
pub fn prime_by_window(n: &Int, k: usize) -> Result<bool> {
    let primes = arith::first_primes(k + 1)?.into_vec();
    let p_next = primes[k];
    let limit = Int::from(p_next) * p_next;
    if *n < Int::from(2) || *n >= limit {
        return Ok(false);
    }
    Ok(primes[..k].iter().all(|&q| residue(n, q) != 0))
}

/// One clause of the correctness argument and whether it held.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// A replayable trace of one prime-finding run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeCertificate {
    pub a: u64,
    pub d: u64,
    pub k: usize,
    /// `c = a (mod d)` and `q | c` for every `q <= p_k` not dividing `d`.
    pub c: Int,
    /// Preimage of the prime, coprime to `p_k#`.
    pub m: Int,
    /// `c + d m`.
    pub prime: Int,
    pub h_value: u64,
    pub h_source: HProvenance,
    pub mode: Mode,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

/// Outcome of [`verify_certificate`]; `failures` names every failed clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }
}

pub const CHECK_ELIGIBLE: &str = "eligible";
pub const CHECK_CONGRUENCES: &str = "c_congruences";
pub const CHECK_LINEAR: &str = "prime_equals_c_plus_d_m";
pub const CHECK_WINDOW: &str = "prime_in_window";
pub const CHECK_M_COPRIME: &str = "m_coprime_to_primorial";
pub const CHECK_PRIME_COPRIME: &str = "prime_coprime_to_primorial";
pub const CHECK_BOUND: &str = "bound_at_least_d";
pub const CHECK_PRIMALITY: &str = "independent_primality";

const CW_NOTE: &str =
    "h(k) is the published conditional upper bound, natural logarithm, rounded up";

/// Runs the construction for `ap`: smallest usable `k`, the S-good map for
/// the first `k` primes, then the first term of `ap` in `[2, p_{k+1}^2 - 1]`
/// whose preimage is coprime to `p_k#`.
pub fn find_prime(ap: EligibleAp, provider: &HProvider, mode: Mode) -> Result<PrimeCertificate> {
    let d = ap.d();
    let k = min_k_for(d, provider, mode)?;
    let row = super::bound::bound(k, provider, mode)?;
    let primes = arith::first_primes(k)?.into_vec();
    let iso = s_good_iso(ap, &primes)?;
    let top = Int::from(row.p_next) * row.p_next - 1u32;
    let terms = segment_of_ap_in_range(ap, &Int::from(2), &top);
    for x in terms.iter() {
        let m = iso.invert(&x)?;
        if primes.iter().all(|&q| residue(&m, q) != 0) {
            let mut cert = PrimeCertificate {
                a: ap.a(),
                d,
                k,
                c: iso.c,
                m,
                prime: x,
                h_value: row.h,
                h_source: row.provenance,
                mode,
                checks: Vec::new(),
                notes: Vec::new(),
            };
            if mode == Mode::CwConditional {
                cert.notes.push(CW_NOTE.to_string());
            }
            cert.checks = verify_certificate(&cert, provider).checks;
            return Ok(cert);
        }
    }
    Err(Error::Inconsistent(format!(
        "no term of {ap} below {} has a preimage coprime to p_{k}#; h({k}) = {} must be wrong",
        row.p_next * row.p_next,
        row.h
    )))
}

/// Re-checks every clause of a certificate from scratch. The `h(k)` value
/// is looked up again in `provider` (exact) or recomputed (conditional).
pub fn verify_certificate(cert: &PrimeCertificate, provider: &HProvider) -> Verification {
    let mut checks = Vec::new();
    let mut record = |name: &str, passed: bool| {
        checks.push(Check {
            name: name.to_string(),
            passed,
        })
    };

    let (a, d, k) = (cert.a, cert.d, cert.k);
    record(CHECK_ELIGIBLE, d >= 1 && a < d && gcd(a, d) == 1);

    let primes = arith::first_primes(k + 1).map(|t| t.into_vec()).ok();
    let Some(primes) = primes.filter(|_| k >= 1) else {
        for name in [
            CHECK_CONGRUENCES,
            CHECK_LINEAR,
            CHECK_WINDOW,
            CHECK_M_COPRIME,
            CHECK_PRIME_COPRIME,
            CHECK_BOUND,
            CHECK_PRIMALITY,
        ] {
            record(name, false);
        }
        return Verification { checks };
    };
    let (small, p_next) = (&primes[..k], primes[k]);

    let congruent = d >= 1
        && residue(&cert.c, d) == a % d.max(1)
        && small
            .iter()
            .filter(|&&q| d % q != 0)
            .all(|&q| residue(&cert.c, q) == 0);
    record(CHECK_CONGRUENCES, congruent);

    record(CHECK_LINEAR, cert.prime == &cert.c + Int::from(d) * &cert.m);

    let limit = Int::from(p_next) * p_next;
    record(
        CHECK_WINDOW,
        cert.prime >= Int::from(2) && cert.prime < limit,
    );

    record(
        CHECK_M_COPRIME,
        small.iter().all(|&q| residue(&cert.m, q) != 0),
    );
    record(
        CHECK_PRIME_COPRIME,
        small.iter().all(|&q| residue(&cert.prime, q) != 0),
    );

    let h_ok = match (cert.mode, cert.h_source) {
        (Mode::CwConditional, HProvenance::ConditionalCw) => {
            cw_upper(k).is_ok_and(|h| h == cert.h_value)
        }
        (Mode::Unconditional, HProvenance::Exact(_)) => {
            provider.get(k).is_ok_and(|(h, _)| h == cert.h_value)
        }
        _ => false,
    };
    let bound_ok =
        h_ok && BoundRow::new(k, cert.h_value, cert.h_source).is_ok_and(|row| row.proves(d));
    record(CHECK_BOUND, bound_ok);

    record(
        CHECK_PRIMALITY,
        arith::is_prime(&cert.prime).unwrap_or(false),
    );
    Verification { checks }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    a: String,
    d: String,
    k: String,
    c: String,
    m: String,
    prime: String,
    h_value: String,
    h_source: String,
    mode: String,
    checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

impl PrimeCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("certificate serialises")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_wire()).expect("certificate serialises")
    }

    fn to_wire(&self) -> Wire {
        Wire {
            a: self.a.to_string(),
            d: self.d.to_string(),
            k: self.k.to_string(),
            c: self.c.to_string(),
            m: self.m.to_string(),
            prime: self.prime.to_string(),
            h_value: self.h_value.to_string(),
            h_source: self.h_source.as_str().to_string(),
            mode: self.mode.as_str().to_string(),
            checks: self.checks.clone(),
            notes: self.notes.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: Wire = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        Self::from_wire(wire)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let wire: Wire = serde_json::from_value(value).map_err(|e| Error::Parse {
            line: 0,
            message: e.to_string(),
        })?;
        Self::from_wire(wire)
    }

    fn from_wire(w: Wire) -> Result<Self> {
        fn field<T: std::str::FromStr>(name: &str, s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Parse {
                line: 0,
                message: format!("field {name}: {s:?} is not a decimal integer"),
            })
        }
        let h_source = HProvenance::parse(&w.h_source).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("unknown h_source {:?}", w.h_source),
        })?;
        let mode = Mode::parse(&w.mode).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("unknown mode {:?}", w.mode),
        })?;
        Ok(PrimeCertificate {
            a: field("a", &w.a)?,
            d: field("d", &w.d)?,
            k: field("k", &w.k)?,
            c: field("c", &w.c)?,
            m: field("m", &w.m)?,
            prime: field("prime", &w.prime)?,
            h_value: field("h_value", &w.h_value)?,
            h_source,
            mode,
            checks: w.checks,
            notes: w.notes,
        })
    }

    /// The prime as a machine integer, when it fits.
    pub fn prime_u64(&self) -> Option<u64> {
        self.prime.to_u64()
    }

    pub fn ap(&self) -> Result<EligibleAp> {
        crate::isomorph::make_eligible(&Int::from(self.a), self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hsearch::{KnownHTable, Policy};
    use crate::isomorph::make_eligible;

    fn provider() -> HProvider {
        HProvider::new(KnownHTable::shipped(), Policy::quick())
    }

    fn ap(a: i64, d: u64) -> EligibleAp {
        make_eligible(&Int::from(a), d).unwrap()
    }

    #[test]
    fn window_primality_examples() {
        assert!(prime_by_window(&Int::from(7), 2).unwrap());
        assert!(!prime_by_window(&Int::from(1), 3).unwrap());
        assert!(!prime_by_window(&Int::from(169), 5).unwrap());
        assert!(prime_by_window(&Int::from(167), 5).unwrap());
        assert!(!prime_by_window(&Int::from(-7), 2).unwrap());
    }

    #[test]
    fn window_primality_is_sound() {
        for k in 1..=10 {
            let p = arith::nth_prime(k + 1).unwrap();
            for n in 0..p * p {
                if prime_by_window(&Int::from(n), k).unwrap() {
                    assert!(arith::is_prime_u64(n), "n = {n}, k = {k}");
                }
            }
        }
    }

    fn expect(cert: &PrimeCertificate, k: usize, c: i64, m: i64, prime: i64) {
        assert_eq!(
            (cert.k, cert.c.clone(), cert.m.clone(), cert.prime.clone()),
            (k, Int::from(c), Int::from(m), Int::from(prime))
        );
    }

    #[test]
    fn traced_examples() {
        let p = provider();
        // X_1 = {4, 7, ...}: 4 has preimage 0, 7 has preimage 1
        expect(
            &find_prime(ap(1, 3), &p, Mode::Unconditional).unwrap(),
            2,
            4,
            1,
            7,
        );
        expect(
            &find_prime(ap(2, 3), &p, Mode::Unconditional).unwrap(),
            2,
            2,
            1,
            5,
        );
        expect(
            &find_prime(ap(0, 1), &p, Mode::Unconditional).unwrap(),
            1,
            0,
            3,
            3,
        );
        expect(
            &find_prime(ap(1, 2), &p, Mode::Unconditional).unwrap(),
            1,
            1,
            1,
            3,
        );
        expect(
            &find_prime(ap(1, 12), &p, Mode::Unconditional).unwrap(),
            6,
            5005,
            -409,
            97,
        );
    }

    /// Independent re-execution: brute force over the window, no S-good map.
    fn replay(a: u64, d: u64, k: usize, c: &Int) -> Option<Int> {
        let primes = arith::first_primes(k + 1).unwrap().into_vec();
        let top = primes[k] * primes[k];
        (2..top).filter(|x| x % d == a).map(Int::from).find(|x| {
            let diff: Int = x - c;
            let m = diff / Int::from(d);
            primes[..k].iter().all(|&q| residue(&m, q) != 0)
        })
    }

    #[test]
    fn replay_agrees() {
        let p = provider();
        for (a, d) in [(1, 3), (2, 3), (0, 1), (1, 2), (2, 7), (1, 12), (5, 24)] {
            let cert = find_prime(ap(a, d), &p, Mode::Unconditional).unwrap();
            assert_eq!(
                Some(cert.prime.clone()),
                replay(a as u64, d, cert.k, &cert.c)
            );
        }
    }

    #[test]
    fn verification_catches_corruption() {
        let p = provider();
        let cert = find_prime(ap(1, 3), &p, Mode::Unconditional).unwrap();
        assert!(cert.checks.iter().all(|c| c.passed));
        assert!(verify_certificate(&cert, &p).ok());

        let mut bad = cert.clone();
        bad.prime = Int::from(8);
        let v = verify_certificate(&bad, &p);
        assert!(!v.ok());
        let f = v.failures();
        assert!(f.contains(&CHECK_PRIME_COPRIME) && f.contains(&CHECK_PRIMALITY));
        assert!(f.contains(&CHECK_LINEAR));

        let mut bad = cert.clone();
        bad.k = 1;
        bad.h_value = 2;
        assert!(verify_certificate(&bad, &p)
            .failures()
            .contains(&CHECK_BOUND));

        let mut bad = cert.clone();
        bad.h_value = 5;
        assert!(verify_certificate(&bad, &p)
            .failures()
            .contains(&CHECK_BOUND));

        let mut bad = cert.clone();
        bad.c += 1;
        assert!(verify_certificate(&bad, &p)
            .failures()
            .contains(&CHECK_CONGRUENCES));

        let mut bad = cert.clone();
        bad.k = 0;
        assert!(!verify_certificate(&bad, &p).ok());

        let mut bad = cert;
        bad.mode = Mode::CwConditional;
        assert!(!verify_certificate(&bad, &p).ok());
    }

    #[test]
    fn json_round_trip() {
        let p = provider();
        let cert = find_prime(ap(1, 12), &p, Mode::Unconditional).unwrap();
        let text = cert.to_json();
        let back = PrimeCertificate::from_json(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json(), text);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["c"], "5005");
        assert_eq!(v["m"], "-409");
        assert_eq!(v["h_source"], "computed");
        assert!(PrimeCertificate::from_json("{\"a\": 1}").is_err());
        let broken = text.replace("\"5005\"", "\"50x5\"");
        assert!(PrimeCertificate::from_json(&broken).is_err());
    }

    #[test]
    fn conditional_mode() {
        let p = provider();
        let cert = find_prime(ap(2, 7), &p, Mode::CwConditional).unwrap();
        assert_eq!(cert.k, 50);
        assert_eq!(cert.h_source, HProvenance::ConditionalCw);
        assert!(!cert.notes.is_empty());
        assert!(verify_certificate(&cert, &p).ok());
        assert!(cert.prime < Int::from(233u64 * 233));
        let round = PrimeCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(round, cert);
        assert!(matches!(
            find_prime(ap(1, 43), &p, Mode::CwConditional),
            Err(Error::NotProvable { d: 43, max_d: 42 })
        ));
    }

    #[test]
    fn deterministic() {
        let p = provider();
        let a = find_prime(ap(5, 36), &p, Mode::Unconditional).unwrap();
        let b = find_prime(ap(5, 36), &p, Mode::Unconditional).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
