//! Distinct primes in one progression by repeated refinement.
//!
//! After a prime `p` is found in `a + dZ`, the search moves to a finer
//! eligible progression inside `a + dZ` that misses `p`:
//!
//! - `d` even: `a + 2dZ` or `(a + d) + 2dZ`, both eligible;
//! - `d` odd: of `a, a + d, a + 2d, a + 3d` modulo `4d` exactly two are odd,
//!   hence eligible, and at most one of them contains `p`.
//!
//! Halving only when `d` is even keeps every step eligible; an odd `d` would
//! leave one half consisting of even numbers.

use super::{find_prime, Mode, PrimeCertificate};
use crate::arith::Int;
use crate::error::{Error, Result};
use crate::hsearch::HProvider;
use crate::isomorph::{make_eligible, EligibleAp};

pub const SPLIT_NOTE_EVEN: &str = "sub-progression chosen modulo 2d (d even)";
pub const SPLIT_NOTE_ODD: &str = "sub-progression chosen modulo 4d among the odd classes (d odd)";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamStep {
    /// Progression the certificate was produced for; contained in the
    /// original one and disjoint from every earlier prime.
    pub sub_ap: EligibleAp,
    pub certificate: PrimeCertificate,
}

/// The certificates emitted so far, and the reason the stream stopped early
/// if it did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamOutcome {
    pub origin: EligibleAp,
    pub steps: Vec<StreamStep>,
    pub stopped: Option<Error>,
}

impl StreamOutcome {
    pub fn primes(&self) -> Vec<Int> {
        self.steps
            .iter()
            .map(|s| s.certificate.prime.clone())
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.stopped.is_none()
    }
}

/// The eligible class inside `ap` used after `prime` was found in it.
pub fn refine(ap: EligibleAp, prime: &Int) -> Result<EligibleAp> {
    let (a, d) = (ap.a(), ap.d());
    let (factor, parts): (u64, u64) = if d % 2 == 0 { (2, 2) } else { (4, 4) };
    let modulus = d
        .checked_mul(factor)
        .ok_or_else(|| Error::OutOfRange(format!("modulus {d} * {factor}")))?;
    for i in 0..parts {
        let Ok(sub) = make_eligible(&Int::from(a + i * d), modulus) else {
            continue;
        };
        if !sub.contains(prime) {
            return Ok(sub);
        }
    }
    unreachable!("two eligible classes cannot both contain {prime}")
}

/// `count` certificates for distinct primes of `ap`. Stops early, keeping
/// the certificates so far, once the refined modulus is no longer provable.
pub fn prime_stream(
    ap: EligibleAp,
    count: usize,
    provider: &HProvider,
    mode: Mode,
) -> StreamOutcome {
    let mut steps: Vec<StreamStep> = Vec::with_capacity(count);
    let mut current = ap;
    let mut stopped = None;
    while steps.len() < count {
        if let Some(last) = steps.last() {
            match refine(current, &last.certificate.prime) {
                Ok(next) => current = next,
                Err(e) => {
                    stopped = Some(e);
                    break;
                }
            }
        }
        match find_prime(current, provider, mode) {
            Ok(mut cert) => {
                if !steps.is_empty() {
                    cert.notes.push(format!("stream from {ap}"));
                    cert.notes.push(
                        if steps.last().expect("nonempty").sub_ap.d().is_multiple_of(2) {
                            SPLIT_NOTE_EVEN
                        } else {
                            SPLIT_NOTE_ODD
                        }
                        .to_string(),
                    );
                }
                steps.push(StreamStep {
                    sub_ap: current,
                    certificate: cert,
                });
            }
            Err(e) => {
                stopped = Some(e);
                break;
            }
        }
    }
    StreamOutcome {
        origin: ap,
        steps,
        stopped,
    }
}
