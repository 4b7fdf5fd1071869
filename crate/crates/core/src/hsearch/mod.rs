//! The primorial Jacobsthal function `h(k) = g(p_k#)`.
//!
//! A run of `L` consecutive integers none coprime to `p_1 * ... * p_k` is the
//! same thing as a choice of one residue `c_p` per prime such that the classes
//! `c_p mod p` jointly cover the positions `0..L`. [`coverable`] decides that
//! exactly; [`max_cover_length`] walks `L` upward from the elementary bound
//! until it fails, so `h(k)` is one more than the last feasible length.

mod search;
mod table;

use std::time::Duration;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{self, Int};
use crate::error::{Error, Result};

pub use search::MAX_LEN;
pub use table::{h_of, HEntry, HProvider, HSource, KnownHTable, Policy, DEFAULT_TABLE};

/// Limits and parallelism for the cover search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub workers: usize,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            node_limit: None,
            time_limit: None,
        }
    }
}

impl SearchConfig {
    pub fn serial() -> Self {
        SearchConfig {
            workers: 1,
            ..Self::default()
        }
    }
}

/// One residue per prime; position `i` is covered when `i = c_p (mod p)`
/// for some prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverAssignment {
    pub primes: Vec<u64>,
    pub offsets: Vec<u64>,
    pub length: usize,
}

impl CoverAssignment {
    pub fn offset(&self, p: u64) -> Option<u64> {
        self.primes
            .iter()
            .position(|&q| q == p)
            .map(|i| self.offsets[i])
    }

    /// Position-by-position check of the covering property.
    pub fn is_valid(&self) -> bool {
        self.primes.len() == self.offsets.len()
            && self.primes.iter().zip(&self.offsets).all(|(&p, &c)| c < p)
            && (0..self.length as u64).all(|i| {
                self.primes
                    .iter()
                    .zip(&self.offsets)
                    .any(|(&p, &c)| i % p == c)
            })
    }

    /// The mirror image `i -> length - 1 - i`.
    pub fn reflect(&self) -> CoverAssignment {
        let offsets = self
            .primes
            .iter()
            .zip(&self.offsets)
            .map(|(&p, &c)| search::reflect_offset(c, self.length, p))
            .collect();
        CoverAssignment {
            primes: self.primes.clone(),
            offsets,
            length: self.length,
        }
    }

    /// Same offsets, shorter run.
    pub fn truncate(&self, length: usize) -> CoverAssignment {
        CoverAssignment {
            length: length.min(self.length),
            ..self.clone()
        }
    }

    /// Number of leading positions actually covered by these offsets, which
    /// may exceed `length`.
    pub fn covered_prefix(&self) -> usize {
        (0u64..)
            .take_while(|&i| {
                self.primes
                    .iter()
                    .zip(&self.offsets)
                    .any(|(&p, &c)| i % p == c)
            })
            .count()
    }
}

/// A concrete run of integers `start .. start + length`, each divisible by
/// one of the assignment's primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverWitness {
    pub start: Int,
    pub length: usize,
    pub assignment: CoverAssignment,
}

impl CoverWitness {
    pub fn verify(&self) -> bool {
        verify_cover(&self.start, self.length, &self.assignment.primes)
    }
}

fn check_primes(primes: &[u64]) -> Result<Vec<u64>> {
    if primes.is_empty() {
        return Err(Error::InvalidArgument("prime list is empty".into()));
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("primes must be distinct".into()));
    }
    if let Some(&q) = sorted.iter().find(|&&q| !arith::is_prime_u64(q)) {
        return Err(Error::InvalidArgument(format!("{q} is not prime")));
    }
    Ok(sorted)
}

/// A cover of `0..len` by one residue class per prime, or `None` when no
/// such cover exists. Budget exhaustion is an error, never `None`.
pub fn coverable(
    len: usize,
    primes: &[u64],
    cfg: &SearchConfig,
) -> Result<Option<CoverAssignment>> {
    let primes = check_primes(primes)?;
    let offsets = search::solve(len, &primes, cfg)?;
    Ok(offsets.map(|offsets| CoverAssignment {
        primes,
        offsets,
        length: len,
    }))
}

/// `true` when `primes` are exactly `2, 3, 5, ..., p_k`.
fn is_initial_segment(primes: &[u64]) -> bool {
    arith::first_primes(primes.len()).is_ok_and(|t| t.as_slice() == primes)
}

/// Largest `L` with a cover of `0..L`, and a witness assignment. The
/// Jacobsthal value of the prime set is `L + 1`.
///
/// Of the found assignment and its mirror image, the one whose integer
/// witness starts lower is returned.
pub fn max_cover_length(primes: &[u64], cfg: &SearchConfig) -> Result<(usize, CoverAssignment)> {
    let primes = check_primes(primes)?;
    let k = primes.len();
    let mut best = if k >= 3 && is_initial_segment(&primes) {
        elementary_lower_witness(k)?.assignment
    } else {
        // every prime can take a position of its own
        CoverAssignment {
            offsets: primes
                .iter()
                .enumerate()
                .map(|(i, &p)| i as u64 % p)
                .collect(),
            primes: primes.clone(),
            length: k,
        }
    };
    loop {
        let reach = best.covered_prefix();
        best.length = reach;
        match coverable(reach + 1, &primes, cfg)? {
            Some(a) => best = a,
            None => break,
        }
    }
    let mirror = best.reflect();
    if witness_integer(&mirror).start < witness_integer(&best).start {
        best = mirror;
    }
    Ok((best.length, best))
}

/// The least positive integer `start` with `start + i` divisible by `p`
/// whenever `i = c_p (mod p)`, i.e. `start = -c_p (mod p)`.
pub fn witness_integer(assignment: &CoverAssignment) -> CoverWitness {
    let system: Vec<(Int, Int)> = assignment
        .primes
        .iter()
        .zip(&assignment.offsets)
        .map(|(&p, &c)| (BigInt::from((p - c % p) % p), BigInt::from(p)))
        .collect();
    let (mut start, modulus) =
        arith::crt_solve(&system).expect("distinct primes are pairwise coprime");
    if start.is_zero() {
        start = modulus;
    }
    CoverWitness {
        start,
        length: assignment.length,
        assignment: assignment.clone(),
    }
}

/// Every integer in `start .. start + len` is divisible by some prime in
/// `primes`.
pub fn verify_cover(start: &Int, len: usize, primes: &[u64]) -> bool {
    let residues: Vec<(u64, u64)> = primes
        .iter()
        .filter(|&&p| p > 0)
        .map(|&p| {
            let r: BigInt = start.mod_floor(&BigInt::from(p));
            (p, u64::try_from(r).expect("residue below p"))
        })
        .collect();
    (0..len as u64).all(|i| residues.iter().any(|&(p, r)| (r + i % p) % p == 0))
}

/// A run of `2 p_{n-1} - 1` integers sharing a factor with `p_n#`, centred on
/// `t` with `t = 0` modulo `p_1 ... p_{n-2}`, `t = 1 (mod p_{n-1})` and
/// `t = -1 (mod p_n)`.
pub fn elementary_lower_witness(n: usize) -> Result<CoverWitness> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "elementary witness needs n >= 3, got {n}"
        )));
    }
    let primes = arith::first_primes(n)?.into_vec();
    let (prev, last) = (primes[n - 2], primes[n - 1]);
    let small: Int = primes[..n - 2].iter().fold(Int::one(), |acc, &p| acc * p);
    let (t, _) = arith::crt_solve(&[
        (Int::zero(), small),
        (Int::one(), Int::from(prev)),
        (Int::from(last - 1), Int::from(last)),
    ])?;
    let half = prev - 1;
    let start = &t - half;
    debug_assert!(start.is_positive());
    let offsets = primes
        .iter()
        .map(|&p| {
            let r: BigInt = (-&start).mod_floor(&BigInt::from(p));
            u64::try_from(r).expect("residue below p")
        })
        .collect();
    let assignment = CoverAssignment {
        primes,
        offsets,
        length: (2 * half + 1) as usize,
    };
    Ok(CoverWitness {
        start,
        length: assignment.length,
        assignment,
    })
}
