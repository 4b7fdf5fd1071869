use std::fmt;
use std::ops::RangeInclusive;

use serde::Serialize;

use super::Mode;
use crate::arith;
use crate::error::{Error, Result};
use crate::hsearch::{HProvider, HSource};

/// Coefficient of the published bound `h(n) <= 0.27749612254 n^2 log n`.
pub const CW_COEFFICIENT: f64 = 0.277_496_122_54;

/// Range of `n` the published bound covers.
pub const CW_RANGE: RangeInclusive<usize> = 50..=10_000;

/// How an `h(k)` value is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum HProvenance {
    Exact(HSource),
    ConditionalCw,
}

impl HProvenance {
    pub fn as_str(self) -> &'static str {
        match self {
            HProvenance::Exact(s) => s.as_str(),
            HProvenance::ConditionalCw => "cw",
        }
    }

    pub fn parse(s: &str) -> Option<HProvenance> {
        match s {
            "cw" => Some(HProvenance::ConditionalCw),
            other => HSource::parse(other).map(HProvenance::Exact),
        }
    }
}

impl fmt::Display for HProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `(p_{k+1}^2 - 2) / (h(k) + 1)`, kept as the exact pair of integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub k: usize,
    pub p_next: u64,
    pub h: u64,
    pub provenance: HProvenance,
    pub numerator: u64,
    pub denominator: u64,
}

impl BoundRow {
    pub fn new(k: usize, h: u64, provenance: HProvenance) -> Result<Self> {
        let p_next = arith::nth_prime(k + 1)?;
        Ok(BoundRow {
            k,
            p_next,
            h,
            provenance,
            numerator: p_next * p_next - 2,
            denominator: h + 1,
        })
    }

    /// `value >= d`, compared exactly.
    pub fn proves(&self, d: u64) -> bool {
        self.numerator as u128 >= d as u128 * self.denominator as u128
    }

    pub fn floor(&self) -> u64 {
        self.numerator / self.denominator
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Three decimals, half away from zero.
    pub fn render(&self) -> String {
        let scaled = self.numerator as u128 * 1000;
        let den = self.denominator as u128;
        let mut q = scaled / den;
        if 2 * (scaled % den) >= den {
            q += 1;
        }
        format!("{}.{:03}", q / 1000, q % 1000)
    }
}

/// `ceil(0.27749612254 * n^2 * ln n)`, natural logarithm, for `n` in
/// [`CW_RANGE`].
pub fn cw_upper(n: usize) -> Result<u64> {
    if !CW_RANGE.contains(&n) {
        return Err(Error::OutOfRange(format!(
            "cw bound needs 50 <= n <= 10000, got {n}"
        )));
    }
    let x = n as f64;
    Ok((CW_COEFFICIENT * x * x * x.ln()).ceil() as u64)
}

fn h_for(k: usize, provider: &HProvider, mode: Mode) -> Result<(u64, HProvenance)> {
    match mode {
        Mode::Unconditional => provider.get(k).map(|(h, s)| (h, HProvenance::Exact(s))),
        Mode::CwConditional => Ok((cw_upper(k)?, HProvenance::ConditionalCw)),
    }
}

pub fn bound(k: usize, provider: &HProvider, mode: Mode) -> Result<BoundRow> {
    let (h, prov) = h_for(k, provider, mode)?;
    BoundRow::new(k, h, prov)
}

/// Rows for each `k`, with per-row failures kept.
pub fn bound_table(
    ks: &[usize],
    provider: &HProvider,
    mode: Mode,
) -> Vec<(usize, Result<BoundRow>)> {
    ks.iter().map(|&k| (k, bound(k, provider, mode))).collect()
}

fn candidate_ks(provider: &HProvider, mode: Mode) -> Vec<usize> {
    match mode {
        Mode::Unconditional => (1..=provider.max_available_k())
            .filter(|&k| provider.is_available(k))
            .collect(),
        Mode::CwConditional => CW_RANGE.collect(),
    }
}

/// Largest provable `d` and the smallest `k` reaching it.
pub fn max_provable_d(provider: &HProvider, mode: Mode) -> Result<(u64, usize)> {
    let mut best = (0u64, 0usize);
    for k in candidate_ks(provider, mode) {
        let row = match bound(k, provider, mode) {
            Ok(row) => row,
            Err(e) if e.is_budget() => return Err(e),
            Err(_) => continue,
        };
        if row.floor() > best.0 {
            best = (row.floor(), k);
        }
    }
    Ok(best)
}

/// Smallest available `k` whose bound reaches `d`.
pub fn min_k_for(d: u64, provider: &HProvider, mode: Mode) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidModulus("0".into()));
    }
    for k in candidate_ks(provider, mode) {
        match bound(k, provider, mode) {
            Ok(row) if row.proves(d) => return Ok(k),
            Ok(_) | Err(Error::Unavailable(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let (max_d, _) = max_provable_d(provider, mode)?;
    Err(Error::NotProvable { d, max_d })
}
