//! The ordinary Jacobsthal function `g(n)`: the least `m` such that every run
//! of `m` consecutive integers contains one coprime to `n`.
//!
//! Coprimality to `n` only depends on `rad(n)`, and the pattern of coprime
//! residues is periodic with period `rad(n)`, so [`g_of`] scans a single
//! period. When the period is too long to scan, the prime support is handed
//! to the cover search in [`crate::hsearch`].

use serde::Serialize;

use crate::arith::{self, gcd};
use crate::error::{Error, Result};
use crate::hsearch::{self, SearchConfig};

/// `g(n)` together with a longest run of integers sharing a factor with `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapScanResult {
    pub n: u64,
    pub g: u64,
    pub witness_start: u64,
    /// Always `g - 1`.
    pub witness_length: u64,
}

/// Limits for [`g_of_with`].
#[derive(Debug, Clone)]
pub struct ScanBudget {
    /// Largest radical scanned directly.
    pub max_period: u64,
    /// Search limits used when the period is too long.
    pub search: SearchConfig,
}

impl Default for ScanBudget {
    fn default() -> Self {
        ScanBudget {
            max_period: 1 << 30,
            search: SearchConfig::default(),
        }
    }
}

pub fn g_of(n: u64) -> Result<GapScanResult> {
    g_of_with(n, &ScanBudget::default())
}

/// Exact `g(n)`. The witness is the leftmost longest run in `[1, rad(n)]`
/// when the period is scanned directly.
pub fn g_of_with(n: u64, budget: &ScanBudget) -> Result<GapScanResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("g(n) needs n >= 1".into()));
    }
    let support = arith::factorize(n)?.primes();
    let rad: u64 = support.iter().product();
    if rad == 1 {
        return Ok(GapScanResult {
            n,
            g: 1,
            witness_start: 1,
            witness_length: 0,
        });
    }
    if rad <= budget.max_period {
        let (g, start) = scan_period(rad, &support);
        return Ok(GapScanResult {
            n,
            g,
            witness_start: start,
            witness_length: g - 1,
        });
    }
    let (best, assignment) =
        hsearch::max_cover_length(&support, &budget.search).map_err(|e| match e {
            Error::InvalidArgument(_) | Error::OutOfRange(_) => Error::BudgetExceeded {
                nodes: 0,
                elapsed: Default::default(),
            },
            other => other,
        })?;
    let w = hsearch::witness_integer(&assignment);
    let start = w
        .start
        .try_into()
        .map_err(|_| Error::OutOfRange("witness start".into()))?;
    Ok(GapScanResult {
        n,
        g: best as u64 + 1,
        witness_start: start,
        witness_length: best as u64,
    })
}

/// Longest gap between consecutive coprime residues in `[1, rad + 1]`, and
/// the first integer of the leftmost run achieving it.
fn scan_period(rad: u64, support: &[u64]) -> (u64, u64) {
    const BLOCK: u64 = 1 << 16;
    let mut marked = vec![false; BLOCK as usize];
    let mut last_coprime = 1u64;
    let (mut best_gap, mut best_start) = (0u64, 2u64);
    // include rad + 1 so the wraparound gap is seen
    let end = rad + 1;
    let mut lo = 2u64;
    while lo <= end {
        let hi = (lo + BLOCK - 1).min(end);
        let width = (hi - lo + 1) as usize;
        marked[..width].fill(false);
        for &p in support {
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                marked[(m - lo) as usize] = true;
                m += p;
            }
        }
        for (i, &hit) in marked[..width].iter().enumerate() {
            if !hit {
                let x = lo + i as u64;
                let gap = x - last_coprime;
                if gap > best_gap {
                    best_gap = gap;
                    best_start = last_coprime + 1;
                }
                last_coprime = x;
            }
        }
        lo = hi + 1;
    }
    (best_gap, best_start)
}

/// Largest horizon [`g_exhaustive`] accepts.
pub const MAX_HORIZON: u64 = 1 << 32;

/// `g(n)` by direct scan of `[1, horizon]` with one gcd per integer. Test
/// oracle only; `horizon` must cover two periods.
pub fn g_exhaustive(n: u64, horizon: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("g(n) needs n >= 1".into()));
    }
    let rad = arith::radical(n)?;
    if horizon < 2 * rad {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} is shorter than two periods of {rad}"
        )));
    }
    if horizon > MAX_HORIZON {
        return Err(Error::BudgetExceeded {
            nodes: horizon,
            elapsed: Default::default(),
        });
    }
    let (mut run, mut longest) = (0u64, 0u64);
    for x in 1..=horizon {
        if gcd(x, n) > 1 {
            run += 1;
            longest = longest.max(run);
        } else {
            run = 0;
        }
    }
    Ok(longest + 1)
}
