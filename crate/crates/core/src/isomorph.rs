//! Eligible progressions `a + dZ`, their segments, and the order-preserving
//! maps `n -> c + d n` from the integers onto them.
//!
//! A map is S-good when it sends integers coprime to every prime of `S` to
//! integers with the same property. Choosing `c = a (mod d)` and `c = 0`
//! modulo every `q` in `S` not dividing `d` gives one (see [`s_good_iso`]).

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{self, gcd, Int};
use crate::error::{Error, Result};

/// `a + dZ` with `0 <= a < d` and `gcd(a, d) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EligibleAp {
    a: u64,
    d: u64,
}

impl EligibleAp {
    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn contains(&self, x: &Int) -> bool {
        residue(x, self.d) == self.a
    }
}

impl std::fmt::Display for EligibleAp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} + {}Z", self.a, self.d)
    }
}

pub(crate) fn residue(x: &Int, m: u64) -> u64 {
    x.mod_floor(&Int::from(m))
        .to_u64()
        .expect("residue is below the modulus")
}

/// Normalises `a` into `0..d` and checks eligibility.
pub fn make_eligible(a: &Int, d: u64) -> Result<EligibleAp> {
    if d == 0 {
        return Err(Error::InvalidModulus("0".into()));
    }
    let a = residue(a, d);
    let g = gcd(a, d);
    if g != 1 {
        return Err(Error::NotEligible {
            a: a.to_string(),
            d,
            gcd: g,
        });
    }
    Ok(EligibleAp { a, d })
}

/// `{first, first + step, ..., first + (length - 1) step}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub first: Int,
    pub step: u64,
    pub length: u64,
}

impl Segment {
    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn get(&self, i: u64) -> Option<Int> {
        (i < self.length).then(|| &self.first + Int::from(self.step) * i)
    }

    pub fn last(&self) -> Option<Int> {
        self.length.checked_sub(1).and_then(|i| self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = Int> + '_ {
        let step = Int::from(self.step);
        let mut x = self.first.clone();
        (0..self.length).map(move |_| {
            let out = x.clone();
            x += &step;
            out
        })
    }
}

/// `n -> c + d n`, S-good for the primes in `primes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SGoodIso {
    pub c: Int,
    pub d: u64,
    pub primes: Vec<u64>,
    pub target: EligibleAp,
}

/// The least nonnegative `c` with `c = a (mod d)` and `q | c` for every
/// `q` in `primes` that does not divide `d`.
pub fn s_good_iso(ap: EligibleAp, primes: &[u64]) -> Result<SGoodIso> {
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    let mut system = vec![(Int::from(ap.a), Int::from(ap.d))];
    system.extend(
        primes
            .iter()
            .filter(|&&q| !ap.d.is_multiple_of(q))
            .map(|&q| (Int::zero(), Int::from(q))),
    );
    let (c, _) = arith::crt_solve(&system)?;
    Ok(SGoodIso {
        c,
        d: ap.d,
        primes,
        target: ap,
    })
}

impl SGoodIso {
    pub fn apply(&self, n: &Int) -> Int {
        &self.c + Int::from(self.d) * n
    }

    pub fn invert(&self, x: &Int) -> Result<Int> {
        let diff = x - &self.c;
        let (q, r) = diff.div_mod_floor(&Int::from(self.d));
        if !r.is_zero() {
            return Err(self.not_in(x));
        }
        Ok(q)
    }

    fn not_in(&self, x: &Int) -> Error {
        Error::NotInProgression {
            x: x.to_string(),
            a: self.target.a,
            d: self.d,
        }
    }

    /// The integers mapped onto `seg`, in order; same length.
    pub fn preimage_segment(&self, seg: &Segment) -> Result<Segment> {
        if seg.is_empty() {
            let first = self.invert(&seg.first).unwrap_or_default();
            return Ok(Segment {
                first,
                step: 1,
                length: 0,
            });
        }
        if seg.step != self.d {
            return Err(self.not_in(&seg.first));
        }
        Ok(Segment {
            first: self.invert(&seg.first)?,
            step: 1,
            length: seg.length,
        })
    }

    /// Checks, for every `|n| <= window`, that `n` coprime to all of the
    /// primes implies `c + d n` coprime to all of them.
    pub fn is_s_good_on_window(&self, window: u64) -> bool {
        // residues of n and of c + d n, stepped incrementally from n = -window
        let mut state: Vec<(u64, u64, u64, u64)> = self
            .primes
            .iter()
            .map(|&q| {
                let n0 = residue(&Int::from(-(window as i128)), q);
                let img = residue(&self.apply(&Int::from(-(window as i128))), q);
                (q, n0, img, self.d % q)
            })
            .collect();
        let span = 2 * window + 1;
        for _ in 0..span {
            let n_coprime = state.iter().all(|&(_, n, _, _)| n != 0);
            if n_coprime && state.iter().any(|&(_, _, img, _)| img == 0) {
                return false;
            }
            for (q, n, img, dq) in state.iter_mut() {
                *n += 1;
                if *n == *q {
                    *n = 0;
                }
                *img += *dq;
                if *img >= *q {
                    *img -= *q;
                }
            }
        }
        true
    }
}

/// Elements of `ap` in `[lo, hi]`.
pub fn segment_of_ap_in_range(ap: EligibleAp, lo: &Int, hi: &Int) -> Segment {
    let d = Int::from(ap.d);
    let shift = (Int::from(ap.a) - lo).mod_floor(&d);
    let first = lo + shift;
    let length = if &first > hi {
        0
    } else {
        ((hi - &first) / &d + 1u32)
            .to_u64()
            .expect("segment length fits in u64")
    };
    Segment {
        first,
        step: ap.d,
        length,
    }
}

/// True when some prime in `primes` divides `x`.
pub fn shares_factor(x: &Int, primes: &[u64]) -> bool {
    primes.iter().any(|&q| residue(x, q) == 0)
}

impl SGoodIso {
    /// Rows `(n, c + d n)` for `|n| <= half_width`.
    pub fn window(&self, half_width: i64) -> Vec<(Int, Int)> {
        (-half_width..=half_width)
            .map(|n| {
                let n = Int::from(n);
                let img = self.apply(&n);
                (n, img)
            })
            .collect()
    }

    pub fn primes_not_dividing_d(&self) -> Vec<u64> {
        self.primes
            .iter()
            .copied()
            .filter(|&q| !self.d.is_multiple_of(q))
            .collect()
    }
}
