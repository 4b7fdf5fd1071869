//! Certified primes in eligible progressions.
//!
//! For `k` with `(p_{k+1}^2 - 2) / (h(k) + 1) >= d`, every eligible `a + dZ`
//! has at least `h(k)` terms in `[2, p_{k+1}^2 - 1]`. Pulling those terms back
//! through an S-good map for `S = {p_1, ..., p_k}` gives a run of at least
//! `h(k)` consecutive integers, one of which is coprime to `p_k#`; its image
//! is coprime to `p_k#` and below `p_{k+1}^2`, hence prime.

mod bound;
mod certificate;
mod stream;

use serde::Serialize;

pub use bound::{
    bound, bound_table, cw_upper, max_provable_d, min_k_for, BoundRow, HProvenance, CW_COEFFICIENT,
    CW_RANGE,
};
pub use certificate::{
    find_prime, prime_by_window, verify_certificate, Check, PrimeCertificate, Verification,
};
pub use stream::{prime_stream, refine, StreamOutcome, StreamStep};

/// Which `h(k)` values a proof may rest on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact values only.
    Unconditional,
    /// The published upper bound on `h(n)` for `50 <= n <= 10000`.
    CwConditional,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Unconditional => "unconditional",
            Mode::CwConditional => "cw",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "unconditional" => Some(Mode::Unconditional),
            "cw" => Some(Mode::CwConditional),
            _ => None,
        }
    }
}
