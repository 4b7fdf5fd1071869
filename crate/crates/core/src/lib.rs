//! Jacobsthal's function, primorial cover search, and certified primes in
//! eligible arithmetic progressions.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: exact integer primitives (extended gcd, CRT, sieving,
//!   primorials, primality, factoring).
//! - [`jacobsthal`]: the ordinary Jacobsthal function `g(n)` with a period
//!   scan and an exhaustive oracle.
//! - [`hsearch`]: `h(k) = g(p_k#)` by branch-and-bound over residue covers,
//!   the elementary `2 p_{k-1}` witness, and the table of known values.
//! - [`isomorph`]: eligible progressions, segments and S-good maps
//!   `n -> c + d n`.
//! - [`dirichlet`]: the coverage bound `(p_{k+1}^2 - 2) / (h(k) + 1)`, the
//!   prime finder that emits [`PrimeCertificate`]s, and the distinct-prime
//!   stream.

pub mod arith;
pub mod dirichlet;
pub mod error;
pub mod hsearch;
pub mod isomorph;
pub mod jacobsthal;

pub use arith::{Factorization, Int, PrimeTable};
pub use dirichlet::{BoundRow, Mode, PrimeCertificate, StreamOutcome};
pub use error::{Error, Result};
pub use hsearch::{
    CoverAssignment, CoverWitness, HProvider, HSource, KnownHTable, Policy, SearchConfig,
};
pub use isomorph::{EligibleAp, SGoodIso, Segment};
pub use jacobsthal::GapScanResult;
