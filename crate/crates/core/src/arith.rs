//! Exact integer primitives.
//!
//! Everything here is a pure function. The only shared state is a lazily
//! built table of the primes below [`CACHED_PRIME_BOUND`], which is immutable
//! once initialised.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision signed integer used for CRT values, preimages and
/// anything else that can outgrow a machine word.
pub type Int = BigInt;

/// Primes up to this bound are sieved once and shared.
pub const CACHED_PRIME_BOUND: u64 = 1 << 21;

/// Largest prime index `nth_prime` will sieve for.
pub const MAX_PRIME_INDEX: usize = 2_000_000;

/// Miller-Rabin with the first 13 prime bases is exact below this value.
const MR_13_BASES_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

/// Ascending list of consecutive primes starting at 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `p_k`, 1-based.
    pub fn nth(&self, k: usize) -> Option<u64> {
        k.checked_sub(1).and_then(|i| self.primes.get(i).copied())
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.primes
    }
}

fn cached_primes() -> &'static [u64] {
    static CACHE: OnceLock<Vec<u64>> = OnceLock::new();
    CACHE.get_or_init(|| sieve(CACHED_PRIME_BOUND))
}

fn sieve(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    // odd-only sieve: index i stands for 2i + 1
    let mut composite = vec![false; n / 2 + 1];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < composite.len() {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2];
    out.extend(
        (1..composite.len())
            .filter(|&i| !composite[i] && 2 * i < n)
            .map(|i| (2 * i + 1) as u64),
    );
    out
}

/// All primes `<= bound`, ascending.
pub fn primes_upto(bound: u64) -> PrimeTable {
    let primes = if bound <= CACHED_PRIME_BOUND {
        let cache = cached_primes();
        let end = cache.partition_point(|&p| p <= bound);
        cache[..end].to_vec()
    } else {
        sieve(bound)
    };
    PrimeTable { primes }
}

/// Upper bound on `p_k` (Rosser's bound for k >= 6).
fn nth_prime_upper_bound(k: usize) -> u64 {
    if k < 6 {
        return 13;
    }
    let x = k as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64 + 1
}

/// The first `k` primes.
pub fn first_primes(k: usize) -> Result<PrimeTable> {
    if k > MAX_PRIME_INDEX {
        return Err(Error::ResourceLimit(format!(
            "prime index {k} exceeds cap {MAX_PRIME_INDEX}"
        )));
    }
    let cache = cached_primes();
    if k <= cache.len() {
        return Ok(PrimeTable {
            primes: cache[..k].to_vec(),
        });
    }
    let mut primes = sieve(nth_prime_upper_bound(k));
    primes.truncate(k);
    Ok(PrimeTable { primes })
}

/// The `k`-th prime, `p_1 = 2`.
pub fn nth_prime(k: usize) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("prime index must be >= 1".into()));
    }
    let cache = cached_primes();
    if k <= cache.len() {
        return Ok(cache[k - 1]);
    }
    first_primes(k).map(|t| *t.primes.last().expect("k >= 1"))
}

/// `p_k# = p_1 * ... * p_k`; the empty product for `k = 0`.
pub fn primorial(k: usize) -> Result<Int> {
    Ok(first_primes(k)?
        .primes
        .iter()
        .fold(Int::one(), |acc, &p| acc * p))
}

/// Extended Euclid: `(g, u, v)` with `g = gcd(x, y) >= 0` and `u x + v y = g`.
pub fn ext_gcd(x: &Int, y: &Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (x.clone(), y.clone());
    let (mut old_u, mut u) = (Int::one(), Int::zero());
    let (mut old_v, mut v) = (Int::zero(), Int::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_u = &old_u - &q * &u;
        old_u = std::mem::replace(&mut u, next_u);
        let next_v = &old_v - &q * &v;
        old_v = std::mem::replace(&mut v, next_v);
    }
    if old_r.is_negative() {
        (-old_r, -old_u, -old_v)
    } else if old_r.is_zero() {
        (Int::zero(), Int::zero(), Int::zero())
    } else {
        (old_r, old_u, old_v)
    }
}

/// Least nonnegative `c` with `c = r_i (mod m_i)` for every pair, and the
/// product `M` of the moduli. Moduli must be positive and pairwise coprime.
pub fn crt_solve(congruences: &[(Int, Int)]) -> Result<(Int, Int)> {
    let mut c = Int::zero();
    let mut modulus = Int::one();
    for (i, (residue, m)) in congruences.iter().enumerate() {
        if !m.is_positive() {
            return Err(Error::InvalidModulus(m.to_string()));
        }
        let (g, inv, _) = ext_gcd(&(&modulus % m), m);
        if !g.is_one() {
            // name the earlier modulus sharing the factor
            let other = congruences[..i]
                .iter()
                .map(|(_, mj)| mj)
                .find(|mj| !mj.gcd(m).is_one())
                .cloned()
                .unwrap_or_else(|| modulus.clone());
            return Err(Error::NonCoprimeModuli(other.to_string(), m.to_string()));
        }
        let t = ((residue - &c) * inv).mod_floor(m);
        c += &modulus * t;
        modulus *= m;
    }
    Ok((c.mod_floor(&modulus), modulus))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Deterministic primality for every `u64` (Miller-Rabin, bases up to 37).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES[..12] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Exact primality of a positive integer; negative numbers, 0 and 1 are not
/// prime. Exact for every input below 3.3e24, [`Error::OutOfRange`] beyond.
pub fn is_prime(n: &Int) -> Result<bool> {
    if n.sign() != Sign::Plus {
        return Ok(false);
    }
    if let Some(small) = n.to_u64() {
        return Ok(is_prime_u64(small));
    }
    let wide = n.to_u128().filter(|&v| v < MR_13_BASES_BOUND);
    let Some(wide) = wide else {
        return Err(Error::OutOfRange(format!("primality of {n}")));
    };
    for &p in &MR_BASES {
        if wide % p as u128 == 0 {
            return Ok(false);
        }
    }
    let n = BigUint::from(wide);
    let one = BigUint::one();
    let minus_one = &n - &one;
    let s = minus_one.trailing_zeros().unwrap_or(0);
    let d = &minus_one >> s;
    'witness: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, &n);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % &n;
            if x == minus_one {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub base: u64,
    /// Distinct primes, ascending, each with exponent >= 1.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, _)| p).collect()
    }

    pub fn radical(&self) -> u64 {
        self.factors.iter().map(|&(p, _)| p).product()
    }

    pub fn reassemble(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

/// Limits for [`factorize_with`].
#[derive(Debug, Clone, Copy)]
pub struct FactorBudget {
    /// Trial division runs over primes up to this bound.
    pub trial_bound: u64,
    /// Total Pollard-rho iterations before giving up.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_bound: 1 << 16,
            rho_iterations: 1 << 26,
        }
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    factorize_with(n, &FactorBudget::default())
}

/// Trial division by sieved primes, then Brent's rho on the cofactor. Every
/// reported factor is checked with [`is_prime_u64`].
pub fn factorize_with(n: u64, budget: &FactorBudget) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    let mut found: Vec<u64> = Vec::new();
    let mut rest = n;
    for &p in primes_upto(budget.trial_bound.min(CACHED_PRIME_BOUND)).as_slice() {
        if p * p > rest {
            break;
        }
        while rest.is_multiple_of(p) {
            found.push(p);
            rest /= p;
        }
    }
    if rest > 1 {
        let mut fuel = budget.rho_iterations;
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if is_prime_u64(m) {
                found.push(m);
                continue;
            }
            let f = rho_split(m, &mut fuel).ok_or_else(|| {
                Error::ResourceLimit(format!("factoring {n} exceeded the rho budget"))
            })?;
            stack.push(f);
            stack.push(m / f);
        }
    }
    found.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in found {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { base: n, factors })
}

/// Product of the distinct prime factors; `radical(1) = 1`.
pub fn radical(n: u64) -> Result<u64> {
    factorize(n).map(|f| f.radical())
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A nontrivial factor of the composite `n`, or `None` once `fuel` runs out.
fn rho_split(n: u64, fuel: &mut u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    for c in 1..u64::MAX {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut x, mut ys) = (y, y);
        let mut g = 1;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let batch = 128.min(r - k);
                for _ in 0..batch {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                *fuel = fuel.checked_sub(batch)?;
                g = gcd_u64(q, n);
                k += batch;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    gcd_u64(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    #[test]
    fn ext_gcd_examples() {
        let (g, u, v) = ext_gcd(&int(3), &int(4));
        assert_eq!(g, int(1));
        assert_eq!(u * 3 + v * 4, int(1));
        assert_eq!(ext_gcd(&int(0), &int(0)), (int(0), int(0), int(0)));
        let (g, u, v) = ext_gcd(&int(10), &int(4));
        assert_eq!(g, int(2));
        assert_eq!(u * 10 + v * 4, int(2));
        let (g, u, v) = ext_gcd(&int(-12), &int(18));
        assert_eq!(g, int(6));
        assert_eq!(u * -12 + v * 18, int(6));
    }

    #[test]
    fn crt_examples() {
        let sys = |v: &[(i64, i64)]| -> Vec<(Int, Int)> {
            v.iter().map(|&(r, m)| (int(r), int(m))).collect()
        };
        assert_eq!(
            crt_solve(&sys(&[(1, 3), (0, 2)])).unwrap(),
            (int(4), int(6))
        );
        assert_eq!(
            crt_solve(&sys(&[(1, 4), (0, 3)])).unwrap(),
            (int(9), int(12))
        );
        assert_eq!(
            crt_solve(&sys(&[(1, 7), (0, 2), (0, 3), (0, 5)])).unwrap(),
            (int(120), int(210))
        );
        assert_eq!(crt_solve(&[]).unwrap(), (int(0), int(1)));
        assert!(matches!(
            crt_solve(&sys(&[(1, 4), (0, 6)])),
            Err(Error::NonCoprimeModuli(_, _))
        ));
        assert!(matches!(
            crt_solve(&sys(&[(1, 0)])),
            Err(Error::InvalidModulus(_))
        ));
    }

    #[test]
    fn prime_indices() {
        assert_eq!(nth_prime(1).unwrap(), 2);
        assert_eq!(nth_prime(4).unwrap(), 7);
        assert_eq!(nth_prime(6).unwrap(), 13);
        assert_eq!(nth_prime(55).unwrap(), 257);
        assert_eq!(nth_prime(10_001).unwrap(), 104_743);
        assert!(nth_prime(0).is_err());
        assert!(matches!(
            nth_prime(MAX_PRIME_INDEX + 1),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn nth_prime_beyond_cache() {
        let cached = cached_primes().len();
        let t = first_primes(cached + 10).unwrap();
        assert_eq!(t.len(), cached + 10);
        assert!(t.as_slice().windows(2).all(|w| w[0] < w[1]));
        assert!(t.as_slice().iter().all(|&p| is_prime_u64(p)));
    }

    #[test]
    fn primorial_values() {
        let expect = [2u64, 6, 30, 210, 2310];
        for (k, &v) in expect.iter().enumerate() {
            assert_eq!(primorial(k + 1).unwrap(), Int::from(v));
        }
    }

    #[test]
    fn primality_edges() {
        assert!(is_prime(&int(97)).unwrap());
        assert!(!is_prime(&int(1)).unwrap());
        assert!(!is_prime(&int(-7)).unwrap());
        assert!(!is_prime(&int(0)).unwrap());
        assert!(!is_prime(&int(66049)).unwrap());
        // strong pseudoprime to bases 2..=37 only below these bounds
        assert!(!is_prime_u64(3_215_031_751));
        assert!(!is_prime_u64(3_825_123_056_546_413_051));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        let mersenne_81: Int = (Int::one() << 81) - 1;
        assert!(!is_prime(&mersenne_81).unwrap());
        let p: Int = "1208925819614629174706189".parse().unwrap(); // 2^80 + 13
        assert!(is_prime(&p).unwrap());
        let huge: Int = Int::one() << 200;
        assert!(matches!(is_prime(&huge), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn sieve_matches_trial_division() {
        let table = primes_upto(5000);
        let brute: Vec<u64> = (2..=5000u64)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        assert_eq!(table.as_slice(), brute.as_slice());
        assert!(primes_upto(1).is_empty());
        assert_eq!(primes_upto(2).as_slice(), &[2]);
    }

    #[test]
    fn factorize_examples() {
        let f = factorize(10).unwrap();
        assert_eq!(f.factors, vec![(2, 1), (5, 1)]);
        assert_eq!(f.radical(), 10);
        let f = factorize(2310).unwrap();
        assert_eq!(f.primes(), vec![2, 3, 5, 7, 11]);
        assert!(f.factors.iter().all(|&(_, e)| e == 1));
        let f = factorize(12).unwrap();
        assert_eq!(f.factors, vec![(2, 2), (3, 1)]);
        assert_eq!(radical(12).unwrap(), 6);
        assert_eq!(radical(1).unwrap(), 1);
        assert!(factorize(0).is_err());
        // semiprime with both factors beyond trial division
        let n = 4_294_967_291u64 * 4_294_967_279;
        assert_eq!(
            factorize(n).unwrap().factors,
            vec![(4_294_967_279, 1), (4_294_967_291, 1)]
        );
    }

    #[test]
    fn factor_budget_rejects() {
        let tight = FactorBudget {
            trial_bound: 100,
            rho_iterations: 10,
        };
        let n = 4_294_967_291u64 * 4_294_967_279;
        assert!(matches!(
            factorize_with(n, &tight),
            Err(Error::ResourceLimit(_))
        ));
    }

    proptest! {
        #[test]
        fn ext_gcd_bezout(x in -1_000_000i64..1_000_000, y in -1_000_000i64..1_000_000) {
            let (g, u, v) = ext_gcd(&int(x), &int(y));
            prop_assert!(!g.is_negative());
            prop_assert_eq!(&u * x + &v * y, g.clone());
            if !g.is_zero() {
                prop_assert!((int(x) % &g).is_zero());
                prop_assert!((int(y) % &g).is_zero());
            }
        }

        #[test]
        fn crt_is_least_solution(r in proptest::collection::vec(-500i64..500, 1..5)) {
            let moduli = [7i64, 9, 10, 11, 13];
            let sys: Vec<(Int, Int)> =
                r.iter().zip(moduli).map(|(&r, m)| (int(r), int(m))).collect();
            let (c, m) = crt_solve(&sys).unwrap();
            prop_assert!(!c.is_negative() && c < m);
            for (res, md) in &sys {
                prop_assert_eq!((&c - res).mod_floor(md), Int::zero());
            }
            // brute force: no smaller nonnegative solution
            let below = num_traits::ToPrimitive::to_i64(&c).unwrap();
            for cand in 0..below.min(5000) {
                let ok = sys.iter().all(|(res, md)| (int(cand) - res).mod_floor(md).is_zero());
                prop_assert!(!ok);
            }
        }

        #[test]
        fn factorization_reassembles(n in 1u64..50_000_000) {
            let f = factorize(n).unwrap();
            prop_assert_eq!(f.reassemble(), n);
            prop_assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(f.factors.iter().all(|&(p, _)| is_prime_u64(p)));
            let r = f.radical();
            prop_assert_eq!(n % r, 0);
            prop_assert_eq!(radical(r).unwrap(), r);
        }

        #[test]
        fn wide_factorization(n in 1u64..u64::MAX) {
            prop_assert_eq!(factorize(n).unwrap().reassemble(), n);
        }
    }
}
