//! Integer factorization and the elementary multiplicative building blocks
//! (κ, Ω, ω, φ, P⁺, P⁻, exact divisibility, prime tables).
//!
//! Factorization is deterministic: trial division by primes below 1000, a
//! perfect-power check, then Brent's variant of Pollard rho with fixed
//! parameters. Every prime factor reported is certified by a Miller-Rabin test
//! with the first 13 prime bases, which is a proof of primality below
//! [`CERTIFIED_LIMIT`]. Inputs with a prime factor above it are refused.

use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Miller-Rabin with the first 13 primes as bases is deterministic below this
/// bound (Sorenson and Webster).
pub const CERTIFIED_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

const MR_BASES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const TRIAL_BOUND: u64 = 1000;

/// Prime factorization as `(prime, exponent)` pairs in increasing prime order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Factorization {
    pairs: Vec<(u128, u32)>,
}

/// Least prime factor, with `P⁻(1) = ∞` represented explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LeastPrime {
    Finite(u128),
    Infinity,
}

impl fmt::Display for LeastPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeastPrime::Finite(p) => write!(f, "{p}"),
            LeastPrime::Infinity => f.write_str("inf"),
        }
    }
}

impl Factorization {
    /// The empty factorization of 1.
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a factorization after checking the ordering, exponent and
    /// primality invariants.
    pub fn from_pairs(pairs: Vec<(u128, u32)>) -> Result<Self> {
        for w in pairs.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::domain("primes must be strictly increasing"));
            }
        }
        for &(p, e) in &pairs {
            if e == 0 {
                return Err(Error::domain("exponents must be positive"));
            }
            if !is_prime(p) {
                return Err(Error::domain(format!("{p} is not prime")));
            }
        }
        Ok(Self { pairs })
    }

    pub(crate) fn from_sorted_unchecked(pairs: Vec<(u128, u32)>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(u128, u32)] {
        &self.pairs
    }

    pub fn iter(&self) -> impl Iterator<Item = (u128, u32)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn is_one(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Exponent of `p` (0 if `p` does not divide the value).
    pub fn exponent_of(&self, p: u128) -> u32 {
        self.pairs
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.pairs[i].1)
            .unwrap_or(0)
    }

    /// Reconstructed value, `None` on u128 overflow.
    pub fn value(&self) -> Option<u128> {
        self.pairs
            .iter()
            .try_fold(1u128, |acc, &(p, e)| acc.checked_mul(p.checked_pow(e)?))
    }

    /// Squarefree kernel.
    pub fn kappa(&self) -> Option<u128> {
        self.pairs
            .iter()
            .try_fold(1u128, |acc, &(p, _)| acc.checked_mul(p))
    }

    /// Ω: prime factors counted with multiplicity.
    pub fn omega_big(&self) -> u32 {
        self.pairs.iter().map(|&(_, e)| e).sum()
    }

    /// ω: distinct prime factors.
    pub fn omega_small(&self) -> usize {
        self.pairs.len()
    }

    pub fn phi(&self) -> Option<u128> {
        self.pairs.iter().try_fold(1u128, |acc, &(p, e)| {
            acc.checked_mul(p.checked_pow(e - 1)?.checked_mul(p - 1)?)
        })
    }

    /// Greatest prime factor; `P⁺(1) = 1`.
    pub fn p_plus(&self) -> u128 {
        self.pairs.last().map_or(1, |&(p, _)| p)
    }

    /// Least prime factor; `P⁻(1) = ∞`.
    pub fn p_minus(&self) -> LeastPrime {
        self.pairs
            .first()
            .map_or(LeastPrime::Infinity, |&(p, _)| LeastPrime::Finite(p))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return f.write_str("1");
        }
        for (i, &(p, e)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// modular arithmetic on u128

#[inline]
pub(crate) fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    debug_assert!(a < m && b < m);
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

#[inline]
pub(crate) fn sub_mod(a: u128, b: u128, m: u128) -> u128 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

/// `a·b mod m` for operands already reduced modulo `m`.
#[inline]
pub(crate) fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a * b) % m;
    }
    // double-and-add; only reached for moduli above 2^64
    let (mut a, mut b) = (a % m, b % m);
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    acc
}

pub(crate) fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
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

fn miller_rabin(n: u128, bases: &[u128]) -> bool {
    let d0 = n - 1;
    let s = d0.trailing_zeros();
    let d = d0 >> s;
    'witness: for &a in bases {
        let a = a % n;
        if a == 0 {
            continue;
        }
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

/// Primality test. Deterministic (a proof) below [`CERTIFIED_LIMIT`]; above it
/// the answer is a strong probable-prime test to 24 bases.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 43 * 43 {
        return true;
    }
    if n < CERTIFIED_LIMIT {
        miller_rabin(n, &MR_BASES)
    } else {
        const MORE: [u128; 24] = [
            2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
            83, 89,
        ];
        miller_rabin(n, &MORE)
    }
}

fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| primes_up_to(TRIAL_BOUND))
}

/// Integer k-th root (floor).
fn iroot(n: u128, k: u32) -> u128 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64) as u128;
    // fix the float estimate in both directions
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

fn brent_rho(n: u128, c: u128) -> Option<u128> {
    let f = |x: u128| add_mod(mul_mod(x, x, n), c, n);
    let diff = |a: u128, b: u128| a.abs_diff(b);
    let m = 128u64;
    let (mut y, mut r, mut q, mut g) = (2u128 % n, 1u64, 1u128, 1u128);
    let (mut x, mut ys) = (y, y);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, diff(x, y), n);
            }
            g = q.gcd(&n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = diff(x, ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Finds a nontrivial divisor of a composite `n` with no prime factor below
/// the trial bound.
fn split(n: u128) -> u128 {
    for k in (2..=n.ilog2()).rev() {
        let r = iroot(n, k);
        if r > 1 && r.pow(k) == n {
            return r;
        }
    }
    (1..)
        .find_map(|c| brent_rho(n, c))
        .expect("Brent rho eventually splits a composite")
}

fn factor_into(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = split(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Complete, certified prime factorization of `n ≥ 1`.
pub fn factor(n: u128) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("cannot factor 0"));
    }
    let mut pairs = Vec::new();
    let mut rest = n;
    for &p in small_primes() {
        let p = p as u128;
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            pairs.push((p, e));
        }
    }
    if rest > 1 {
        let mut primes = Vec::new();
        factor_into(rest, &mut primes);
        primes.sort_unstable();
        // primality above the limit is only probable
        if let Some(&big) = primes.iter().find(|&&p| p >= CERTIFIED_LIMIT) {
            return Err(Error::Overflow(format!(
                "prime factor {big} of {n} is beyond the certified factorization range"
            )));
        }
        for p in primes {
            match pairs.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => pairs.push((p, 1)),
            }
        }
    }
    Ok(Factorization { pairs })
}

pub fn kappa(n: u128) -> Result<u128> {
    Ok(factor(n)?.kappa().expect("kappa(n) <= n"))
}

pub fn omega_big(n: u128) -> Result<u32> {
    Ok(factor(n)?.omega_big())
}

pub fn omega_small(n: u128) -> Result<usize> {
    Ok(factor(n)?.omega_small())
}

pub fn phi(n: u128) -> Result<u128> {
    Ok(factor(n)?.phi().expect("phi(n) <= n"))
}

pub fn p_plus(n: u128) -> Result<u128> {
    Ok(factor(n)?.p_plus())
}

pub fn p_minus(n: u128) -> Result<LeastPrime> {
    Ok(factor(n)?.p_minus())
}

/// `a ‖ b`: `a | b` and `gcd(a, b/a) = 1`. In particular `1 ‖ b` for all `b`.
pub fn exactly_divides(a: u128, b: u128) -> bool {
    a != 0 && b.is_multiple_of(a) && a.gcd(&(b / a)) == 1
}

/// p-adic valuation of a nonzero `n`.
pub fn valuation(mut n: u128, p: u128) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// All primes `≤ x` (sieve of Eratosthenes over odd numbers).
pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let half = ((x - 1) / 2) as usize; // index i <-> 2i + 3
    let mut composite = vec![false; half];
    let mut i = 0;
    while i < half {
        let p = 2 * i as u64 + 3;
        if p * p > x {
            break;
        }
        if !composite[i] {
            let mut j = ((p * p - 3) / 2) as usize;
            while j < half {
                composite[j] = true;
                j += p as usize;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity((x as f64 / (x as f64).ln().max(1.0) * 1.2) as usize + 2);
    primes.push(2);
    primes.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 3),
    );
    primes
}

/// Smallest-prime-factor table for fast factorization of every `n ≤ limit`.
#[derive(Debug, Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: u32) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Factorization of `1 ≤ n ≤ limit`.
    pub fn factor(&self, mut n: u64) -> Factorization {
        assert!(n >= 1 && n <= self.limit(), "n outside the table");
        let mut pairs: Vec<(u128, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            pairs.push((p as u128, e));
        }
        Factorization { pairs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_is_prime(n: u128) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_factorizations() {
        assert!(factor(1).unwrap().is_one());
        assert_eq!(factor(12).unwrap().pairs(), &[(2, 2), (3, 1)]);
        assert_eq!(factor(1_000_003).unwrap().pairs(), &[(1_000_003, 1)]);
        assert!(trial_division_is_prime(1_000_003));
        assert!(factor(0).is_err());
    }

    #[test]
    fn large_semiprimes_and_powers() {
        let p = 1_000_000_007u128;
        let q = 998_244_353u128;
        assert_eq!(factor(p * q).unwrap().pairs(), &[(q, 1), (p, 1)]);
        assert_eq!(factor(p * p).unwrap().pairs(), &[(p, 2)]);
        let big = 4_294_967_311u128; // prime just above 2^32
        assert_eq!(factor(big * big * 3).unwrap().pairs(), &[(3, 1), (big, 2)]);
        // above 2^64 the slow multiplication path is used
        let r = 18_446_744_073_709_551_557u128; // largest prime below 2^64
        assert_eq!(factor(r * 1_000_003).unwrap().pairs(), &[(1_000_003, 1), (r, 1)]);
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..5000u128 {
            assert_eq!(is_prime(n), trial_division_is_prime(n), "n = {n}");
        }
        // strong pseudoprime to bases 2, 3, 5, 7
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn elementary_functions() {
        assert_eq!(kappa(12).unwrap(), 6);
        assert_eq!(omega_big(12).unwrap(), 3);
        assert_eq!(omega_small(12).unwrap(), 2);
        assert_eq!(phi(36).unwrap(), 12);
        assert_eq!(p_plus(1).unwrap(), 1);
        assert_eq!(p_minus(1).unwrap(), LeastPrime::Infinity);
        assert_eq!(p_minus(35).unwrap(), LeastPrime::Finite(5));
        assert_eq!(p_plus(35).unwrap(), 7);
    }

    #[test]
    fn exact_divisibility() {
        for b in 1..50 {
            assert!(exactly_divides(1, b));
        }
        assert!(exactly_divides(4, 12));
        assert!(!exactly_divides(2, 12));
        assert!(!exactly_divides(5, 12));
    }

    #[test]
    fn prime_tables() {
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
        let spf = SpfTable::new(10_000);
        for n in 1..=10_000u64 {
            assert_eq!(spf.factor(n), factor(n as u128).unwrap());
        }
    }
}
