//! Direct evaluation of the left-hand sides: sums of `F(|Q_1(n)|, …)` over
//! short intervals, the same sums over primes, and the sifted count.
//!
//! Values are factored by sieving with the roots of each `R_h` modulo small
//! primes; exponents of `Q_j(n)` follow from the exponent matrix.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{self, primes_up_to, Factorization};
use crate::error::{Error, Result};
use crate::mfunc::{MultiplicativeFunction, PrimePowerCache};
use crate::polyarith::FactoredSystem;
use crate::rootcount::{rho_hat, rho_hat_modulus_of, roots_mod_prime};

const CHUNK: u64 = 1 << 14;

/// One integer `n` with the factorizations of `|R_h(n)|` and `|Q_j(n)|`.
/// A zero value is stored as the empty factorization and flagged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub n: u64,
    pub r: Vec<Factorization>,
    pub q: Vec<Factorization>,
    /// Indices j with `Q_j(n) = 0`.
    pub zeros: Vec<usize>,
    r_zero: Vec<bool>,
}

impl Row {
    pub fn has_zero(&self) -> bool {
        !self.zeros.is_empty()
    }

    pub fn r_is_zero(&self, h: usize) -> bool {
        self.r_zero[h]
    }
}

/// Factorizations of the values on `(x, x+y]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalTable {
    pub rows: Vec<Row>,
}

impl IntervalTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// First `n` whose value vanishes, if any.
    pub fn first_zero(&self) -> Option<u64> {
        self.rows.iter().find(|r| r.has_zero()).map(|r| r.n)
    }
}

/// Integers in `(x, x+y]`, as an inclusive range.
pub fn interval_bounds(x: f64, y: f64) -> Result<(u64, u64)> {
    if !(x >= 0.0 && y >= 0.0 && (x + y) < 1.8e19) {
        return Err(Error::domain(format!("need 0 ≤ x, 0 ≤ y and x+y < 2^64; got x = {x}, y = {y}")));
    }
    Ok((x.floor() as u64 + 1, (x + y).floor() as u64))
}

/// Default sieve bound `max(10^4, ⌈(x+y)^{1/3}⌉)`.
pub fn default_sieve_bound(x: f64, y: f64) -> u64 {
    ((x + y).cbrt().ceil() as u64).max(10_000)
}

fn value_u128(v: &BigInt) -> Result<u128> {
    v.abs()
        .to_u128()
        .ok_or_else(|| Error::Overflow(format!("polynomial value {v} exceeds 2^128")))
}

/// `P(n)` in i128, `None` on overflow.
fn horner_i128(coeffs: &[i128], n: u64) -> Option<i128> {
    let n = i128::from(n);
    coeffs
        .iter()
        .rev()
        .try_fold(0i128, |acc, &c| acc.checked_mul(n)?.checked_add(c))
}

/// Roots of every factor modulo every prime up to `z`.
struct SieveData {
    primes: Vec<(u64, Vec<Vec<u64>>)>,
    z: u64,
}

impl SieveData {
    fn new(system: &FactoredSystem, z: u64) -> Result<Self> {
        let primes = primes_up_to(z)
            .into_par_iter()
            .map(|p| {
                let roots = system
                    .factors()
                    .iter()
                    .map(|f| roots_mod_prime(f, p))
                    .collect::<Result<Vec<_>>>()?;
                Ok((p, roots))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { primes, z })
    }
}

fn sieve_chunk(system: &FactoredSystem, data: &SieveData, lo: u64, hi: u64) -> Result<Vec<Row>> {
    let len = (hi - lo + 1) as usize;
    let r = system.r();
    // residual[h][i] is |R_h(lo+i)| with sieved primes divided out
    let mut residual: Vec<Vec<u128>> = Vec::with_capacity(r);
    let mut pairs: Vec<Vec<Vec<(u128, u32)>>> = vec![vec![Vec::new(); len]; r];
    for f in system.factors() {
        let small = f.small_coeffs();
        let vals = (lo..=hi)
            .map(|n| match small.as_deref().and_then(|c| horner_i128(c, n)) {
                Some(v) => Ok(v.unsigned_abs()),
                None => value_u128(&f.evaluate(&BigInt::from(n))),
            })
            .collect::<Result<Vec<_>>>()?;
        residual.push(vals);
    }
    for (p, roots) in &data.primes {
        let pp = u128::from(*p);
        for h in 0..r {
            for &root in &roots[h] {
                // first n ≥ lo with n ≡ root (mod p)
                let off = (root + p - lo % p) % p;
                let mut i = off as usize;
                while i < len {
                    let v = &mut residual[h][i];
                    if *v != 0 {
                        let mut e = 0;
                        while (*v).is_multiple_of(pp) {
                            *v /= pp;
                            e += 1;
                        }
                        pairs[h][i].push((pp, e));
                    }
                    i += *p as usize;
                }
            }
        }
    }
    let z2 = u128::from(data.z) * u128::from(data.z);
    let mut rows = Vec::with_capacity(len);
    for i in 0..len {
        let n = lo + i as u64;
        let mut rf = Vec::with_capacity(r);
        let mut r_zero = Vec::with_capacity(r);
        for h in 0..r {
            let rest = residual[h][i];
            let mut ps = std::mem::take(&mut pairs[h][i]);
            if rest == 0 {
                r_zero.push(true);
                rf.push(Factorization::one());
                continue;
            }
            r_zero.push(false);
            if rest > 1 {
                if rest < z2 {
                    ps.push((rest, 1));
                } else {
                    ps.extend(arith::factor(rest)?.iter());
                }
            }
            ps.sort_unstable();
            rf.push(Factorization::from_sorted_unchecked(ps));
        }
        rows.push(assemble_row(system, n, rf, r_zero));
    }
    Ok(rows)
}

/// `v_p(Q_j(n)) = Σ_h γ_{jh} v_p(R_h(n))`.
fn assemble_row(system: &FactoredSystem, n: u64, rf: Vec<Factorization>, r_zero: Vec<bool>) -> Row {
    let mut q = Vec::with_capacity(system.k());
    let mut zeros = Vec::new();
    for (j, row) in system.exponents().iter().enumerate() {
        if row.iter().zip(&r_zero).any(|(&e, &z)| e > 0 && z) {
            zeros.push(j);
            q.push(Factorization::one());
            continue;
        }
        let mut acc: Vec<(u128, u32)> = Vec::new();
        for (h, &e) in row.iter().enumerate() {
            if e == 0 {
                continue;
            }
            for (p, v) in rf[h].iter() {
                acc.push((p, v * e));
            }
        }
        acc.sort_unstable();
        let mut merged: Vec<(u128, u32)> = Vec::with_capacity(acc.len());
        for (p, v) in acc {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += v,
                _ => merged.push((p, v)),
            }
        }
        q.push(Factorization::from_sorted_unchecked(merged));
    }
    Row { n, r: rf, q, zeros, r_zero }
}

/// Factorization table for `(x, x+y]` with sieve bound `z` (default
/// [`default_sieve_bound`]). Cofactors left after sieving are factored
/// individually, so the table is exact for any `z ≥ 2`.
pub fn factor_values_in_interval(
    system: &FactoredSystem,
    x: f64,
    y: f64,
    z: Option<u64>,
) -> Result<IntervalTable> {
    let (lo, hi) = interval_bounds(x, y)?;
    let z = z.unwrap_or_else(|| default_sieve_bound(x, y)).max(2);
    if hi < lo {
        return Ok(IntervalTable { rows: Vec::new() });
    }
    let data = SieveData::new(system, z)?;
    let starts: Vec<u64> = (lo..=hi).step_by(CHUNK as usize).collect();
    let chunks = starts
        .into_par_iter()
        .map(|s| sieve_chunk(system, &data, s, (s + CHUNK - 1).min(hi)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalTable {
        rows: chunks.into_iter().flatten().collect(),
    })
}

/// Reference table: every value factored on its own.
pub fn naive_table(system: &FactoredSystem, x: f64, y: f64) -> Result<IntervalTable> {
    let (lo, hi) = interval_bounds(x, y)?;
    let mut rows = Vec::new();
    for n in lo..=hi {
        let mut rf = Vec::new();
        let mut r_zero = Vec::new();
        for f in system.factors() {
            let v = value_u128(&f.evaluate(&BigInt::from(n)))?;
            r_zero.push(v == 0);
            rf.push(if v == 0 { Factorization::one() } else { arith::factor(v)? });
        }
        rows.push(assemble_row(system, n, rf, r_zero));
    }
    Ok(IntervalTable { rows })
}

fn reject_zeros(table: &IntervalTable) -> Result<()> {
    match table.first_zero() {
        Some(n) => Err(Error::domain(format!(
            "Q_j({n}) = 0 inside the interval; F(0) is undefined"
        ))),
        None => Ok(()),
    }
}

fn sum_rows<'a>(
    rows: impl ParallelIterator<Item = &'a Row>,
    value: impl Fn(&Row, &mut PrimePowerCache) -> BigRational + Sync + Send,
) -> BigRational {
    // exact addition, so the reduction order does not matter; integer
    // values, the common case, skip the rational normalisation
    let (ints, fracs) = rows
        .fold(
            || (BigInt::zero(), BigRational::zero(), PrimePowerCache::default()),
            |(mut i, mut q, mut cache), r| {
                let v = value(r, &mut cache);
                if v.is_integer() {
                    i += v.to_integer();
                } else {
                    q += v;
                }
                (i, q, cache)
            },
        )
        .map(|(i, q, _)| (i, q))
        .reduce(|| (BigInt::zero(), BigRational::zero()), |a, b| (a.0 + b.0, a.1 + b.1));
    fracs + BigRational::from_integer(ints)
}

/// `Σ_{x<n≤x+y} F(|Q_1(n)|, …, |Q_k(n)|)`.
pub fn short_sum(system: &FactoredSystem, f: &MultiplicativeFunction, x: f64, y: f64) -> Result<BigRational> {
    let table = factor_values_in_interval(system, x, y, None)?;
    short_sum_on(system, f, &table)
}

/// [`short_sum`] on a precomputed table.
pub fn short_sum_on(system: &FactoredSystem, f: &MultiplicativeFunction, table: &IntervalTable) -> Result<BigRational> {
    check_arity(f, system.k())?;
    reject_zeros(table)?;
    Ok(sum_rows(table.rows.par_iter(), |r, c| f.eval_factored_cached(&r.q, c)))
}

/// `Σ_{x<n≤x+y} F̃(|R_1(n)|, …, |R_r(n)|)` for the pushforward `F̃`.
pub fn short_sum_pushforward_on(
    system: &FactoredSystem,
    ft: &MultiplicativeFunction,
    table: &IntervalTable,
) -> Result<BigRational> {
    check_arity(ft, system.r())?;
    reject_zeros(table)?;
    Ok(sum_rows(table.rows.par_iter(), |r, c| ft.eval_factored_cached(&r.r, c)))
}

/// `Σ_{x<p≤x+y} F(|Q_1(p)|, …)` over primes `p`; needs `Q(0) ≠ 0`.
pub fn prime_sum(system: &FactoredSystem, f: &MultiplicativeFunction, x: f64, y: f64) -> Result<BigRational> {
    if system.q().evaluate_i64(0).is_zero() {
        return Err(Error::Validation(vec!["Q(0) = 0; the prime sum needs Q(0) ≠ 0".into()]));
    }
    check_arity(f, system.k())?;
    let table = factor_values_in_interval(system, x, y, None)?;
    let primes: Vec<&Row> = table
        .rows
        .iter()
        .filter(|r| arith::is_prime(u128::from(r.n)))
        .collect();
    if let Some(r) = primes.iter().find(|r| r.has_zero()) {
        return Err(Error::domain(format!("Q_j({}) = 0 at a prime of the interval", r.n)));
    }
    Ok(sum_rows(primes.into_par_iter(), |r, c| f.eval_factored_cached(&r.q, c)))
}

fn check_arity(f: &MultiplicativeFunction, want: usize) -> Result<()> {
    if f.arity() != want {
        return Err(Error::domain(format!(
            "{} has arity {}, expected {want}",
            f.name(),
            f.arity()
        )));
    }
    Ok(())
}

/// `#{x < n ≤ x+y : a_h ‖ R_h(n) ∀h, p | Q(n) ⇒ p | a_1⋯a_r or p ∈ Ξ or p > z}`.
pub fn sieve_count(
    system: &FactoredSystem,
    a: &[u128],
    z: u64,
    x: f64,
    y: f64,
    xi: &[u64],
) -> Result<u64> {
    let table = factor_values_in_interval(system, x, y, None)?;
    sieve_count_on(system, a, z, xi, &table)
}

/// [`sieve_count`] on a precomputed table.
pub fn sieve_count_on(
    system: &FactoredSystem,
    a: &[u128],
    z: u64,
    xi: &[u64],
    table: &IntervalTable,
) -> Result<u64> {
    if a.len() != system.r() || a.contains(&0) {
        return Err(Error::domain(format!("need r = {} positive a_h", system.r())));
    }
    let af = a.iter().map(|&v| arith::factor(v)).collect::<Result<Vec<_>>>()?;
    let mut allowed: Vec<u128> = af.iter().flat_map(|f| f.iter().map(|(p, _)| p)).collect();
    allowed.extend(xi.iter().map(|&p| u128::from(p)));
    allowed.sort_unstable();
    allowed.dedup();
    let z = u128::from(z);
    let ok_prime = |p: u128| p > z || allowed.binary_search(&p).is_ok();
    // Q(n) = 0 is divisible by every prime
    let zero_ok = primes_up_to(z.min(u128::from(u64::MAX)) as u64)
        .into_iter()
        .all(|p| ok_prime(u128::from(p)));
    let count = table
        .rows
        .par_iter()
        .filter(|row| {
            (0..system.r()).all(|h| {
                if row.r_is_zero(h) {
                    a[h] == 1
                } else {
                    af[h].iter().all(|(p, e)| row.r[h].exponent_of(p) == e)
                }
            }) && (0..system.r()).all(|h| {
                if row.r_is_zero(h) {
                    zero_ok
                } else {
                    row.r[h].iter().all(|(p, _)| ok_prime(p))
                }
            })
        })
        .count();
    Ok(count as u64)
}

/// `y · ρ̂_R(a)/[a_1κ(a_1), …] · ∏_{g<p≤z, p∤a_1⋯a_r} (1 − ρ(p)/p)` with
/// `y` taken through its integer part.
pub fn sieve_rhs(system: &FactoredSystem, a: &[u128], z: u64, y: f64) -> Result<BigRational> {
    if a.len() != system.r() || a.contains(&0) {
        return Err(Error::domain(format!("need r = {} positive a_h", system.r())));
    }
    let count = rho_hat(system, a)?;
    let modulus = rho_hat_modulus_of(a)?;
    let a_primes: Vec<u128> = a
        .iter()
        .map(|&v| arith::factor(v))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .flat_map(|f| f.iter().map(|(p, _)| p).collect::<Vec<_>>())
        .collect();
    let g = system.g() as u64;
    let mut prod = BigRational::from_integer(BigInt::from(y.max(0.0).floor() as u128))
        * BigRational::new(count.into(), modulus.into());
    for p in primes_up_to(z) {
        if p <= g || a_primes.contains(&u128::from(p)) {
            continue;
        }
        let mut roots: Vec<u64> = system
            .factors()
            .iter()
            .map(|f| roots_mod_prime(f, p))
            .collect::<Result<Vec<_>>>()?
            .concat();
        roots.sort_unstable();
        roots.dedup();
        prod *= BigRational::new(BigInt::from(p - roots.len() as u64), BigInt::from(p));
    }
    Ok(prod)
}
