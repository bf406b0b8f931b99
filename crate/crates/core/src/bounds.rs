//! Right-hand sides: sifted products, the majorant sum, the discriminant
//! factors Δ_D, Δ̃_D, Δ_{D*}, and the assembled upper bounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use twofloat::TwoFloat;

use crate::arith::{self, primes_up_to};
use crate::error::{Error, Result};
use crate::mfunc::{tensor_product, MultiplicativeFunction};
use crate::polyarith::{discriminant, prime_divisors, FactoredSystem, IntPoly};
use crate::rootcount::{rho_hat_prime_power, rho_prime_power, roots_mod_prime};
use crate::scalar::{Mode, Scalar, Value};

// ---------------------------------------------------------------------------
// parameters

/// `(α, δ, A, B, ε, x, y, c₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub alpha: f64,
    pub delta: f64,
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    pub x: f64,
    pub y: f64,
    pub c0: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            delta: 0.5,
            a: 2.0,
            b: 1.0,
            eps: 1e-3,
            x: 1e4,
            y: 1e2,
            c0: 1.0,
        }
    }
}

/// Outcome of checking the hypotheses of the main bound.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamCheck {
    pub errors: Vec<String>,
    /// Conditions involving the unspecified constant `c₀`.
    pub warnings: Vec<String>,
    /// `ε ≤ αδ/(12g²)`.
    pub weak_regime: bool,
}

impl ParamCheck {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

impl BoundParams {
    /// `ε₁ = 3α/25`, `ε₂ = ε₁/3`, `ε₃ = ε₁/(6g)`.
    pub fn sieve_epsilons(&self, g: usize) -> (f64, f64, f64) {
        let e1 = 3.0 * self.alpha / 25.0;
        (e1, e1 / 3.0, e1 / (6.0 * g as f64))
    }

    pub fn check(&self, system: &FactoredSystem) -> ParamCheck {
        let g = system.g() as f64;
        let mut out = ParamCheck::default();
        let mut err = |cond: bool, msg: String| {
            if !cond {
                out.errors.push(msg);
            }
        };
        err(self.alpha > 0.0 && self.alpha < 1.0, format!("α = {} not in (0,1)", self.alpha));
        err(self.delta > 0.0 && self.delta < 1.0, format!("δ = {} not in (0,1)", self.delta));
        err(self.a >= 1.0, format!("A = {} < 1", self.a));
        err(self.b >= 1.0, format!("B = {} < 1", self.b));
        err(self.eps > 0.0, format!("ε = {} ≤ 0", self.eps));
        err(self.x >= 1.0, format!("x = {} < 1", self.x));
        err(self.y <= self.x, format!("y = {} > x = {}", self.y, self.x));
        // y is used through its integer part
        err(
            self.y >= self.x.powf(self.alpha).floor(),
            format!("y = {} < x^α = {}", self.y, self.x.powf(self.alpha)),
        );
        if self.delta > 0.0 {
            let limit = self.alpha / (50.0 * g * (g + 1.0 / self.delta));
            err(self.eps < limit, format!("ε = {} ≥ α/(50g(g+1/δ)) = {limit:.3e}", self.eps));
        }
        let norm = system.norm().to_f64().unwrap_or(f64::INFINITY);
        if self.x < self.c0 * norm.powf(self.delta) {
            out.warnings.push(format!(
                "x = {} < c₀‖Q‖^δ = {} (c₀ = {})",
                self.x,
                self.c0 * norm.powf(self.delta),
                self.c0
            ));
        }
        out.weak_regime = self.eps <= self.alpha * self.delta / (12.0 * g * g);
        out
    }

    /// [`check`](Self::check), turning errors into [`Error::Validation`].
    pub fn validate(&self, system: &FactoredSystem) -> Result<ParamCheck> {
        let c = self.check(system);
        if c.is_valid() {
            Ok(c)
        } else {
            Err(Error::Validation(c.errors))
        }
    }

    /// `floor(x)`.
    pub fn x_floor(&self) -> u128 {
        self.x.max(0.0).floor() as u128
    }
}

// ---------------------------------------------------------------------------
// per-prime data

/// Roots of each factor `R_h` modulo `p`.
#[derive(Debug, Clone)]
pub struct PrimeEntry {
    pub p: u64,
    pub roots: Vec<Vec<u64>>,
    /// Every root is simple and no two factors share a root, so
    /// `ρ_{R_h}(p^ν) = ρ_{R_h}(p)` and ρ̂ vanishes unless one coordinate is
    /// active.
    pub simple: bool,
}

impl PrimeEntry {
    fn new(system: &FactoredSystem, p: u64) -> Result<Self> {
        let roots = system
            .factors()
            .iter()
            .map(|f| roots_mod_prime(f, p))
            .collect::<Result<Vec<_>>>()?;
        let mut all: Vec<u64> = roots.iter().flatten().copied().collect();
        let total = all.len();
        all.sort_unstable();
        all.dedup();
        let disjoint = all.len() == total;
        let simple = disjoint
            && system.factors().iter().zip(&roots).all(|(f, rs)| {
                let d = f.derivative().reduce_mod(p as u128);
                rs.iter()
                    .all(|&r| crate::polyarith::eval_mod(&d, r as u128, p as u128) != 0)
            });
        Ok(Self { p, roots, simple })
    }

    /// `ρ_Q(p)`: residues mod p where some factor vanishes.
    pub fn rho_q(&self) -> usize {
        let mut all: Vec<u64> = self.roots.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    }
}

/// Root data for every prime up to a limit.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    entries: Vec<PrimeEntry>,
}

impl PrimeTable {
    pub fn new(system: &FactoredSystem, limit: u64) -> Result<Self> {
        let entries = primes_up_to(limit)
            .into_par_iter()
            .map(|p| PrimeEntry::new(system, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { limit, entries })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn entries(&self) -> &[PrimeEntry] {
        &self.entries
    }

    /// Entries with `p ≤ x`; fails if the table is too short.
    pub fn up_to(&self, x: u128) -> Result<&[PrimeEntry]> {
        if x > u128::from(self.limit) {
            return Err(Error::domain(format!(
                "prime table covers p ≤ {}, asked for p ≤ {x}",
                self.limit
            )));
        }
        let n = self.entries.partition_point(|e| u128::from(e.p) <= x);
        Ok(&self.entries[..n])
    }
}

fn table_for(system: &FactoredSystem, table: Option<&PrimeTable>, x: u128) -> Result<PrimeTable> {
    match table {
        Some(t) if u128::from(t.limit) >= x => Ok(t.clone()),
        _ => PrimeTable::new(system, u64::try_from(x).map_err(|_| Error::Overflow("x above 2^64".into()))?),
    }
}

// ---------------------------------------------------------------------------
// sifted product and majorant sums

/// `∏_{g < p ≤ x} (1 − ρ(p)/p)` with `ρ = ρ_Q`.
pub fn sifted_product<S: Scalar>(system: &FactoredSystem, table: &PrimeTable, x: u128) -> Result<S> {
    let g = system.g() as u64;
    let factors: Vec<S> = table
        .up_to(x)?
        .iter()
        .filter(|e| e.p > g)
        .map(|e| S::ratio(u128::from(e.p) - e.rho_q() as u128, u128::from(e.p)))
        .collect();
    Ok(S::product(factors))
}

/// Options `(p^{Σν}, term)` at one prime, sorted by the power.
type LocalOptions<S> = Vec<(u128, S)>;

fn powers_up_to(p: u64, x: u128) -> u32 {
    let mut e = 0;
    let mut v = 1u128;
    while v * u128::from(p) <= x {
        v *= u128::from(p);
        e += 1;
    }
    e
}

/// Exponent tuples `ν⃗ ≠ 0` with `Σν ≤ total`.
fn tuples_with_total(r: usize, total: u32) -> Vec<Vec<u32>> {
    crate::mfunc::exponent_tuples(r, total)
}

/// `p^e`, saturating at `u128::MAX`.
fn spow(p: u64, e: u32) -> u128 {
    u128::from(p).checked_pow(e).unwrap_or(u128::MAX)
}

/// `c / p^e` without overflow.
fn over_power<S: Scalar>(c: u128, p: u64, e: u32) -> S {
    match u128::from(p).checked_pow(e) {
        Some(d) => S::ratio(c, d),
        None => S::from_rational(&BigRational::new(c.into(), BigInt::from(p).pow(e))),
    }
}

/// One nonzero term `F̃(p^ν⃗) ρ̂_R(p^ν⃗) / p^{max ν + 1}` of a local factor.
#[derive(Debug, Clone)]
pub struct LocalTerm<S> {
    pub nus: Vec<u32>,
    pub total: u32,
    pub value: S,
}

/// Nonzero local terms at `p` over `ν⃗ ≠ 0` with `Σν ≤ top`.
pub fn local_terms<S: Scalar>(
    system: &FactoredSystem,
    f: &MultiplicativeFunction,
    e: &PrimeEntry,
    top: u32,
) -> Result<Vec<LocalTerm<S>>> {
    let p = e.p;
    let pp = u128::from(p);
    let r = system.r();
    let mut out = Vec::new();
    if e.simple {
        for (h, roots) in e.roots.iter().enumerate() {
            let c = roots.len() as u128;
            if c == 0 {
                continue;
            }
            let mut nus = vec![0u32; r];
            for nu in 1..=top {
                nus[h] = nu;
                let fv = f.prime_power(pp, &nus);
                if fv.is_zero() {
                    continue;
                }
                let value = S::from_rational(&fv) * over_power::<S>(c * (pp - 1), p, nu + 1);
                out.push(LocalTerm { nus: nus.clone(), total: nu, value });
            }
        }
    } else {
        for nus in tuples_with_total(r, top) {
            let fv = f.prime_power(pp, &nus);
            if fv.is_zero() {
                continue;
            }
            let count = rho_hat_prime_power(system, &nus, p)?;
            if count == 0 {
                continue;
            }
            let m = nus.iter().max().unwrap();
            let total: u32 = nus.iter().sum();
            let value = S::from_rational(&fv) * over_power::<S>(count, p, m + 1);
            out.push(LocalTerm { nus, total, value });
        }
    }
    Ok(out)
}

/// Local terms with `p^{Σν} ≤ x`, keyed by `p^{Σν}` and sorted.
fn majorant_options<S: Scalar>(
    system: &FactoredSystem,
    f: &MultiplicativeFunction,
    e: &PrimeEntry,
    x: u128,
) -> Result<LocalOptions<S>> {
    let mut out: LocalOptions<S> = local_terms(system, f, e, powers_up_to(e.p, x))?
        .into_iter()
        .map(|t| (spow(e.p, t.total), t.value))
        .collect();
    out.sort_by_key(|a| a.0);
    Ok(out)
}

/// `Σ_{P⁺(n_1⋯n_r) ≤ z} F̃ ρ̂_R/[…]` as `∏_{p ≤ z} (1 + Σ′ local terms)`, with
/// the local sums cut at `Σν ≤ max(cut, log_p z)`. The cut never drops a
/// tuple with `n_1⋯n_r ≤ z`.
pub fn smooth_sum<S: Scalar>(
    system: &FactoredSystem,
    ft: &MultiplicativeFunction,
    table: &PrimeTable,
    z: u128,
    cut: u32,
) -> Result<S> {
    check_pushforward_arity(system, ft)?;
    let factors = table
        .up_to(z)?
        .par_iter()
        .map(|e| {
            let top = cut.max(powers_up_to(e.p, z));
            let terms = local_terms::<S>(system, ft, e, top)?;
            Ok(terms
                .into_iter()
                .fold(S::from_u128(1), |acc, t| acc + t.value))
        })
        .collect::<Result<Vec<S>>>()?;
    Ok(S::product(factors))
}

fn dfs<S: Scalar>(opts: &[(u64, LocalOptions<S>)], idx: usize, m: u128) -> S {
    let mut total = S::from_u128(1);
    for i in idx..opts.len() {
        if u128::from(opts[i].0) > m {
            break;
        }
        for (pw, t) in &opts[i].1 {
            if *pw > m {
                break;
            }
            total = total + t.clone() * dfs(opts, i + 1, m / pw);
        }
    }
    total
}

/// Σ over `n⃗` with `∏ n_h ≤ m` of the multiplicative function whose local
/// terms are `opts`; the first prime level runs in parallel, the reduction
/// order is fixed.
fn multiplicative_sum<S: Scalar>(opts: &[(u64, LocalOptions<S>)], m: u128) -> S {
    let parts: Vec<S> = (0..opts.len())
        .into_par_iter()
        .filter(|&i| u128::from(opts[i].0) <= m)
        .map(|i| {
            let mut acc: Option<S> = None;
            for (pw, t) in &opts[i].1 {
                if *pw > m {
                    break;
                }
                let v = t.clone() * dfs(opts, i + 1, m / pw);
                acc = Some(match acc {
                    None => v,
                    Some(a) => a + v,
                });
            }
            acc
        })
        .flatten()
        .collect();
    parts
        .into_iter()
        .fold(S::from_u128(1), |acc, v| acc + v)
}

/// `Σ_{n_1⋯n_r ≤ x} F̃(n⃗) ρ̂_R(n⃗)/[n_1κ(n_1), …, n_rκ(n_r)]`, where `ft` is
/// already the pushforward (arity r).
pub fn majorant_sum<S: Scalar>(
    system: &FactoredSystem,
    ft: &MultiplicativeFunction,
    table: &PrimeTable,
    x: u128,
) -> Result<S> {
    check_pushforward_arity(system, ft)?;
    majorant_sum_restricted(system, ft, table, x, x)
}

/// [`majorant_sum`] restricted to tuples with `P⁺(∏ n_h) ≤ z`.
pub fn majorant_sum_restricted<S: Scalar>(
    system: &FactoredSystem,
    ft: &MultiplicativeFunction,
    table: &PrimeTable,
    x: u128,
    z: u128,
) -> Result<S> {
    check_pushforward_arity(system, ft)?;
    if x == 0 {
        return Ok(S::from_u128(0));
    }
    let opts: Vec<(u64, LocalOptions<S>)> = table
        .up_to(x.min(z))?
        .par_iter()
        .map(|e| Ok((e.p, majorant_options::<S>(system, ft, e, x)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, o)| !o.is_empty())
        .collect();
    Ok(multiplicative_sum(&opts, x))
}

fn check_pushforward_arity(system: &FactoredSystem, ft: &MultiplicativeFunction) -> Result<()> {
    if ft.arity() != system.r() {
        return Err(Error::domain(format!(
            "function has arity {}, the system has r = {} factors (pass the pushforward)",
            ft.arity(),
            system.r()
        )));
    }
    Ok(())
}

fn divides_bigint(p: u64, n: &BigInt) -> bool {
    (n % BigInt::from(p)).is_zero()
}

/// `Σ` over pairwise coprime `n⃗` with `∏ n_h ≤ x` and `(∏ n_h, D*) = 1` of
/// `F̃(n⃗) ∏ ρ_{R_h}(n_h)/n_h`.
pub fn coprime_sum<S: Scalar>(
    system: &FactoredSystem,
    ft: &MultiplicativeFunction,
    table: &PrimeTable,
    x: u128,
) -> Result<S> {
    check_pushforward_arity(system, ft)?;
    if x == 0 {
        return Ok(S::from_u128(0));
    }
    let ds = system.disc_star().clone();
    let r = system.r();
    let opts: Vec<(u64, LocalOptions<S>)> = table
        .up_to(x)?
        .par_iter()
        .filter(|e| !divides_bigint(e.p, &ds))
        .map(|e| {
            let pp = u128::from(e.p);
            let top = powers_up_to(e.p, x);
            let mut out: LocalOptions<S> = Vec::new();
            for (h, f) in system.factors().iter().enumerate() {
                let mut nus = vec![0u32; r];
                for nu in 1..=top {
                    nus[h] = nu;
                    let rho = if e.simple {
                        e.roots[h].len() as u128
                    } else {
                        rho_prime_power(f, e.p, nu)?
                    };
                    let fv = ft.prime_power(pp, &nus);
                    if rho == 0 || fv.is_zero() {
                        continue;
                    }
                    out.push((pp.pow(nu), S::from_rational(&fv) * S::ratio(rho, pp.pow(nu))));
                }
            }
            out.sort_by_key(|a| a.0);
            Ok((e.p, out))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, o)| !o.is_empty())
        .collect();
    Ok(multiplicative_sum(&opts, x))
}

/// `∏_{p ≤ x, p ∤ D*} ∏_h (1 + G̃^{(h)}(p) ρ_{R_h}(p)/p)`.
pub fn coprime_euler_product<S: Scalar>(
    system: &FactoredSystem,
    gt: &MultiplicativeFunction,
    table: &PrimeTable,
    x: u128,
) -> Result<S> {
    check_pushforward_arity(system, gt)?;
    let ds = system.disc_star().clone();
    let r = system.r();
    let mut factors = Vec::new();
    for e in table.up_to(x)? {
        if divides_bigint(e.p, &ds) {
            continue;
        }
        let pp = u128::from(e.p);
        for h in 0..r {
            let c = e.roots[h].len() as u128;
            if c == 0 {
                continue;
            }
            let mut nus = vec![0u32; r];
            nus[h] = 1;
            let gv = S::from_rational(&gt.prime_power(pp, &nus));
            factors.push(S::from_u128(1) + gv * S::ratio(c, pp));
        }
    }
    Ok(S::product(factors))
}

// ---------------------------------------------------------------------------
// discriminant factors

/// `∏_{p | D} (1 + Σ′_{ν_j ≤ c_j} F(p^ν⃗) ρ̂(p^ν⃗)/p^{max ν + 1})` where ρ̂ is
/// taken for `counts` and the primed sum skips `ν⃗ = 0`.
fn delta_product(
    counts: &FactoredSystem,
    f: &MultiplicativeFunction,
    primes: &[u64],
    caps: &[u32],
) -> Result<BigRational> {
    let mut acc = BigRational::one();
    for &p in primes {
        let mut local = BigRational::one();
        for nus in bounded_tuples(caps) {
            let fv = f.prime_power(u128::from(p), &nus);
            if fv.is_zero() {
                continue;
            }
            let c = rho_hat_prime_power(counts, &nus, p)?;
            let m = nus.iter().max().unwrap();
            local += fv * BigRational::new(c.into(), (p as u128).pow(m + 1).into());
        }
        acc *= local;
    }
    Ok(acc)
}

/// Nonzero tuples with `ν_j ≤ caps[j]`.
fn bounded_tuples(caps: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &c in caps {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..=c).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out.retain(|t| t.iter().any(|&v| v > 0));
    out
}

/// `Δ_{D*}` for `G̃` of arity r.
pub fn delta_dstar(system: &FactoredSystem, gt: &MultiplicativeFunction) -> Result<BigRational> {
    check_pushforward_arity(system, gt)?;
    let primes = prime_divisors(system.disc_star())?;
    let caps: Vec<u32> = system.factors().iter().map(|f| f.deg() as u32).collect();
    delta_product(system, gt, &primes, &caps)
}

/// `C = g · max_{p | D*} Σ′_{ν_h ≤ deg R_h} G̃(p^ν⃗)`, the exponent in
/// `Δ_{D*} ≤ ∏_{p | D*} (1 + 1/p)^C`.
pub fn delta_dstar_exponent(system: &FactoredSystem, gt: &MultiplicativeFunction) -> Result<BigRational> {
    let primes = prime_divisors(system.disc_star())?;
    let caps: Vec<u32> = system.factors().iter().map(|f| f.deg() as u32).collect();
    let tuples = bounded_tuples(&caps);
    let mut best = BigRational::zero();
    for p in primes {
        let s: BigRational = tuples.iter().map(|t| gt.prime_power(u128::from(p), t)).sum();
        if s > best {
            best = s;
        }
    }
    Ok(best * BigRational::from_integer(BigInt::from(system.g())))
}

/// `∏_{p | D*} (1 + 1/p)^C`, in floating point.
pub fn delta_dstar_ceiling(system: &FactoredSystem, gt: &MultiplicativeFunction) -> Result<f64> {
    let c = delta_dstar_exponent(system, gt)?.to_f64().unwrap_or(f64::INFINITY);
    Ok(prime_divisors(system.disc_star())?
        .iter()
        .map(|&p| (1.0 + 1.0 / p as f64).powf(c))
        .product())
}

/// `(Δ_D, Δ̃_D)` for one polynomial `Q` with `D = Disc(Q) ≠ 0`.
pub fn delta_d_k1(q: &IntPoly, f: &MultiplicativeFunction) -> Result<(BigRational, BigRational)> {
    if f.arity() != 1 {
        return Err(Error::domain("Δ_D for k = 1 needs a unary function"));
    }
    let d = discriminant(q)?;
    if d.is_zero() {
        return Err(Error::domain("D = 0; use Δ_{D*} instead"));
    }
    let g = q.deg() as u32;
    let mut delta = BigRational::one();
    let mut tilde = BigRational::one();
    for p in prime_divisors(&d)? {
        let pp = BigInt::from(p);
        let rhos = (0..=g + 1)
            .map(|nu| rho_prime_power(q, p, nu))
            .collect::<Result<Vec<_>>>()?;
        let dens = |nu: u32| BigRational::new(BigInt::from(rhos[nu as usize]), pp.pow(nu));
        let mut a = BigRational::one();
        let mut b = BigRational::one();
        for nu in 1..=g {
            let fv = f.prime_power(u128::from(p), &[nu]);
            a += &fv * (dens(nu) - dens(nu + 1));
            b += fv * dens(nu);
        }
        delta *= a;
        tilde *= b;
    }
    Ok((delta, tilde))
}

/// Δ_D for the tuple `(Q_1, …, Q_k)` with `D = Disc(Q) ≠ 0`, `ν_j ≤ deg Q_j`,
/// counting `p^{ν_j} ‖ Q_j(n)`.
pub fn delta_d_general(system: &FactoredSystem, f: &MultiplicativeFunction) -> Result<BigRational> {
    if f.arity() != system.k() {
        return Err(Error::domain(format!(
            "function has arity {}, the system has k = {}",
            f.arity(),
            system.k()
        )));
    }
    if system.disc().is_zero() {
        return Err(Error::domain("D = 0; use Δ_{D*} instead"));
    }
    let parts = FactoredSystem::coprime(system.q_parts().to_vec())?;
    let primes = prime_divisors(system.disc())?;
    let caps: Vec<u32> = system.q_parts().iter().map(|q| q.deg() as u32).collect();
    delta_product(&parts, f, &primes, &caps)
}

// ---------------------------------------------------------------------------
// assembled right-hand sides

fn ln(x: f64) -> TwoFloat {
    TwoFloat::from(x).ln()
}

fn dispatch<E, F>(mode: Mode, exact: E, float: F) -> Result<Value>
where
    E: FnOnce() -> Result<BigRational>,
    F: FnOnce() -> Result<TwoFloat>,
{
    match mode {
        Mode::Exact => exact().map(Value::Exact),
        Mode::Float => float().map(Value::Float),
    }
}

fn y_value<S: Scalar>(y: f64) -> S {
    S::from_u128(y.max(0.0).floor() as u128)
}

/// `y · ∏_{g<p≤x}(1 − ρ(p)/p) · Σ F̃ ρ̂/[…]`.
pub fn rhs_main(
    system: &FactoredSystem,
    f: &MultiplicativeFunction,
    params: &BoundParams,
    table: Option<&PrimeTable>,
    mode: Mode,
) -> Result<Value> {
    params.validate(system)?;
    let ft = f.pushforward(system.exponents())?;
    let x = params.x_floor();
    let t = table_for(system, table, x)?;
    fn go<S: Scalar>(s: &FactoredSystem, ft: &MultiplicativeFunction, p: &BoundParams, t: &PrimeTable, x: u128) -> Result<S> {
        Ok(y_value::<S>(p.y) * sifted_product::<S>(s, t, x)? * majorant_sum::<S>(s, ft, t, x)?)
    }
    dispatch(mode, || go(system, &ft, params, &t, x), || go(system, &ft, params, &t, x))
}

/// Form with the coprime sum: `Δ_{D*} · y · sifted · Σ_coprime`.
pub fn rhs_cor_disc(
    system: &FactoredSystem,
    f: &MultiplicativeFunction,
    params: &BoundParams,
    table: Option<&PrimeTable>,
    mode: Mode,
) -> Result<Value> {
    params.validate(system)?;
    let ft = f.pushforward(system.exponents())?;
    let gt = ft.minimal_g()?;
    let delta = delta_dstar(system, &gt)?;
    let x = params.x_floor();
    let t = table_for(system, table, x)?;
    fn go<S: Scalar>(s: &FactoredSystem, ft: &MultiplicativeFunction, d: &BigRational, p: &BoundParams, t: &PrimeTable, x: u128) -> Result<S> {
        Ok(S::from_rational(d)
            * y_value::<S>(p.y)
            * sifted_product::<S>(s, t, x)?
            * coprime_sum::<S>(s, ft, t, x)?)
    }
    dispatch(
        mode,
        || go(system, &ft, &delta, params, &t, x),
        || go(system, &ft, &delta, params, &t, x),
    )
}

/// Form with an Euler product:
/// `Δ_{D*} · y · sifted · ∏_{p≤x, p∤D*} ∏_h (1 + G̃^{(h)}(p) ρ_{R_h}(p)/p)`.
pub fn rhs_cor_mult(
    system: &FactoredSystem,
    f: &MultiplicativeFunction,
    params: &BoundParams,
    table: Option<&PrimeTable>,
    mode: Mode,
) -> Result<Value> {
    params.validate(system)?;
    let gt = f.pushforward(system.exponents())?.minimal_g()?;
    let delta = delta_dstar(system, &gt)?;
    let x = params.x_floor();
    let t = table_for(system, table, x)?;
    fn go<S: Scalar>(s: &FactoredSystem, gt: &MultiplicativeFunction, d: &BigRational, p: &BoundParams, t: &PrimeTable, x: u128) -> Result<S> {
        Ok(S::from_rational(d)
            * y_value::<S>(p.y)
            * sifted_product::<S>(s, t, x)?
            * coprime_euler_product::<S>(s, gt, t, x)?)
    }
    dispatch(
        mode,
        || go(system, &gt, &delta, params, &t, x),
        || go(system, &gt, &delta, params, &t, x),
    )
}

/// Shiu form for one squarefree `Q`:
/// `Δ_D · y · ∏_{g<p≤x}(1 − ρ(p)/p) · exp(Σ_{p≤x, p∤D} f(p)/p)`.
pub fn rhs_shiu(
    system: &FactoredSystem,
    f: &MultiplicativeFunction,
    params: &BoundParams,
    table: Option<&PrimeTable>,
    mode: Mode,
) -> Result<Value> {
    if system.k() != 1 || system.r() != 1 || system.exponents()[0][0] != 1 {
        return Err(Error::Validation(vec![
            "the Shiu form needs a single squarefree polynomial (k = r = 1, γ = 1)".into(),
        ]));
    }
    params.validate(system)?;
    let q = system.q();
    let (delta, _) = delta_d_k1(q, f)?;
    let x = params.x_floor();
    let t = table_for(system, table, x)?;
    let d = system.disc().clone();
    fn go<S: Scalar>(s: &FactoredSystem, f: &MultiplicativeFunction, delta: &BigRational, d: &BigInt, p: &BoundParams, t: &PrimeTable, x: u128) -> Result<TwoFloat> {
        let mut sum = S::from_u128(0);
        for e in t.up_to(x)? {
            if divides_bigint(e.p, d) {
                continue;
            }
            let pp = u128::from(e.p);
            sum = sum + S::from_rational(&f.prime_power(pp, &[1])) * S::ratio(1, pp);
        }
        let head = S::from_rational(delta) * y_value::<S>(p.y) * sifted_product::<S>(s, t, x)?;
        Ok(head.to_twofloat() * sum.to_twofloat().exp())
    }
    let v = match mode {
        Mode::Exact => go::<BigRational>(system, f, &delta, &d, params, &t, x)?,
        Mode::Float => go::<TwoFloat>(system, f, &delta, &d, params, &t, x)?,
    };
    Ok(Value::Float(v))
}

/// `Δ(ℓ)`: Δ_D for `(X, X+ℓ)` and `F = λ_1 ⊗ λ_2`.
pub fn delta_shift(ell: i64, lambda1: &MultiplicativeFunction, lambda2: &MultiplicativeFunction) -> Result<BigRational> {
    if ell == 0 {
        return Err(Error::Validation(vec!["ℓ = 0 gives a repeated factor".into()]));
    }
    let system = FactoredSystem::shifted_pair(ell)?;
    delta_d_general(&system, &tensor_product(&[lambda1.clone(), lambda2.clone()])?)
}

/// `∏_{p ≤ x} (1 + λ_1(p)/p)(1 + λ_2(p)/p)` for non-negative λ_i.
pub fn shift_euler_product<S: Scalar>(
    lambda1: &MultiplicativeFunction,
    lambda2: &MultiplicativeFunction,
    x: u128,
) -> S {
    let one = S::from_u128(1);
    let factors: Vec<S> = primes_up_to(x as u64)
        .into_iter()
        .flat_map(|p| {
            let pp = u128::from(p);
            [lambda1, lambda2].map(|l| {
                one.clone() + S::from_rational(&l.prime_power(pp, &[1])) * S::ratio(1, pp)
            })
        })
        .collect();
    S::product(factors)
}

/// Holowinsky form: `Δ(ℓ) · x (log x)^{−2} ∏_{p≤x}(1 + |λ_1(p)|/p)(1 + |λ_2(p)|/p)`.
pub fn rhs_holowinsky(
    ell: i64,
    lambda1: &MultiplicativeFunction,
    lambda2: &MultiplicativeFunction,
    x: f64,
    mode: Mode,
) -> Result<Value> {
    if x < 3.0 {
        return Err(Error::Validation(vec![format!("x = {x} too small for (log x)^{{-2}}")]));
    }
    let delta = delta_shift(ell, lambda1, lambda2)?;
    let xf = x.floor() as u128;
    let euler = match mode {
        Mode::Exact => shift_euler_product::<BigRational>(lambda1, lambda2, xf).to_twofloat(),
        Mode::Float => shift_euler_product::<TwoFloat>(lambda1, lambda2, xf),
    };
    Ok(Value::Float(holowinsky_assemble(&delta, x, euler)))
}

/// `Δ · x (log x)^{−2} · euler`, for callers that cache the Euler product.
pub fn holowinsky_assemble(delta: &BigRational, x: f64, euler: TwoFloat) -> TwoFloat {
    let l = ln(x);
    crate::scalar::div(crate::scalar::rational_to_twofloat(delta) * TwoFloat::from(x), l * l) * euler
}

/// Prime form: `|Q(0)|/φ(|Q(0)|) · Δ_{D*} · y/log x · sifted · Σ F̃ ρ̂/[…]`.
pub fn rhs_primes(
    system: &FactoredSystem,
    f: &MultiplicativeFunction,
    params: &BoundParams,
    table: Option<&PrimeTable>,
    mode: Mode,
) -> Result<Value> {
    let q0 = system.q().evaluate_i64(0).abs();
    if q0.is_zero() {
        return Err(Error::Validation(vec!["Q(0) = 0; the prime form needs Q(0) ≠ 0".into()]));
    }
    params.validate(system)?;
    let q0u = q0
        .to_u128()
        .ok_or_else(|| Error::Overflow("Q(0) above 2^128".into()))?;
    let phi = arith::phi(q0u)?;
    let ft = f.pushforward(system.exponents())?;
    let gt = ft.minimal_g()?;
    let delta = delta_dstar(system, &gt)?;
    let x = params.x_floor();
    let t = table_for(system, table, x)?;
    // |Q(0)|/φ(|Q(0)|) · Δ_{D*}
    let pre = BigRational::new(q0u.into(), phi.into()) * delta;
    fn go<S: Scalar>(s: &FactoredSystem, ft: &MultiplicativeFunction, pre: &BigRational, p: &BoundParams, t: &PrimeTable, x: u128) -> Result<TwoFloat> {
        let head = S::from_rational(pre) * y_value::<S>(p.y) * sifted_product::<S>(s, t, x)? * majorant_sum::<S>(s, ft, t, x)?;
        Ok(crate::scalar::div(head.to_twofloat(), ln(p.x)))
    }
    let v = match mode {
        Mode::Exact => go::<BigRational>(system, &ft, &pre, params, &t, x)?,
        Mode::Float => go::<TwoFloat>(system, &ft, &pre, params, &t, x)?,
    };
    Ok(Value::Float(v))
}

/// `gcd`-free check that `n` is coprime to every prime dividing `d`.
pub fn coprime_to(n: u128, d: &BigInt) -> bool {
    let g = BigInt::from(n).gcd(d);
    g.is_one() || (g.is_zero() && n == 1)
}
