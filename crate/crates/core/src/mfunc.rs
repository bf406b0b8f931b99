//! Non-negative multiplicative functions of k variables, given by their
//! values at prime powers, with a growth budget `(A, B, ε)`:
//! `F(p^{ν_1}, …, p^{ν_k}) ≤ min(A^{Σν}, B p^{εΣν})`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{self, Factorization};
use crate::error::{Error, Result};

/// `(p, ν⃗) ↦ F(p^{ν_1}, …, p^{ν_k})`.
pub type PrimePowerFn = Arc<dyn Fn(u128, &[u32]) -> BigRational + Send + Sync>;

/// Class parameters: `A ≥ 1`, `B ≥ 1`, `ε > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
}

impl Budget {
    pub fn new(a: f64, b: f64, eps: f64) -> Result<Self> {
        if !(a >= 1.0 && b >= 1.0 && eps > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::domain(format!(
                "budget needs A ≥ 1, B ≥ 1, ε > 0; got A = {a}, B = {b}, ε = {eps}"
            )));
        }
        Ok(Self { a, b, eps })
    }

    /// `min(A^s, B p^{εs})`.
    pub fn cap(&self, p: u128, s: u32) -> f64 {
        let s = f64::from(s);
        self.a
            .powf(s)
            .min(self.b * (p as f64).powf(self.eps * s))
    }
}

#[derive(Clone)]
pub struct MultiplicativeFunction {
    name: String,
    arity: usize,
    eval: PrimePowerFn,
    budget: Budget,
    eta: Option<f64>,
}

impl fmt::Debug for MultiplicativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeFunction")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("budget", &self.budget)
            .field("eta", &self.eta)
            .finish()
    }
}

impl MultiplicativeFunction {
    /// Wraps a prime-power evaluator. The value at the all-zero exponent
    /// tuple is forced to 1 whatever the evaluator says.
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        eval: impl Fn(u128, &[u32]) -> BigRational + Send + Sync + 'static,
        budget: Budget,
    ) -> Result<Self> {
        if arity == 0 {
            return Err(Error::domain("arity must be at least 1"));
        }
        Ok(Self {
            name: name.into(),
            arity,
            eval: Arc::new(eval),
            budget,
            eta: None,
        })
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = Some(eta);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn eta(&self) -> Option<f64> {
        self.eta
    }

    /// `F(p^{ν_1}, …, p^{ν_k})`.
    pub fn prime_power(&self, p: u128, nus: &[u32]) -> BigRational {
        debug_assert_eq!(nus.len(), self.arity);
        if nus.iter().all(|&v| v == 0) {
            return BigRational::one();
        }
        (self.eval)(p, nus)
    }

    /// `F(n_1, …, n_k)`.
    pub fn eval(&self, args: &[u128]) -> Result<BigRational> {
        self.check_arity(args.len())?;
        if args.contains(&0) {
            return Err(Error::domain("F is defined on positive integers"));
        }
        let fs = args
            .iter()
            .map(|&n| arith::factor(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.eval_factored(&fs))
    }

    /// `F` at arguments given by their factorizations.
    pub fn eval_factored(&self, args: &[Factorization]) -> BigRational {
        self.eval_factored_cached(args, &mut PrimePowerCache::default())
    }

    /// [`eval_factored`](Self::eval_factored), reusing prime-power values
    /// across calls.
    pub fn eval_factored_cached(&self, args: &[Factorization], cache: &mut PrimePowerCache) -> BigRational {
        let mut by_prime: Vec<(u128, usize, u32)> = args
            .iter()
            .enumerate()
            .flat_map(|(j, f)| f.iter().map(move |(p, e)| (p, j, e)))
            .collect();
        by_prime.sort_unstable();
        let mut num = BigInt::one();
        let mut frac = BigRational::one();
        let mut nus = vec![0u32; self.arity];
        let mut i = 0;
        while i < by_prime.len() {
            let p = by_prime[i].0;
            nus.iter_mut().for_each(|v| *v = 0);
            while i < by_prime.len() && by_prime[i].0 == p {
                nus[by_prime[i].1] = by_prime[i].2;
                i += 1;
            }
            let v = match cache.0.get(&(p, nus.clone())) {
                Some(v) => v.clone(),
                None => {
                    let v = self.prime_power(p, &nus);
                    cache.0.insert((p, nus.clone()), v.clone());
                    v
                }
            };
            if v.is_zero() {
                return v;
            }
            if v.is_integer() {
                num *= v.to_integer();
            } else {
                frac *= v;
            }
        }
        frac * BigRational::from_integer(num)
    }

    fn check_arity(&self, got: usize) -> Result<()> {
        if got != self.arity {
            return Err(Error::domain(format!(
                "{} takes {} arguments, got {got}",
                self.name, self.arity
            )));
        }
        Ok(())
    }

    /// `F̃(n_1, …, n_r) = F(∏_h n_h^{γ_{1h}}, …, ∏_h n_h^{γ_{kh}})`, with budget
    /// `(A^c, B, cε)` where `c` is the largest column sum of `γ` (at most `g`).
    pub fn pushforward(&self, gamma: &[Vec<u32>]) -> Result<MultiplicativeFunction> {
        self.check_arity(gamma.len())?;
        let r = gamma.first().map_or(0, Vec::len);
        if r == 0 || gamma.iter().any(|row| row.len() != r) {
            return Err(Error::domain("exponent matrix must be k×r with r ≥ 1"));
        }
        let c = (0..r)
            .map(|h| gamma.iter().map(|row| row[h]).sum::<u32>())
            .max()
            .unwrap_or(0)
            .max(1);
        let budget = Budget {
            a: self.budget.a.powi(c as i32),
            b: self.budget.b,
            eps: self.budget.eps * f64::from(c),
        };
        let base = self.clone();
        let gamma = gamma.to_vec();
        let out = MultiplicativeFunction::new(
            format!("{}~", self.name),
            r,
            move |p, mus| {
                let nus: Vec<u32> = gamma
                    .iter()
                    .map(|row| row.iter().zip(mus).map(|(&g, &m)| g * m).sum())
                    .collect();
                base.prime_power(p, &nus)
            },
            budget,
        )?;
        Ok(match self.eta {
            Some(e) => out.with_eta(e),
            None => out,
        })
    }

    /// The minimal function `G`, which equals `F` for multiplicative `F`.
    /// Refused when some prime-power value on the sample grid is zero: the
    /// supremum defining `G` then skips arguments and `G = F` can fail.
    pub fn minimal_g(&self) -> Result<MultiplicativeFunction> {
        let grid = SampleGrid::default();
        let mut zero = None;
        grid.for_each(self.arity, |p, nus| {
            if zero.is_none() && self.prime_power(p, nus).is_zero() {
                zero = Some((p, nus.to_vec()));
            }
        });
        match zero {
            Some((p, nus)) => Err(Error::Unsupported(format!(
                "{} vanishes at p = {p}, ν = {nus:?}; G = F is only supported for positive values",
                self.name
            ))),
            None => Ok(self.clone()),
        }
    }

    /// `min(A^{Σν}, B p^{εΣν})`.
    pub fn g_cap(&self, p: u128, nus: &[u32]) -> f64 {
        self.budget.cap(p, nus.iter().sum())
    }

    /// Checks `F(p^ν⃗) ≤ min(A^{Σν}, B p^{εΣν})` on the grid.
    pub fn check_membership(&self, grid: &SampleGrid) -> CheckReport {
        let mut report = CheckReport::default();
        grid.for_each(self.arity, |p, nus| {
            report.checked += 1;
            if report.violation.is_some() {
                return;
            }
            let v = self.prime_power(p, nus).to_f64().unwrap_or(f64::INFINITY);
            let cap = self.g_cap(p, nus);
            if v > cap * (1.0 + 1e-12) {
                report.violation = Some(Violation { p, nus: nus.to_vec(), value: v, limit: cap });
            }
        });
        report
    }

    /// Checks `F(p^ν⃗) ≥ η^{Σν}` on the grid.
    pub fn check_lower(&self, eta: f64, grid: &SampleGrid) -> CheckReport {
        let mut report = CheckReport::default();
        grid.for_each(self.arity, |p, nus| {
            report.checked += 1;
            if report.violation.is_some() {
                return;
            }
            let v = self.prime_power(p, nus).to_f64().unwrap_or(0.0);
            let floor = eta.powi(nus.iter().sum::<u32>() as i32);
            if v < floor * (1.0 - 1e-12) {
                report.violation = Some(Violation { p, nus: nus.to_vec(), value: v, limit: floor });
            }
        });
        report
    }
}

/// `(f_1 ⊗ ⋯ ⊗ f_s)(n⃗_1, …, n⃗_s) = ∏ f_i(n⃗_i)`, with budget
/// `(max A_i, ∏ B_i, max ε_i)`.
pub fn tensor_product(fs: &[MultiplicativeFunction]) -> Result<MultiplicativeFunction> {
    if fs.is_empty() {
        return Err(Error::domain("empty tensor product"));
    }
    let budget = Budget {
        a: fs.iter().map(|f| f.budget.a).fold(1.0, f64::max),
        b: fs.iter().map(|f| f.budget.b).product(),
        eps: fs.iter().map(|f| f.budget.eps).fold(0.0, f64::max),
    };
    let arity = fs.iter().map(|f| f.arity).sum();
    let name = fs.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("⊗");
    let eta = fs
        .iter()
        .map(|f| f.eta)
        .try_fold(1.0f64, |acc, e| e.map(|e| acc.min(e)));
    let parts = fs.to_vec();
    let out = MultiplicativeFunction::new(
        name,
        arity,
        move |p, nus| {
            let mut at = 0;
            let mut acc = BigRational::one();
            for f in &parts {
                acc *= f.prime_power(p, &nus[at..at + f.arity]);
                at += f.arity;
            }
            acc
        },
        budget,
    )?;
    Ok(match eta {
        Some(e) => out.with_eta(e),
        None => out,
    })
}

/// Primes `p ≤ max_prime` and exponent tuples with `1 ≤ Σν ≤ max_total`.
#[derive(Debug, Clone, Copy)]
pub struct SampleGrid {
    pub max_prime: u64,
    pub max_total: u32,
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self { max_prime: 97, max_total: 12 }
    }
}

impl SampleGrid {
    pub fn for_each(&self, arity: usize, mut f: impl FnMut(u128, &[u32])) {
        let tuples = exponent_tuples(arity, self.max_total);
        for p in arith::primes_up_to(self.max_prime) {
            for t in &tuples {
                f(p as u128, t);
            }
        }
    }
}

/// All `ν⃗ ∈ N^k` with `1 ≤ Σν ≤ total`, in lexicographic order.
pub fn exponent_tuples(k: usize, total: u32) -> Vec<Vec<u32>> {
    fn go(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            if cur.iter().any(|&v| v > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=left {
            cur.push(v);
            go(k, left - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, total, &mut Vec::new(), &mut out);
    out
}

/// Memo of `F(p^ν⃗)` for one function; do not share between functions.
#[derive(Debug, Clone, Default)]
pub struct PrimePowerCache(HashMap<(u128, Vec<u32>), BigRational>);

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub p: u128,
    pub nus: Vec<u32>,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub checked: usize,
    pub violation: Option<Violation>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(f, "pass ({} grid points)", self.checked),
            Some(v) => write!(
                f,
                "fail at p = {}, ν = {:?}: value {} against limit {}",
                v.p, v.nus, v.value, v.limit
            ),
        }
    }
}

// ---------------------------------------------------------------------------
// built-ins

/// Defaults for the parameters a built-in does not fix itself.
#[derive(Debug, Clone, Copy)]
pub struct BuiltinParams {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    pub eta: f64,
}

impl Default for BuiltinParams {
    fn default() -> Self {
        Self { a: 2.0, b: 1.0, eps: 0.01, eta: 0.5 }
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// `τ_m(p^ν) = C(ν+m−1, m−1)`.
pub fn tau_m_prime_power(m: u32, nu: u32) -> BigInt {
    binomial(u64::from(nu + m - 1), u64::from(m - 1))
}

/// Smallest `B` with `τ_m(p^ν) ≤ B p^{εν}` for all primes and all `ν`; the
/// worst prime is 2.
pub fn tau_m_budget_b(m: u32, eps: f64) -> f64 {
    let mut best = 1.0f64;
    let mut prev = f64::NEG_INFINITY;
    for nu in 0..100_000u32 {
        let lv = (0..m - 1)
            .map(|i| (f64::from(nu + m - 1 - i)).ln() - f64::from(i + 1).ln())
            .sum::<f64>()
            - eps * f64::from(nu) * std::f64::consts::LN_2;
        best = best.max(lv.exp());
        if lv < prev && nu > 8 {
            break;
        }
        prev = lv;
    }
    // absorbs rounding in the comparison against the exact values
    best * (1.0 + 1e-9)
}

fn tensor(
    name: String,
    k: usize,
    unary: impl Fn(u128, u32) -> BigRational + Send + Sync + 'static,
    budget: Budget,
) -> Result<MultiplicativeFunction> {
    let b = budget.b.powi(k as i32);
    MultiplicativeFunction::new(
        name,
        k,
        move |p, nus| nus.iter().map(|&v| unary(p, v)).product(),
        Budget { b, ..budget },
    )
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// The constant function 1.
pub fn one(k: usize, eps: f64) -> Result<MultiplicativeFunction> {
    MultiplicativeFunction::new("one", k, |_, _| BigRational::one(), Budget::new(1.0, 1.0, eps)?)
}

/// `τ_m ⊗ ⋯ ⊗ τ_m` (k factors), budget `(m, B(ε)^k, ε)`.
pub fn tau_m(m: u32, k: usize, eps: f64) -> Result<MultiplicativeFunction> {
    if m < 1 {
        return Err(Error::domain("τ_m needs m ≥ 1"));
    }
    let budget = Budget::new(f64::from(m).max(1.0), tau_m_budget_b(m, eps), eps)?;
    let name = if m == 2 { "tau".to_string() } else { format!("tau_m:{m}") };
    Ok(tensor(name, k, move |_, v| int(tau_m_prime_power(m, v)), budget)?
        .with_eta(0.5))
}

/// `A^Ω` capped at `B p^{εν}` at each prime power, tensored k times.
pub fn pow_a(a: f64, k: usize, b: f64, eps: f64) -> Result<MultiplicativeFunction> {
    let budget = Budget::new(a, b, eps)?;
    tensor(
        format!("powA:{a}"),
        k,
        move |p, v| {
            let cap = budget.cap(p, v);
            BigRational::from_float(cap).unwrap_or_else(BigRational::one)
        },
        budget,
    )
}

/// A seeded random class member: each prime-power value is a pure function
/// of `(seed, p, ν⃗)`, uniform in `[η^{Σν}, min(A^{Σν}, B p^{εΣν})]` shrunk by
/// a relative margin of 10⁻⁹ on both ends.
pub fn random(seed: u64, k: usize, params: BuiltinParams) -> Result<MultiplicativeFunction> {
    let budget = Budget::new(params.a, params.b, params.eps)?;
    let eta = params.eta;
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::domain(format!("η must lie in (0,1), got {eta}")));
    }
    Ok(MultiplicativeFunction::new(
        format!("random:{seed}"),
        k,
        move |p, nus| {
            let mut key = [0u8; 32];
            key[..8].copy_from_slice(&seed.to_le_bytes());
            key[8..24].copy_from_slice(&p.to_le_bytes());
            let mut h = 0xcbf2_9ce4_8422_2325u64;
            for &v in nus {
                h = (h ^ u64::from(v)).wrapping_mul(0x0100_0000_01b3);
            }
            key[24..].copy_from_slice(&h.to_le_bytes());
            let mut rng = ChaCha8Rng::from_seed(key);
            let s: u32 = nus.iter().sum();
            let lo = eta.powi(s as i32) * (1.0 + 1e-9);
            let hi = budget.cap(p, s) * (1.0 - 1e-9);
            let u: f64 = rng.gen();
            BigRational::from_float(lo + (hi - lo) * u).unwrap_or_else(BigRational::one)
        },
        budget,
    )?
    .with_eta(eta))
}

/// Resolves a built-in by name: `one`, `tau`, `tau_m:m`, `powA:A`,
/// `random:seed`.
pub fn builtin(name: &str, k: usize, params: BuiltinParams) -> Result<MultiplicativeFunction> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let bad = || Error::Parse(format!("bad argument in function name {name:?}"));
    match (head, arg) {
        ("one", None) => one(k, params.eps),
        ("tau", None) => tau_m(2, k, params.eps),
        ("tau_m", Some(m)) => tau_m(m.parse().map_err(|_| bad())?, k, params.eps),
        ("powA", Some(a)) => pow_a(a.parse().map_err(|_| bad())?, k, params.b, params.eps),
        ("random", Some(s)) => random(s.parse().map_err(|_| bad())?, k, params),
        _ => Err(Error::Parse(format!(
            "unknown function {name:?}; expected one, tau, tau_m:m, powA:A or random:seed"
        ))),
    }
}

/// `sup_{b ≤ bound, F(b) ≠ 0} F(ab)/F(b)` for unary `F`, by brute force.
pub fn sup_ratio_oracle(f: &MultiplicativeFunction, a: u128, bound: u128) -> Result<BigRational> {
    let mut best: Option<BigRational> = None;
    for b in 1..=bound {
        let fb = f.eval(&[b])?;
        if fb.is_zero() {
            continue;
        }
        let r = f.eval(&[a * b])? / fb;
        if best.as_ref().is_none_or(|x| r > *x) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::domain("F vanishes on every b in range"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        int(n)
    }

    #[test]
    fn eval_examples() {
        let tau = tau_m(2, 1, 0.1).unwrap();
        assert_eq!(tau.eval(&[12]).unwrap(), r(6));
        let tau2 = tau_m(2, 2, 0.1).unwrap();
        assert_eq!(tau2.eval(&[4, 9]).unwrap(), r(9));
        let tau3 = tau_m(3, 1, 0.1).unwrap();
        assert_eq!(tau3.eval(&[8]).unwrap(), r(10));
        assert_eq!(tau.eval(&[1]).unwrap(), r(1));
        assert!(tau.eval(&[0]).is_err());
        assert!(tau.eval(&[1, 2]).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let tau = tau_m(2, 1, 0.1).unwrap();
        let id = tau.pushforward(&[vec![1]]).unwrap();
        for n in 1..50 {
            assert_eq!(id.eval(&[n]).unwrap(), tau.eval(&[n]).unwrap());
        }
        let sq = tau.pushforward(&[vec![2]]).unwrap();
        for n in 1..50 {
            assert_eq!(sq.eval(&[n]).unwrap(), tau.eval(&[n * n]).unwrap());
        }
        // Q = X²(X+1) at n = 2: τ(12) = τ(2²·3)
        let t = tau.pushforward(&[vec![2, 1]]).unwrap();
        assert_eq!(t.eval(&[2, 3]).unwrap(), r(6));
        // largest column sum of γ is 2
        assert_eq!(t.budget().a, 4.0);
    }

    #[test]
    fn minimal_g_examples() {
        let tau = tau_m(2, 1, 0.1).unwrap();
        let g = tau.minimal_g().unwrap();
        for n in 1..100 {
            assert_eq!(g.eval(&[n]).unwrap(), tau.eval(&[n]).unwrap());
        }
        for a in 1..=50u128 {
            assert_eq!(sup_ratio_oracle(&tau, a, 1000).unwrap(), tau.eval(&[a]).unwrap(), "a = {a}");
        }
        let sqf = MultiplicativeFunction::new(
            "squarefree",
            1,
            |_, nus| if nus[0] <= 1 { r(1) } else { r(0) },
            Budget::new(1.0, 1.0, 0.1).unwrap(),
        )
        .unwrap();
        assert!(matches!(sqf.minimal_g(), Err(Error::Unsupported(_))));
        let grid = SampleGrid::default();
        grid.for_each(2, |p, nus| assert!(tau_m(2, 2, 0.1).unwrap().g_cap(p, nus) <= 2f64.powi(nus.iter().sum::<u32>() as i32)));
    }

    #[test]
    fn membership_examples() {
        let grid = SampleGrid::default();
        for m in 2..5 {
            assert!(tau_m(m, 1, 0.05).unwrap().check_membership(&grid).passed());
            assert!(tau_m(m, 2, 0.05).unwrap().check_membership(&grid).passed());
        }
        let a = 2.0;
        let over = MultiplicativeFunction::new(
            "over",
            1,
            move |_, nus| BigRational::from_float((a + 1.0f64).powi(nus[0] as i32)).unwrap(),
            Budget::new(a, 1e6, 1.0).unwrap(),
        )
        .unwrap();
        let rep = over.check_membership(&grid);
        let v = rep.violation.unwrap();
        assert_eq!((v.p, v.nus.clone()), (2, vec![1]));
        assert!(one(3, 0.01).unwrap().check_membership(&grid).passed());
        assert!(pow_a(3.0, 2, 5.0, 0.2).unwrap().check_membership(&grid).passed());
        assert!(random(7, 2, BuiltinParams::default()).unwrap().check_membership(&grid).passed());
    }

    #[test]
    fn lower_examples() {
        let grid = SampleGrid::default();
        assert!(tau_m(2, 1, 0.1).unwrap().check_lower(0.5, &grid).passed());
        assert!(one(1, 0.1).unwrap().check_lower(0.9, &grid).passed());
        let sqf = MultiplicativeFunction::new(
            "squarefree",
            1,
            |_, nus| if nus[0] <= 1 { r(1) } else { r(0) },
            Budget::new(1.0, 1.0, 0.1).unwrap(),
        )
        .unwrap();
        let v = sqf.check_lower(0.5, &grid).violation.unwrap();
        assert_eq!(v.nus, vec![2]);
        assert!(random(3, 1, BuiltinParams::default()).unwrap().check_lower(0.5, &grid).passed());
    }

    #[test]
    fn builtins_by_name() {
        let p = BuiltinParams::default();
        assert_eq!(builtin("tau", 1, p).unwrap().eval(&[12]).unwrap(), r(6));
        assert_eq!(builtin("tau_m:3", 1, p).unwrap().eval(&[8]).unwrap(), r(10));
        assert_eq!(builtin("one", 2, p).unwrap().eval(&[8, 9]).unwrap(), r(1));
        let f = builtin("random:11", 1, p).unwrap();
        assert_eq!(f.eval(&[360]).unwrap(), f.eval(&[360]).unwrap());
        assert_ne!(f.prime_power(2, &[1]), builtin("random:12", 1, p).unwrap().prime_power(2, &[1]));
        assert!(builtin("nope", 1, p).is_err());
        assert!(builtin("tau_m:x", 1, p).is_err());
    }

    #[test]
    fn tensor_matches_builtin_power() {
        let t = tau_m(2, 1, 0.1).unwrap();
        let tt = tensor_product(&[t.clone(), t]).unwrap();
        let direct = tau_m(2, 2, 0.1).unwrap();
        for a in 1..30 {
            for b in 1..30 {
                assert_eq!(tt.eval(&[a, b]).unwrap(), direct.eval(&[a, b]).unwrap());
            }
        }
        assert_eq!(tt.budget(), direct.budget());
    }

    #[test]
    fn tau_budget_is_tight() {
        let b = tau_m_budget_b(2, 0.1);
        // ν+1 ≤ B 2^{0.1ν}, maximum near ν = 1/(0.1 ln 2) − 1 ≈ 13.4
        let exact = (0..200).map(|v| (v as f64 + 1.0) * 2f64.powf(-0.1 * v as f64)).fold(0.0, f64::max);
        assert!((b / exact - 1.0).abs() < 1e-8);
    }
}
