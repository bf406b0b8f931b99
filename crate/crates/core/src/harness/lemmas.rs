//! Numerical checks of the technical lemmas behind the majorant: the local
//! bounds on `H` and `T`, the comparisons between truncated sums, and the
//! two-sided sieve estimate.
//!
//! `H(n⃗) = F̃(n⃗) ρ̂_R(n⃗)/[n_1κ(n_1), …] ∏ σ(n_h)` and `T` is the same with
//! the minimal function `G̃` in place of `F̃`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use twofloat::TwoFloat;

use crate::bounds::{local_terms, majorant_sum, smooth_sum, BoundParams, PrimeTable};
use crate::error::Result;
use crate::harness::report::{normalize, ratio_of};
use crate::lhs::{factor_values_in_interval, sieve_count_on, sieve_rhs};
use crate::mfunc::MultiplicativeFunction;
use crate::polyarith::{fixed_prime_divisors, FactoredSystem};
use crate::rootcount::{rho_hat, rho_hat_modulus_of};
use crate::scalar::{Mode, Scalar, Value};

/// Weights `σ` (and `θ`) used by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    One,
    /// `λ(n) = (n/φ(n))^g`.
    Lambda,
    InverseLambda,
}

impl Weight {
    pub fn name(self) -> &'static str {
        match self {
            Weight::One => "1",
            Weight::Lambda => "lambda",
            Weight::InverseLambda => "1/lambda",
        }
    }

    /// Value at `p^ν` with `ν ≥ 1`.
    fn at_prime(self, p: u128, g: usize) -> BigRational {
        let l = BigRational::new(BigInt::from(p), BigInt::from(p - 1)).pow(g as i32);
        match self {
            Weight::One => BigRational::one(),
            Weight::Lambda => l,
            Weight::InverseLambda => l.recip(),
        }
    }
}

/// `f(p^ν⃗) ∏_{ν_h > 0} w(p)`.
pub fn weighted(f: &MultiplicativeFunction, w: Weight, g: usize) -> Result<MultiplicativeFunction> {
    let inner = f.clone();
    MultiplicativeFunction::new(
        format!("{}*{}", f.name(), w.name()),
        f.arity(),
        move |p, nus| {
            let base = inner.prime_power(p, nus);
            let k = nus.iter().filter(|&&v| v > 0).count();
            base * w.at_prime(p, g).pow(k as i32)
        },
        f.budget(),
    )
}

#[derive(Debug, Clone)]
pub struct LemmaConfig {
    /// Grid of `z` for the comparisons between truncated sums.
    pub zs: Vec<f64>,
    pub mode: Mode,
    /// Ceiling for ratios that the lemmas bound by a constant.
    pub ceiling: f64,
    /// Primes up to this bound for the local sup checks.
    pub prime_bound: u64,
    /// Number of coprime pairs `(a⃗, b⃗)` to aim for in the submultiplicativity
    /// check; components run up to `budget^{1/(2r)}`.
    pub h1_budget: u64,
    /// `K` in the comparison between `z` and `z^{1/K}`.
    pub k: u32,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self {
            zs: vec![1e2, 1e3, 1e4],
            mode: Mode::Float,
            ceiling: 1000.0,
            prime_bound: 10_000,
            h1_budget: 20_736,
            k: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaRow {
    pub lemma: String,
    pub param: String,
    pub lhs: Value,
    pub rhs: Value,
    pub ratio: Value,
    /// The accepted range, as text.
    pub limit: String,
    pub pass: bool,
}

impl LemmaRow {
    fn new(lemma: &str, param: String, lhs: Value, rhs: Value, limit: String, pass: impl FnOnce(f64) -> bool) -> Self {
        let ratio = normalize(ratio_of(&lhs, &rhs));
        let ok = pass(ratio.to_f64());
        Self { lemma: lemma.into(), param, lhs: normalize(lhs), rhs: normalize(rhs), ratio, limit, pass: ok }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LemmaReport {
    pub rows: Vec<LemmaRow>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&LemmaRow> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["lemma", "param", "lhs", "rhs", "ratio", "limit", "pass"])?;
        for r in &self.rows {
            w.write_record([
                r.lemma.clone(),
                r.param.clone(),
                r.lhs.render(),
                r.rhs.render(),
                r.ratio.render(),
                r.limit.clone(),
                r.pass.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| crate::Error::Parse(e.to_string()))
    }
}

fn float(v: f64) -> Value {
    Value::Float(TwoFloat::from(v))
}

/// `H` (or `T`) at an integer tuple, exactly.
fn h_value(system: &FactoredSystem, f: &MultiplicativeFunction, n: &[u128]) -> Result<BigRational> {
    let c = rho_hat(system, n)?;
    if c == 0 {
        return Ok(BigRational::zero());
    }
    let m = rho_hat_modulus_of(n)?;
    Ok(f.eval(n)? * BigRational::new(c.into(), m.into()))
}

fn tuples_up_to(r: usize, bound: u128) -> Vec<Vec<u128>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=bound).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// `H(a⃗b⃗) ≤ T(b⃗) H(a⃗)` whenever `(a_1⋯a_r, b_1⋯b_r) = 1`, over all tuples
/// with components up to the bound derived from `budget`.
fn check_h1(system: &FactoredSystem, h: &MultiplicativeFunction, t: &MultiplicativeFunction, budget: u64, label: &str) -> Result<LemmaRow> {
    let r = system.r();
    let bound = ((budget as f64).powf(1.0 / (2.0 * r as f64)).floor() as u128).max(2);
    let tuples = tuples_up_to(r, bound);
    let cache: Mutex<HashMap<(bool, Vec<u128>), BigRational>> = Mutex::new(HashMap::new());
    let eval = |is_t: bool, n: &[u128]| -> Result<BigRational> {
        if let Some(v) = cache.lock().unwrap().get(&(is_t, n.to_vec())) {
            return Ok(v.clone());
        }
        let v = h_value(system, if is_t { t } else { h }, n)?;
        cache.lock().unwrap().insert((is_t, n.to_vec()), v.clone());
        Ok(v)
    };
    let results = tuples
        .par_iter()
        .map(|a| {
            let pa: u128 = a.iter().product();
            let mut worst: Option<BigRational> = None;
            let mut ok = true;
            let mut samples = 0u64;
            for b in &tuples {
                let pb: u128 = b.iter().product();
                if pa.gcd(&pb) != 1 {
                    continue;
                }
                samples += 1;
                let ab: Vec<u128> = a.iter().zip(b).map(|(x, y)| x * y).collect();
                let lhs = eval(false, &ab)?;
                let rhs = eval(true, b)? * eval(false, a)?;
                if lhs > rhs {
                    ok = false;
                }
                if !rhs.is_zero() {
                    let q = lhs / rhs;
                    if worst.as_ref().is_none_or(|w| &q > w) {
                        worst = Some(q);
                    }
                }
            }
            Ok((ok, worst, samples))
        })
        .collect::<Result<Vec<_>>>()?;
    let ok = results.iter().all(|r| r.0);
    let samples: u64 = results.iter().map(|r| r.2).sum();
    let worst = results
        .into_iter()
        .filter_map(|r| r.1)
        .max()
        .unwrap_or_else(BigRational::zero);
    Ok(LemmaRow::new(
        "submult",
        format!("sigma={label} components<={bound} pairs={samples}"),
        Value::Exact(worst),
        Value::Exact(BigRational::one()),
        "max H(ab)/(T(b)H(a)) <= 1".into(),
        move |_| ok,
    ))
}

/// Local sup checks on `T`: `sup_p p Σ′ T(p^ν⃗)` and the weighted tail
/// `sup_p p^{5/4} Σ_{Σν > 2g} T(p^ν⃗) p^{Σν/(4g)}`.
fn check_local(system: &FactoredSystem, t: &MultiplicativeFunction, table: &PrimeTable, cfg: &LemmaConfig, label: &str) -> Result<Vec<LemmaRow>> {
    let g = system.g() as u32;
    let cut = 8 * g;
    let per_prime = table
        .entries()
        .par_iter()
        .map(|e| {
            let terms = local_terms::<TwoFloat>(system, t, e, cut)?;
            let p = e.p as f64;
            let head: f64 = terms.iter().filter(|x| x.total <= 4 * g).map(|x| x.value.hi()).sum();
            let tail: f64 = terms
                .iter()
                .filter(|x| x.total > 2 * g)
                .map(|x| x.value.hi() * p.powf(f64::from(x.total) / (4.0 * f64::from(g))))
                .sum();
            Ok((e.p, p * head, p.powf(1.25) * tail))
        })
        .collect::<Result<Vec<_>>>()?;
    let (p2, h2) = per_prime.iter().map(|v| (v.0, v.1)).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let (p3, h3) = per_prime.iter().map(|v| (v.0, v.2)).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let c = cfg.ceiling;
    Ok(vec![
        LemmaRow::new(
            "local-sum",
            format!("sigma={label} p<={} nu<={} argmax p={p2}", cfg.prime_bound, 4 * g),
            float(h2),
            float(1.0),
            format!("sup p*sum' T <= {c}"),
            move |r| r <= c,
        ),
        LemmaRow::new(
            "local-tail",
            format!("sigma={label} p<={} 2g<nu<={cut} argmax p={p3}", cfg.prime_bound),
            float(h3),
            float(1.0),
            format!("sup p^(5/4)*tail <= {c}"),
            move |r| r <= c,
        ),
    ])
}

/// `∏_{p≤z} (1 + Σ′ t p^{βΣν})` with the same cut as [`smooth_sum`].
fn smooth_weighted(system: &FactoredSystem, f: &MultiplicativeFunction, table: &PrimeTable, z: u128, beta: f64, cut: u32) -> Result<TwoFloat> {
    let factors = table
        .up_to(z)?
        .par_iter()
        .map(|e| {
            let mut top = cut;
            let mut v = 1u128;
            let mut k = 0;
            while v * u128::from(e.p) <= z {
                v *= u128::from(e.p);
                k += 1;
            }
            top = top.max(k);
            let p = e.p as f64;
            Ok(local_terms::<TwoFloat>(system, f, e, top)?
                .into_iter()
                .fold(TwoFloat::from(1.0), |acc, t| acc + t.value * p.powf(beta * f64::from(t.total))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(<TwoFloat as Scalar>::product(factors))
}

/// Runs every check for `F` (arity k) over the system.
pub fn verify_technical_lemmas(system: &FactoredSystem, f: &MultiplicativeFunction, cfg: &LemmaConfig) -> Result<LemmaReport> {
    let g = system.g();
    let ft = f.pushforward(system.exponents())?;
    let gt = ft.minimal_g()?;
    let zmax = cfg.zs.iter().fold(0.0f64, |a, &b| a.max(b)).floor() as u64;
    let table = PrimeTable::new(system, cfg.prime_bound.max(zmax))?;
    let mut rows = Vec::new();

    let ones = vec![1u128; system.r()];
    let h11 = h_value(system, &ft, &ones)?;
    rows.push(LemmaRow::new(
        "submult",
        "H(1,...,1)".into(),
        Value::Exact(h11.clone()),
        Value::Exact(BigRational::one()),
        "= 1".into(),
        move |_| h11.is_one(),
    ));
    for w in [Weight::One, Weight::Lambda, Weight::InverseLambda] {
        let hw = weighted(&ft, w, g)?;
        let tw = weighted(&gt, w, g)?;
        rows.push(check_h1(system, &hw, &tw, cfg.h1_budget, w.name())?);
        rows.extend(check_local(system, &tw, &table, cfg, w.name())?);
    }

    let cut = 8 * g as u32;
    let c = cfg.ceiling;
    for &zf in &cfg.zs {
        let z = zf.floor() as u128;
        let plain = match cfg.mode {
            Mode::Exact => Value::Exact(majorant_sum::<BigRational>(system, &ft, &table, z)?),
            Mode::Float => Value::Float(majorant_sum::<TwoFloat>(system, &ft, &table, z)?),
        };
        for theta in [Weight::Lambda, Weight::InverseLambda] {
            let fw = weighted(&ft, theta, g)?;
            let with = Value::Float(majorant_sum::<TwoFloat>(system, &fw, &table, z)?);
            rows.push(LemmaRow::new(
                "theta-weight",
                format!("theta={} z={z}", theta.name()),
                with,
                plain.clone(),
                format!("[1/{c}, {c}]"),
                move |r| r >= 1.0 / c && r <= c,
            ));
        }
        let smooth = match cfg.mode {
            Mode::Exact => Value::Exact(smooth_sum::<BigRational>(system, &ft, &table, z, cut)?),
            Mode::Float => Value::Float(smooth_sum::<TwoFloat>(system, &ft, &table, z, cut)?),
        };
        if zf >= (4.0 * g as f64).exp() {
            let beta = 1.0 / zf.ln();
            let with = smooth_weighted(system, &ft, &table, z, beta, cut)?;
            rows.push(LemmaRow::new(
                "power-weight",
                format!("chi=1 beta={beta:.6} z={z}"),
                Value::Float(with),
                smooth.clone(),
                format!("<= {c}"),
                move |r| r <= c,
            ));
        }
        let zk = zf.powf(1.0 / f64::from(cfg.k)).floor() as u128;
        let smaller = Value::Float(smooth_sum::<TwoFloat>(system, &ft, &table, zk, cut)?);
        rows.push(LemmaRow::new(
            "root-z",
            format!("K={} z={z} z^(1/K)={zk}", cfg.k),
            smooth.clone(),
            smaller,
            format!("<= {c}"),
            move |r| r <= c,
        ));
        let exact_ge = match (&smooth, &plain) {
            (Value::Exact(a), Value::Exact(b)) => Some(a >= b),
            _ => None,
        };
        rows.push(LemmaRow::new(
            "smooth-dominates",
            format!("z={z} cut={cut}"),
            smooth,
            plain,
            format!("[1, {c}]"),
            move |r| exact_ge.unwrap_or(r >= 1.0) && r <= c,
        ));
    }
    Ok(LemmaReport { rows })
}

/// Grid for the two-sided sieve estimate.
#[derive(Debug, Clone)]
pub struct SieveGrid {
    pub a: Vec<Vec<u128>>,
    pub z: Vec<u64>,
    pub x: f64,
    pub y: f64,
    pub alpha: f64,
    pub lo: f64,
    pub hi: f64,
}

/// `sieve_count / sieve_rhs` at every grid point with a positive right side.
/// The parameter column records whether the point meets `z ≤ x^{ε₃}` and
/// `a_1⋯a_r ≤ x^{ε₁}`.
pub fn verify_sieve_lemma(system: &FactoredSystem, grid: &SieveGrid) -> Result<LemmaReport> {
    let xi = fixed_prime_divisors(system.q());
    let table = factor_values_in_interval(system, grid.x, grid.y, None)?;
    let params = BoundParams { alpha: grid.alpha, x: grid.x, y: grid.y, ..BoundParams::default() };
    let (e1, _, e3) = params.sieve_epsilons(system.g());
    let mut rows = Vec::new();
    for a in &grid.a {
        for &z in &grid.z {
            let rhs = sieve_rhs(system, a, z, grid.y)?;
            let count = sieve_count_on(system, a, z, &xi, &table)?;
            let prod: f64 = a.iter().map(|&v| v as f64).product();
            let admissible = (z as f64) <= grid.x.powf(e3) && prod <= grid.x.powf(e1);
            let a_text: Vec<String> = a.iter().map(u128::to_string).collect();
            let param = format!("a=({}) z={z} admissible={admissible}", a_text.join(","));
            let (lo, hi) = (grid.lo, grid.hi);
            if rhs.is_zero() {
                let c = count;
                rows.push(LemmaRow {
                    lemma: "sieve".into(),
                    param,
                    lhs: Value::Exact(BigRational::from_integer(count.into())),
                    rhs: Value::Exact(rhs),
                    ratio: Value::Float(TwoFloat::from(f64::NAN)),
                    limit: "count = 0 when the right side vanishes".into(),
                    pass: c == 0,
                });
                continue;
            }
            rows.push(LemmaRow::new(
                "sieve",
                param,
                Value::Exact(BigRational::from_integer(count.into())),
                Value::Exact(rhs),
                format!("[{lo}, {hi}]"),
                move |r| r >= lo && r <= hi,
            ));
        }
    }
    Ok(LemmaReport { rows })
}

/// Ratio as f64, for callers that only need the number.
pub fn ratio_f64(row: &LemmaRow) -> f64 {
    row.ratio.to_f64()
}
