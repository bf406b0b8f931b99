//! Ratio experiments: the direct sum against each selected right-hand side,
//! for every family member and every x on the grid.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use twofloat::TwoFloat;

use crate::bounds::{
    delta_d_k1, delta_dstar, delta_shift, holowinsky_assemble, rhs_cor_disc, rhs_cor_mult, rhs_main,
    rhs_primes, rhs_shiu, shift_euler_product, BoundParams, PrimeTable,
};
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Family, Variant};
use crate::harness::report::{RatioReport, ReportRow, RowFailure};
use crate::lhs::{factor_values_in_interval, short_sum_on, IntervalTable};
use crate::mfunc::MultiplicativeFunction;
use crate::polyarith::FactoredSystem;
use crate::scalar::{Mode, Value};

/// Bound parameters for one grid point; `A`, `B` default to the budget of `f`.
pub fn params_for(config: &ExperimentConfig, f: &MultiplicativeFunction, x: f64) -> BoundParams {
    BoundParams {
        alpha: config.alpha,
        delta: config.delta,
        a: config.a.unwrap_or(f.budget().a),
        b: config.b.unwrap_or(f.budget().b),
        eps: config.eps,
        x,
        y: config.y_for(x),
        c0: config.c0,
    }
}

fn sorted_variants(config: &ExperimentConfig) -> Vec<Variant> {
    let mut v = config.variants.clone();
    v.sort();
    v.dedup();
    v
}

/// Checks the hypotheses of every selected form at every grid point.
/// Returns the warnings (conditions on `c₀`) when all hold.
pub fn validate_experiment(config: &ExperimentConfig) -> Result<Vec<String>> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let variants = sorted_variants(config);
    for (label, system) in config.family.members()? {
        let f = config.function_of_arity(system.k())?;
        for &x in &config.xs {
            for &v in &variants {
                if v == Variant::Holowinsky {
                    if x < 3.0 {
                        errors.push(format!("[{label}, x = {x}] x must be at least 3"));
                    }
                    continue;
                }
                let check = params_for(config, &f, x).check(&system);
                errors.extend(check.errors.iter().map(|e| format!("[{label}, x = {x}, {v}] {e}")));
                warnings.extend(check.warnings.iter().map(|w| format!("[{label}, x = {x}] {w}")));
                if v == Variant::Primes && system.q().evaluate_i64(0).is_zero() {
                    errors.push(format!("[{label}, {v}] Q(0) = 0"));
                }
                if v == Variant::Shiu && (system.k() != 1 || system.r() != 1 || system.exponents()[0][0] != 1) {
                    errors.push(format!("[{label}, {v}] needs a single squarefree polynomial"));
                }
            }
        }
    }
    warnings.sort();
    warnings.dedup();
    if errors.is_empty() {
        Ok(warnings)
    } else {
        Err(Error::Validation(errors))
    }
}

struct Task {
    idx: usize,
    label: String,
    system: FactoredSystem,
    x: f64,
}

/// Runs the experiment. Rows come out ordered by family member, then x,
/// then variant; a row whose left side hits a zero value is recorded as a
/// failure instead.
pub fn run_ratio_experiment(config: &ExperimentConfig) -> Result<RatioReport> {
    validate_experiment(config)?;
    let variants = sorted_variants(config);
    let members = config.family.members()?;
    let mut tasks = Vec::new();
    for (idx, (label, system)) in members.into_iter().enumerate() {
        for &x in &config.xs {
            tasks.push(Task { idx, label: label.clone(), system: system.clone(), x });
        }
    }
    // the Euler product of the shifted form depends only on x
    let mut euler: BTreeMap<u64, TwoFloat> = BTreeMap::new();
    if variants.contains(&Variant::Holowinsky) {
        let lambda = config.function_of_arity(1)?;
        for &x in &config.xs {
            let xf = x.floor() as u128;
            let e = match config.mode {
                Mode::Exact => crate::scalar::Scalar::to_twofloat(&shift_euler_product::<BigRational>(&lambda, &lambda, xf)),
                Mode::Float => shift_euler_product::<TwoFloat>(&lambda, &lambda, xf),
            };
            euler.insert(x.to_bits(), e);
        }
    }
    let results = tasks
        .par_iter()
        .map(|t| run_task(config, &variants, t, &euler))
        .collect::<Result<Vec<_>>>()?;
    let mut report = RatioReport::default();
    let mut keyed: Vec<(usize, usize, Vec<ReportRow>, Vec<RowFailure>)> = results
        .into_iter()
        .zip(&tasks)
        .map(|((rows, fails), t)| {
            let xi = config.xs.iter().position(|&v| v == t.x).unwrap_or(0);
            (t.idx, xi, rows, fails)
        })
        .collect();
    keyed.sort_by_key(|k| (k.0, k.1));
    for (_, _, rows, fails) in keyed {
        report.rows.extend(rows);
        report.failures.extend(fails);
    }
    Ok(report)
}

fn run_task(
    config: &ExperimentConfig,
    variants: &[Variant],
    t: &Task,
    euler: &BTreeMap<u64, TwoFloat>,
) -> Result<(Vec<ReportRow>, Vec<RowFailure>)> {
    let system = &t.system;
    let f = config.function_of_arity(system.k())?;
    let params = params_for(config, &f, t.x);
    let y = params.y;
    let mut rows = Vec::new();
    let mut fails = Vec::new();
    let fail = |v: Variant, reason: String| RowFailure {
        family_param: t.label.clone(),
        x: t.x,
        variant: v.name().to_string(),
        reason,
    };
    let needs_interval = variants.iter().any(|&v| v != Variant::Holowinsky);
    let interval: Option<std::result::Result<IntervalTable, String>> = needs_interval.then(|| {
        factor_values_in_interval(system, t.x, y, None).map_err(|e| e.to_string())
    });
    let table = if needs_interval {
        Some(PrimeTable::new(system, params.x_floor() as u64)?)
    } else {
        None
    };
    for &v in variants {
        let start = Instant::now();
        let lhs: std::result::Result<BigRational, String> = match v {
            Variant::Holowinsky => factor_values_in_interval(system, 0.0, t.x, None)
                .and_then(|tab| short_sum_on(system, &f, &tab))
                .map_err(|e| e.to_string()),
            Variant::Primes => match interval.as_ref().unwrap() {
                Ok(tab) => prime_rows_sum(&f, tab).map_err(|e| e.to_string()),
                Err(e) => Err(e.clone()),
            },
            _ => match interval.as_ref().unwrap() {
                Ok(tab) => short_sum_on(system, &f, tab).map_err(|e| e.to_string()),
                Err(e) => Err(e.clone()),
            },
        };
        let lhs = match lhs {
            Ok(l) => l,
            Err(reason) => {
                fails.push(fail(v, reason));
                continue;
            }
        };
        let tab = table.as_ref();
        let mode = config.mode;
        let (rhs, delta, row_y) = match v {
            Variant::Main => (rhs_main(system, &f, &params, tab, mode)?, one(), y),
            Variant::CorDisc => (rhs_cor_disc(system, &f, &params, tab, mode)?, dstar(system, &f)?, y),
            Variant::CorMult => (rhs_cor_mult(system, &f, &params, tab, mode)?, dstar(system, &f)?, y),
            Variant::Primes => (rhs_primes(system, &f, &params, tab, mode)?, dstar(system, &f)?, y),
            Variant::Shiu => {
                let (d, _) = delta_d_k1(system.q(), &f)?;
                (rhs_shiu(system, &f, &params, tab, mode)?, Value::Exact(d), y)
            }
            Variant::Holowinsky => {
                let ell = t.label.parse::<i64>().map_err(|_| Error::Parse(format!("bad ℓ {:?}", t.label)))?;
                let lambda = config.function_of_arity(1)?;
                let d = delta_shift(ell, &lambda, &lambda)?;
                let e = euler[&t.x.to_bits()];
                (Value::Float(holowinsky_assemble(&d, t.x, e)), Value::Exact(d), t.x)
            }
        };
        let millis = config.timing.then(|| start.elapsed().as_millis() as u64);
        rows.push(ReportRow::new(
            t.label.clone(),
            t.x,
            row_y,
            v.name(),
            Value::Exact(lhs),
            rhs,
            delta,
            millis,
        ));
    }
    Ok((rows, fails))
}

fn one() -> Value {
    Value::Exact(BigRational::one())
}

fn dstar(system: &FactoredSystem, f: &MultiplicativeFunction) -> Result<Value> {
    let gt = f.pushforward(system.exponents())?.minimal_g()?;
    Ok(Value::Exact(delta_dstar(system, &gt)?))
}

fn prime_rows_sum(f: &MultiplicativeFunction, tab: &IntervalTable) -> Result<BigRational> {
    let mut acc = BigRational::zero();
    for row in tab.rows.iter().filter(|r| crate::arith::is_prime(u128::from(r.n))) {
        if row.has_zero() {
            return Err(Error::domain(format!("Q_j({}) = 0 at a prime of the interval", row.n)));
        }
        acc += f.eval_factored(&row.q);
    }
    Ok(acc)
}

/// Threshold violations: spreads above the ceiling, ratios outside
/// `[ratio_min, ratio_max]`, and ratios that are not finite and positive.
pub fn threshold_violations(config: &ExperimentConfig, report: &RatioReport) -> Vec<String> {
    let mut out = Vec::new();
    for row in report.degenerate_rows() {
        out.push(format!("[{} x={} {}] ratio {} is not finite and positive", row.family_param, row.x, row.variant, row.ratio));
    }
    if let Some(c) = config.spread_ceiling {
        for (v, s) in report.summary() {
            if s.spread >= c {
                out.push(format!("[{v}] spread {:.4} ≥ ceiling {c}", s.spread));
            }
        }
    }
    for row in &report.rows {
        let r = row.ratio.to_f64();
        if config.ratio_min.is_some_and(|m| r < m) || config.ratio_max.is_some_and(|m| r > m) {
            out.push(format!(
                "[{} x={} {}] ratio {r:.6} outside [{}, {}]",
                row.family_param,
                row.x,
                row.variant,
                config.ratio_min.unwrap_or(0.0),
                config.ratio_max.unwrap_or(f64::INFINITY)
            ));
        }
    }
    out
}

/// Mean of Δ(ℓ) for `F = λ ⊗ λ` over the given shifts.
pub fn mean_delta(ells: &[i64], lambda: &MultiplicativeFunction) -> Result<BigRational> {
    if ells.is_empty() {
        return Err(Error::domain("empty ℓ range"));
    }
    let total = ells
        .par_iter()
        .map(|&l| delta_shift(l, lambda, lambda))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(BigRational::zero(), |a, b| a + b);
    Ok(total / BigRational::from_integer(ells.len().into()))
}

/// `Σ_{n≤x} τ_m(n) τ_m(n+ℓ)` against the shifted form, one row per ℓ, with
/// the mean of Δ(ℓ) over the same range.
pub fn sweep_shifted_pairs(x: f64, ells: &[i64], m: u32, mode: Mode) -> Result<RatioReport> {
    if let Some(&bad) = ells.iter().find(|&&l| l < 1 || l as f64 > x) {
        return Err(Error::Validation(vec![format!("ℓ = {bad} outside 1 ≤ ℓ ≤ x")]));
    }
    let config = ExperimentConfig {
        family: Family::Shifted(ells.to_vec()),
        function: if m == 2 { "tau".into() } else { format!("tau_m:{m}") },
        xs: vec![x],
        variants: vec![Variant::Holowinsky],
        mode,
        ..ExperimentConfig::default()
    };
    let mut report = run_ratio_experiment(&config)?;
    if !ells.is_empty() {
        let lambda = config.function_of_arity(1)?;
        report.mean_delta = mean_delta(ells, &lambda)?.to_f64();
    }
    Ok(report)
}

/// `Σ_{n≤x} τ_m(n) τ_m(n+ℓ)` by factoring every argument on its own.
pub fn naive_shifted_sum(x: u64, ell: u64, m: u32) -> Result<BigRational> {
    let spf = crate::arith::SpfTable::new(u32::try_from(x + ell).map_err(|_| Error::Overflow("x + ℓ above 2^32".into()))?);
    let tau = |n: u64| -> num_bigint::BigInt {
        spf.factor(n)
            .iter()
            .map(|(_, e)| crate::mfunc::tau_m_prime_power(m, e))
            .product()
    };
    let s: num_bigint::BigInt = (1..=x).map(|n| tau(n) * tau(n + ell)).sum();
    Ok(BigRational::from_integer(s))
}
