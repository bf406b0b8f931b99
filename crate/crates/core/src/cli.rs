//! Command-line front end. Exit codes: 0 on success, 1 on I/O errors,
//! 2 on invalid input, 3 when a suite or threshold check fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_traits::{ToPrimitive, Zero};

use crate::bounds::{
    delta_d_general, delta_d_k1, delta_dstar, delta_dstar_ceiling, delta_dstar_exponent, rhs_cor_disc,
    rhs_cor_mult, rhs_holowinsky, rhs_main, rhs_primes, rhs_shiu, BoundParams, PrimeTable,
};
use crate::error::{Error, Result};
use crate::harness::config::{
    parse_config_text, parse_f64_list, parse_int_list, parse_system, read_config_file, ConfigMap,
};
use crate::harness::lemmas::{verify_sieve_lemma, verify_technical_lemmas, LemmaConfig, LemmaReport, SieveGrid};
use crate::harness::ratio::{run_ratio_experiment, sweep_shifted_pairs, threshold_violations, validate_experiment};
use crate::harness::report::{emit, RatioReport};
use crate::harness::{ExperimentConfig, Format, Variant};
use crate::lhs::{prime_sum, short_sum};
use crate::mfunc::{builtin, BuiltinParams, MultiplicativeFunction};
use crate::polyarith::{fixed_prime_divisors, FactoredSystem, IntPoly};
use crate::rootcount::{rho, rho_hat, rho_hat_modulus_of};
use crate::scalar::{Mode, Value};

#[derive(Parser, Debug)]
#[command(name = "majorant-lab", version, about = "Root densities, discriminant factors and majorants for sums of multiplicative functions over polynomial values")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Roots of a polynomial modulo n, or ρ̂ of a system at a tuple.
    Rho {
        /// Polynomial, `x^2+1` or coefficients low to high `1,0,1`.
        poly: Option<String>,
        /// Modulus.
        n: Option<u128>,
        #[arg(long)]
        system: Option<String>,
        /// Tuple for ρ̂, comma separated, one entry per factor.
        #[arg(long)]
        tuple: Option<String>,
    },
    /// Discriminants and fixed prime divisors of a system.
    Disc {
        #[arg(long)]
        system: String,
    },
    /// Discriminant factors for a system and function.
    Delta(BoundArgs),
    /// A right-hand side.
    Bound {
        #[command(flatten)]
        args: BoundArgs,
        #[arg(long, default_value = "main")]
        variant: String,
        /// Shift for the holowinsky form.
        #[arg(long)]
        ell: Option<i64>,
    },
    /// The sum itself, over (x, x+y].
    Lhs {
        #[arg(long)]
        system: String,
        #[arg(long, default_value = "tau")]
        function: String,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        /// Only over primes n.
        #[arg(long)]
        primes: bool,
    },
    /// Ratio experiment from a config file; any `--key value` or
    /// `key=value` after it overrides the file.
    Ratio {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Only validate the hypotheses.
        #[arg(long)]
        check: bool,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Σ τ_m(n)τ_m(n+ℓ) against the shifted form over a range of ℓ.
    Sweep {
        #[arg(long)]
        x: f64,
        /// Shifts: `1..100, 128`.
        #[arg(long)]
        ell: String,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value = "exact")]
        mode: Mode,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        spread_ceiling: Option<f64>,
        /// Shifts for the mean of Δ(ℓ); defaults to the sweep range.
        #[arg(long)]
        mean_ell: Option<String>,
        #[arg(long)]
        mean_min: Option<f64>,
        #[arg(long)]
        mean_max: Option<f64>,
    },
    /// Numeric checks of the local lemmas, or of the sieve estimate.
    Lemmas {
        #[arg(long)]
        system: String,
        #[arg(long, default_value = "tau")]
        function: String,
        #[arg(long, default_value = "100,1000,10000")]
        z: String,
        #[arg(long, default_value = "float")]
        mode: Mode,
        #[arg(long, default_value_t = 1000.0)]
        ceiling: f64,
        #[arg(long, default_value_t = 10_000)]
        prime_bound: u64,
        #[arg(long, default_value_t = 20_736)]
        h1_budget: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Run the sieve check instead.
        #[arg(long)]
        sieve: bool,
        /// Sieve moduli: tuples separated by `;`, components by `,`.
        #[arg(long, default_value = "1;2;5;13")]
        a: String,
        #[arg(long, default_value = "10,50")]
        sieve_z: String,
        #[arg(long, default_value_t = 1e6)]
        x: f64,
        #[arg(long, default_value_t = 0.7)]
        y_exponent: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        lo: f64,
        #[arg(long, default_value_t = 10.0)]
        hi: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Inline system (`x; x+2`) or a file holding one.
    #[arg(long)]
    pub system: String,
    #[arg(long, default_value = "tau")]
    pub function: String,
    #[arg(long, default_value_t = 1e4)]
    pub x: f64,
    /// Defaults to x^α.
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long = "A")]
    pub a: Option<f64>,
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c0: f64,
    #[arg(long, default_value = "exact")]
    pub mode: Mode,
}

impl BoundArgs {
    fn system(&self) -> Result<FactoredSystem> {
        parse_system(&self.system)
    }

    fn function(&self, k: usize) -> Result<MultiplicativeFunction> {
        let d = BuiltinParams::default();
        let p = BuiltinParams { a: self.a.unwrap_or(d.a), b: self.b.unwrap_or(d.b), eps: self.eps, ..d };
        builtin(&self.function, k, p)
    }

    fn params(&self, f: &MultiplicativeFunction) -> BoundParams {
        BoundParams {
            alpha: self.alpha,
            delta: self.delta,
            a: self.a.unwrap_or(f.budget().a),
            b: self.b.unwrap_or(f.budget().b),
            eps: self.eps,
            x: self.x,
            y: self.y.unwrap_or_else(|| self.x.powf(self.alpha)),
            c0: self.c0,
        }
    }
}

/// Parses the arguments and runs; returns the process exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_of(&e))
        }
    }
}

pub fn exit_code_of(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Rho { poly, n, system, tuple } => cmd_rho(poly, n, system, tuple),
        Command::Disc { system } => cmd_disc(&system),
        Command::Delta(args) => cmd_delta(&args),
        Command::Bound { args, variant, ell } => cmd_bound(&args, &variant, ell),
        Command::Lhs { system, function, x, y, primes } => {
            let s = parse_system(&system)?;
            let f = builtin(&function, s.k(), BuiltinParams::default())?;
            let start = Instant::now();
            let v = if primes { prime_sum(&s, &f, x, y)? } else { short_sum(&s, &f, x, y)? };
            println!("{}", Value::Exact(v).render());
            eprintln!("{} ms", start.elapsed().as_millis());
            Ok(0)
        }
        Command::Ratio { config, check, overrides } => cmd_ratio(config, check, &overrides),
        Command::Sweep { x, ell, m, mode, output, format, spread_ceiling, mean_ell, mean_min, mean_max } => {
            let ells = parse_int_list(&ell)?;
            let mut report = sweep_shifted_pairs(x, &ells, m, mode)?;
            if let Some(range) = mean_ell {
                let ells = parse_int_list(&range)?;
                let lambda = builtin(&format!("tau_m:{m}"), 1, BuiltinParams::default())?;
                report.mean_delta = crate::harness::mean_delta(&ells, &lambda)?.to_f64();
            }
            write_report(&report, output, format.parse()?)?;
            let mut fails = Vec::new();
            if let Some(c) = spread_ceiling {
                for (v, s) in report.summary() {
                    if s.spread >= c {
                        fails.push(format!("[{v}] spread {:.4} ≥ ceiling {c}", s.spread));
                    }
                }
            }
            if let Some(mean) = report.mean_delta {
                eprintln!("mean Δ(ℓ) = {mean:.6}");
                if mean_min.is_some_and(|m| mean < m) || mean_max.is_some_and(|m| mean > m) {
                    fails.push(format!("mean Δ(ℓ) = {mean:.6} outside the accepted range"));
                }
            }
            Ok(report_failures(&fails))
        }
        Command::Lemmas {
            system,
            function,
            z,
            mode,
            ceiling,
            prime_bound,
            h1_budget,
            k,
            eps,
            sieve,
            a,
            sieve_z,
            x,
            y_exponent,
            alpha,
            lo,
            hi,
            output,
        } => {
            let s = parse_system(&system)?;
            let report = if sieve {
                let a = a
                    .split(';')
                    .map(|t| {
                        t.split(',')
                            .map(|c| c.trim().parse::<u128>().map_err(|_| Error::Parse(format!("bad modulus {c:?}"))))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let z = parse_int_list(&sieve_z)?.into_iter().map(|v| v.max(1) as u64).collect();
                let grid = SieveGrid { a, z, x, y: x.powf(y_exponent), alpha, lo, hi };
                verify_sieve_lemma(&s, &grid)?
            } else {
                let f = builtin(&function, s.k(), BuiltinParams { eps, ..BuiltinParams::default() })?;
                let cfg = LemmaConfig { zs: parse_f64_list(&z)?, mode, ceiling, prime_bound, h1_budget, k };
                verify_technical_lemmas(&s, &f, &cfg)?
            };
            write_lemmas(&report, output)?;
            let fails: Vec<String> = report
                .failures()
                .iter()
                .map(|r| format!("{} {}: ratio {} outside {}", r.lemma, r.param, r.ratio, r.limit))
                .collect();
            Ok(report_failures(&fails))
        }
    }
}

fn report_failures(fails: &[String]) -> u8 {
    for f in fails {
        eprintln!("FAIL {f}");
    }
    if fails.is_empty() {
        0
    } else {
        3
    }
}

fn cmd_rho(poly: Option<String>, n: Option<u128>, system: Option<String>, tuple: Option<String>) -> Result<u8> {
    match (poly, n, system, tuple) {
        (Some(p), Some(n), None, None) => {
            let q: IntPoly = p.parse()?;
            println!("{}", rho(&q, n)?);
        }
        (None, None, Some(s), Some(t)) => {
            let s = parse_system(&s)?;
            let t = t
                .split(',')
                .map(|c| c.trim().parse::<u128>().map_err(|_| Error::Parse(format!("bad tuple entry {c:?}"))))
                .collect::<Result<Vec<_>>>()?;
            println!("{} (mod {})", rho_hat(&s, &t)?, rho_hat_modulus_of(&t)?);
        }
        _ => return Err(Error::Parse("give either <poly> <n>, or --system and --tuple".into())),
    }
    Ok(0)
}

fn cmd_disc(system: &str) -> Result<u8> {
    let s = parse_system(system)?;
    println!("Q = {}", s.q());
    println!("D = {}", s.disc());
    println!("D* = {}", s.disc_star());
    println!("g = {}, g* = {}, k = {}, r = {}", s.g(), s.g_star(), s.k(), s.r());
    println!("fixed prime divisors = {:?}", fixed_prime_divisors(s.q()));
    Ok(0)
}

fn cmd_delta(args: &BoundArgs) -> Result<u8> {
    let s = args.system()?;
    let f = args.function(s.k())?;
    if s.k() == 1 && !s.disc().is_zero() {
        let (d, dt) = delta_d_k1(s.q(), &f)?;
        println!("Delta_D = {}", Value::Exact(d).render());
        println!("Delta~_D = {}", Value::Exact(dt).render());
    } else if !s.disc().is_zero() {
        println!("Delta_D = {}", Value::Exact(delta_d_general(&s, &f)?).render());
    }
    let gt = f.pushforward(s.exponents())?.minimal_g()?;
    let dstar = delta_dstar(&s, &gt)?;
    println!("Delta_D* = {}", Value::Exact(dstar.clone()).render());
    println!("Delta_D* ~ {}", approx(&Value::Exact(dstar)));
    println!("C = {}", Value::Exact(delta_dstar_exponent(&s, &gt)?).render());
    println!("prod (1+1/p)^C = {}", crate::scalar::render_f64(delta_dstar_ceiling(&s, &gt)?));
    Ok(0)
}

fn cmd_bound(args: &BoundArgs, variant: &str, ell: Option<i64>) -> Result<u8> {
    let variant: Variant = variant.parse()?;
    if variant == Variant::Holowinsky {
        let ell = ell.ok_or_else(|| Error::Validation(vec!["the holowinsky form needs --ell".into()]))?;
        let lambda = args.function(1)?;
        println!("{}", rhs_holowinsky(ell, &lambda, &lambda, args.x, args.mode)?);
        return Ok(0);
    }
    let s = args.system()?;
    let f = args.function(s.k())?;
    let params = args.params(&f);
    let check = params.validate(&s)?;
    for w in &check.warnings {
        eprintln!("warning: {w}");
    }
    let table = PrimeTable::new(&s, params.x_floor() as u64)?;
    let t = Some(&table);
    let v = match variant {
        Variant::Main => rhs_main(&s, &f, &params, t, args.mode)?,
        Variant::CorDisc => rhs_cor_disc(&s, &f, &params, t, args.mode)?,
        Variant::CorMult => rhs_cor_mult(&s, &f, &params, t, args.mode)?,
        Variant::Shiu => rhs_shiu(&s, &f, &params, t, args.mode)?,
        Variant::Primes => rhs_primes(&s, &f, &params, t, args.mode)?,
        Variant::Holowinsky => unreachable!(),
    };
    println!("{}", v.render());
    if let Value::Exact(_) = v {
        eprintln!("~ {}", approx(&v));
    }
    Ok(0)
}

fn approx(v: &Value) -> String {
    crate::scalar::render_f64(v.to_f64())
}

/// `--key value`, `--key=value` and `key=value` tokens.
fn parse_overrides(tokens: &[String]) -> Result<ConfigMap> {
    let mut text = String::new();
    let mut it = tokens.iter();
    while let Some(tok) = it.next() {
        if let Some((k, v)) = tok.split_once('=') {
            text.push_str(&format!("{k} = {v}\n"));
        } else if tok.starts_with("--") {
            match it.next() {
                Some(v) => text.push_str(&format!("{tok} = {v}\n")),
                None => text.push_str(&format!("{tok} = true\n")),
            }
        } else {
            return Err(Error::Parse(format!("unexpected argument {tok:?}")));
        }
    }
    parse_config_text(&text)
}

fn cmd_ratio(config: Option<PathBuf>, check: bool, overrides: &[String]) -> Result<u8> {
    let check_only = check || overrides.iter().any(|t| t == "--check");
    let overrides: Vec<String> = overrides.iter().filter(|t| *t != "--check").cloned().collect();
    let mut map = match &config {
        Some(p) => read_config_file(p)?,
        None => ConfigMap::new(),
    };
    map.extend(parse_overrides(&overrides)?);
    let cfg = ExperimentConfig::from_map(&map)?;
    let warnings = validate_experiment(&cfg)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if check_only {
        return Ok(0);
    }
    let report = run_ratio_experiment(&cfg)?;
    for f in &report.failures {
        eprintln!("row failed [{} x={} {}]: {}", f.family_param, f.x, f.variant, f.reason);
    }
    write_report(&report, cfg.output.clone(), cfg.format)?;
    for (v, s) in report.summary() {
        eprintln!("{v}: min {:.6} max {:.6} spread {:.4} over {} rows", s.min, s.max, s.spread, s.rows);
    }
    let code = report_failures(&threshold_violations(&cfg, &report));
    if code == 0 && !report.failures.is_empty() {
        return Ok(2);
    }
    Ok(code)
}

fn write_report(report: &RatioReport, output: Option<PathBuf>, format: Format) -> Result<()> {
    match output {
        Some(p) => emit(report, &p, format),
        None => {
            print!("{}", report.render(format)?);
            Ok(())
        }
    }
}

fn write_lemmas(report: &LemmaReport, output: Option<PathBuf>) -> Result<()> {
    let text = report.to_csv_string()?;
    match output {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_accept_both_spellings() {
        let toks: Vec<String> = ["--spread-ceiling", "20", "x=1e3", "--timing"].iter().map(|s| s.to_string()).collect();
        let m = parse_overrides(&toks).unwrap();
        assert_eq!(m["spread_ceiling"], "20");
        assert_eq!(m["x"], "1e3");
        assert_eq!(m["timing"], "true");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code_of(&Error::Validation(vec![])), 2);
        assert_eq!(exit_code_of(&Error::Io(std::io::Error::other("x"))), 1);
    }
}
