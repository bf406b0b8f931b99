//! Experiment configuration: flat `key = value` text, `#` comments, lists
//! separated by commas. Command-line flags use the same keys and win over
//! the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mfunc::{builtin, BuiltinParams, MultiplicativeFunction};
use crate::polyarith::{FactoredSystem, IntPoly};
use crate::scalar::Mode;

pub type ConfigMap = BTreeMap<String, String>;

/// Parses `key = value` lines.
pub fn parse_config_text(text: &str) -> Result<ConfigMap> {
    let mut map = ConfigMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
        map.insert(normalize_key(k), v.trim().to_string());
    }
    Ok(map)
}

/// `--spread-ceiling` and `spread_ceiling` name the same key.
pub fn normalize_key(k: &str) -> String {
    k.trim().trim_start_matches("--").replace('-', "_")
}

pub fn read_config_file(path: &Path) -> Result<ConfigMap> {
    parse_config_text(&std::fs::read_to_string(path)?)
}

/// A number, or a fraction `a/b` such as `2/3`.
pub fn parse_f64(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            Ok(a / b)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_f64)
        .collect()
}

/// Integers and inclusive ranges: `1..100, 128, 144`.
pub fn parse_int_list(s: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let bad = || Error::Parse(format!("bad list item {tok:?}"));
        match tok.split_once("..") {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().map_err(|_| bad())?;
                let b: i64 = b.trim().parse().map_err(|_| bad())?;
                out.extend(a..=b);
            }
            None => out.push(tok.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse(format!("expected true or false, got {s:?}"))),
    }
}

/// A system from text. Either the inline form `x; x+2` (pairwise coprime
/// polynomials, one per `Q_j`), or the block form
///
/// ```text
/// factor x
/// factor x+2
/// q 2 0
/// q 1 1
/// ```
///
/// listing the factors `R_h` and one exponent row per `Q_j`. A value that
/// names an existing file is read from it.
pub fn parse_system(spec: &str) -> Result<FactoredSystem> {
    let text = if !spec.contains('\n') && Path::new(spec.trim()).is_file() {
        std::fs::read_to_string(spec.trim())?
    } else {
        spec.to_string()
    };
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect();
    if lines.iter().any(|l| l.starts_with("factor ")) {
        let mut factors = Vec::new();
        let mut rows = Vec::new();
        for l in lines {
            if let Some(p) = l.strip_prefix("factor ") {
                factors.push(p.parse::<IntPoly>()?);
            } else if let Some(r) = l.strip_prefix("q ") {
                let row = r
                    .split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent {t:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            } else {
                return Err(Error::Parse(format!("unexpected line {l:?} in system")));
            }
        }
        if rows.is_empty() {
            rows = (0..factors.len())
                .map(|j| (0..factors.len()).map(|h| u32::from(h == j)).collect())
                .collect();
        }
        return FactoredSystem::new(factors, rows);
    }
    let polys = lines
        .join(";")
        .split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(IntPoly::from_str)
        .collect::<Result<Vec<_>>>()?;
    FactoredSystem::coprime(polys)
}

/// Which right-hand side to compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Main,
    CorDisc,
    CorMult,
    Shiu,
    Holowinsky,
    Primes,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Main,
        Variant::CorDisc,
        Variant::CorMult,
        Variant::Shiu,
        Variant::Holowinsky,
        Variant::Primes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Main => "main",
            Variant::CorDisc => "cor-disc",
            Variant::CorMult => "cor-mult",
            Variant::Shiu => "shiu",
            Variant::Holowinsky => "holowinsky",
            Variant::Primes => "primes",
        }
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown variant {s:?}")))
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => Err(Error::Parse(format!("format must be csv or jsonl, got {s:?}"))),
        }
    }
}

/// The systems an experiment runs over.
#[derive(Debug, Clone)]
pub enum Family {
    /// `(X, X+ℓ)` for each ℓ.
    Shifted(Vec<i64>),
    /// Explicit systems with their labels.
    Systems(Vec<(String, FactoredSystem)>),
    /// `X² + c` for each c.
    Quadratic(Vec<i64>),
}

impl Family {
    /// `(label, system)` in run order.
    pub fn members(&self) -> Result<Vec<(String, FactoredSystem)>> {
        match self {
            Family::Shifted(ells) => sorted_unique(ells)
                .iter()
                .map(|&l| Ok((l.to_string(), FactoredSystem::shifted_pair(l)?)))
                .collect(),
            Family::Systems(s) => Ok(s.clone()),
            Family::Quadratic(cs) => sorted_unique(cs)
                .iter()
                .map(|&c| {
                    let q = IntPoly::from_i64s(&[c, 0, 1]);
                    Ok((c.to_string(), FactoredSystem::single(q)?))
                })
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Family::Shifted(v) => v.is_empty(),
            Family::Systems(v) => v.is_empty(),
            Family::Quadratic(v) => v.is_empty(),
        }
    }
}

fn sorted_unique(v: &[i64]) -> Vec<i64> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Everything a ratio experiment needs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub family: Family,
    pub function: String,
    pub xs: Vec<f64>,
    /// `y = x^{y_exponent}`; defaults to α.
    pub y_exponent: Option<f64>,
    pub alpha: f64,
    pub delta: f64,
    /// Class parameters; default to the budget of the function.
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub eps: f64,
    pub c0: f64,
    pub variants: Vec<Variant>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub mode: Mode,
    pub timing: bool,
    /// Largest accepted max/min ratio per variant.
    pub spread_ceiling: Option<f64>,
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: Family::Systems(Vec::new()),
            function: "tau".into(),
            xs: vec![1e4],
            y_exponent: None,
            alpha: 0.5,
            delta: 0.5,
            a: None,
            b: None,
            eps: 1e-3,
            c0: 1.0,
            variants: vec![Variant::Main],
            output: None,
            format: Format::Csv,
            seed: 0,
            mode: Mode::Exact,
            timing: false,
            spread_ceiling: None,
            ratio_min: None,
            ratio_max: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        let get = |k: &str| map.get(k).map(String::as_str);
        let family = get("family").unwrap_or(if map.contains_key("ell") {
            "shifted"
        } else if map.contains_key("c") {
            "quadratic"
        } else {
            "systems"
        });
        c.family = match family {
            "shifted" => Family::Shifted(parse_int_list(get("ell").unwrap_or(""))?),
            "quadratic" => Family::Quadratic(parse_int_list(get("c").unwrap_or(""))?),
            "systems" => {
                let mut v = Vec::new();
                for s in get("systems")
                    .or(get("system"))
                    .unwrap_or("")
                    .split('|')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                {
                    v.push((s.to_string(), parse_system(s)?));
                }
                Family::Systems(v)
            }
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        };
        for (k, v) in map {
            match k.as_str() {
                "family" | "ell" | "c" | "systems" | "system" | "config" => {}
                "function" => c.function = v.trim().to_string(),
                "x" => c.xs = parse_f64_list(v)?,
                "y_exponent" => c.y_exponent = Some(parse_f64(v)?),
                "alpha" => c.alpha = parse_f64(v)?,
                "delta" => c.delta = parse_f64(v)?,
                "a" | "A" => c.a = Some(parse_f64(v)?),
                "b" | "B" => c.b = Some(parse_f64(v)?),
                "eps" => c.eps = parse_f64(v)?,
                "c0" => c.c0 = parse_f64(v)?,
                "variants" => {
                    c.variants = v
                        .split(',')
                        .filter(|t| !t.trim().is_empty())
                        .map(Variant::from_str)
                        .collect::<Result<_>>()?
                }
                "output" => c.output = Some(PathBuf::from(v.trim())),
                "format" => c.format = v.parse()?,
                "seed" => {
                    c.seed = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad seed {v:?}")))?
                }
                "mode" => c.mode = v.trim().parse()?,
                "timing" => c.timing = parse_bool(v)?,
                "spread_ceiling" => c.spread_ceiling = Some(parse_f64(v)?),
                "ratio_min" => c.ratio_min = Some(parse_f64(v)?),
                "ratio_max" => c.ratio_max = Some(parse_f64(v)?),
                other => return Err(Error::Parse(format!("unknown configuration key {other:?}"))),
            }
        }
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.xs.is_empty() {
            errs.push("empty x grid".to_string());
        }
        if self.variants.is_empty() {
            errs.push("no variants selected".to_string());
        }
        if self.variants.contains(&Variant::Holowinsky) && !matches!(self.family, Family::Shifted(_)) {
            errs.push("the holowinsky variant needs the shifted family".to_string());
        }
        if let Family::Shifted(ells) = &self.family {
            if ells.contains(&0) {
                errs.push("ℓ = 0 gives a repeated factor".to_string());
            }
        }
        if let Err(e) = self.function_of_arity(1) {
            errs.push(e.to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    /// Built-in parameters; `random` without a seed takes the config seed.
    pub fn builtin_params(&self) -> BuiltinParams {
        BuiltinParams {
            a: self.a.unwrap_or(BuiltinParams::default().a),
            b: self.b.unwrap_or(BuiltinParams::default().b),
            eps: self.eps,
            ..BuiltinParams::default()
        }
    }

    pub fn function_of_arity(&self, k: usize) -> Result<MultiplicativeFunction> {
        let name = if self.function == "random" {
            format!("random:{}", self.seed)
        } else {
            self.function.clone()
        };
        builtin(&name, k, self.builtin_params())
    }

    /// `x^e` rounded to 12 digits, so that `(10^6)^{2/3}` is 10^4 and not
    /// just below it.
    pub fn y_for(&self, x: f64) -> f64 {
        crate::scalar::round12(x.powf(self.y_exponent.unwrap_or(self.alpha)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_files_and_lists() {
        let map = parse_config_text(
            "# shifted pairs\nfamily = shifted\nell = 1..3, 8\nx = 1e3, 1e4\ny-exponent = 2/3\nvariants = holowinsky\n",
        )
        .unwrap();
        let c = ExperimentConfig::from_map(&map).unwrap();
        assert!(matches!(&c.family, Family::Shifted(v) if v == &[1, 2, 3, 8]));
        assert_eq!(c.xs, vec![1e3, 1e4]);
        assert!((c.y_exponent.unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let mut bad = map.clone();
        bad.insert("variants".into(), "main,nonsense".into());
        assert!(ExperimentConfig::from_map(&bad).is_err());
        let mut hol = map;
        hol.insert("family".into(), "quadratic".into());
        hol.insert("c".into(), "1..3".into());
        assert!(matches!(ExperimentConfig::from_map(&hol), Err(Error::Validation(_))));
    }

    #[test]
    fn system_forms() {
        let s = parse_system("x; x+2").unwrap();
        assert_eq!((s.k(), s.r()), (2, 2));
        let b = parse_system("factor x\nfactor x+2\nq 2 0\nq 1 1\n").unwrap();
        assert_eq!((b.k(), b.r(), b.g()), (2, 2, 4));
        assert!(parse_system("x; x").is_err());
    }
}
