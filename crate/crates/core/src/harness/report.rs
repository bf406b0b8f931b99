//! Ratio reports and their CSV / JSON-lines form.
//!
//! CSV columns, in order: `family_param, x, y, variant, lhs, rhs, ratio,
//! delta_factor, millis`. Exact values are written as `n/d`, floats with 12
//! significant digits; `millis` is empty unless timing was requested.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::harness::config::Format;
use crate::scalar::{self, parse_value, render_f64, round12, Value};

pub const CSV_HEADER: [&str; 9] = [
    "family_param",
    "x",
    "y",
    "variant",
    "lhs",
    "rhs",
    "ratio",
    "delta_factor",
    "millis",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub family_param: String,
    pub x: f64,
    pub y: f64,
    pub variant: String,
    pub lhs: Value,
    pub rhs: Value,
    pub ratio: Value,
    pub delta_factor: Value,
    pub millis: Option<u64>,
}

/// Floats are kept at the precision they are printed with, so that a
/// written report parses back to the same rows.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Float(t) => Value::Float(TwoFloat::from(round12(t.hi() + t.lo()))),
        exact => exact,
    }
}

/// `lhs / rhs`, exact when both sides are.
pub fn ratio_of(lhs: &Value, rhs: &Value) -> Value {
    match (lhs, rhs) {
        (Value::Exact(a), Value::Exact(b)) if !b.is_zero() => Value::Exact(a / b),
        _ => Value::Float(scalar::div(lhs.to_twofloat(), rhs.to_twofloat())),
    }
}

impl ReportRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        family_param: impl Into<String>,
        x: f64,
        y: f64,
        variant: impl Into<String>,
        lhs: Value,
        rhs: Value,
        delta_factor: Value,
        millis: Option<u64>,
    ) -> Self {
        let ratio = ratio_of(&lhs, &rhs);
        Self {
            family_param: family_param.into(),
            x: round12(x),
            y: round12(y),
            variant: variant.into(),
            lhs: normalize(lhs),
            rhs: normalize(rhs),
            ratio: normalize(ratio),
            delta_factor: normalize(delta_factor),
            millis,
        }
    }

    fn fields(&self) -> [String; 9] {
        [
            self.family_param.clone(),
            render_number(self.x),
            render_number(self.y),
            self.variant.clone(),
            self.lhs.render(),
            self.rhs.render(),
            self.ratio.render(),
            self.delta_factor.render(),
            self.millis.map(|m| m.to_string()).unwrap_or_default(),
        ]
    }

    fn from_fields(f: &[String]) -> Result<Self> {
        if f.len() != CSV_HEADER.len() {
            return Err(Error::Parse(format!("expected {} fields, got {}", CSV_HEADER.len(), f.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
        };
        Ok(Self {
            family_param: f[0].clone(),
            x: num(&f[1])?,
            y: num(&f[2])?,
            variant: f[3].clone(),
            lhs: parse_value(&f[4])?,
            rhs: parse_value(&f[5])?,
            ratio: parse_value(&f[6])?,
            delta_factor: parse_value(&f[7])?,
            millis: if f[8].is_empty() {
                None
            } else {
                Some(f[8].parse().map_err(|_| Error::Parse(format!("bad millis {:?}", f[8])))?)
            },
        })
    }
}

/// Integers below 10^15 print in full, everything else with 12 digits.
pub fn render_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        render_f64(x)
    }
}

/// A row that could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowFailure {
    pub family_param: String,
    pub x: f64,
    pub variant: String,
    pub reason: String,
}

/// Ratio range of one variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    pub rows: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RatioReport {
    pub rows: Vec<ReportRow>,
    pub failures: Vec<RowFailure>,
    /// Mean of Δ(ℓ) when the report comes from a shifted-pair sweep.
    pub mean_delta: Option<f64>,
}

impl RatioReport {
    /// Per-variant `(min, max, max/min)` over rows with positive ratio.
    pub fn summary(&self) -> BTreeMap<String, VariantSummary> {
        let mut out: BTreeMap<String, VariantSummary> = BTreeMap::new();
        for row in &self.rows {
            let r = row.ratio.to_f64();
            if !(r.is_finite() && r > 0.0) {
                continue;
            }
            let e = out.entry(row.variant.clone()).or_insert(VariantSummary {
                min: f64::INFINITY,
                max: 0.0,
                spread: 1.0,
                rows: 0,
            });
            e.min = e.min.min(r);
            e.max = e.max.max(r);
            e.spread = e.max / e.min;
            e.rows += 1;
        }
        out
    }

    /// Rows whose ratio is not finite and positive.
    pub fn degenerate_rows(&self) -> Vec<&ReportRow> {
        self.rows
            .iter()
            .filter(|r| {
                let v = r.ratio.to_f64();
                !(v.is_finite() && v > 0.0)
            })
            .collect()
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.write_record(row.fields())?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != CSV_HEADER {
            return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let fields: Vec<String> = rec.iter().map(str::to_string).collect();
            rows.push(ReportRow::from_fields(&fields)?);
        }
        Ok(Self { rows, ..Self::default() })
    }

    /// One JSON object per row, then one per failure and a closing summary.
    pub fn to_jsonl_string(&self) -> Result<String> {
        let mut out = String::new();
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            for (k, v) in CSV_HEADER.iter().zip(row.fields()) {
                obj.insert((*k).to_string(), serde_json::Value::String(v));
            }
            obj.insert("kind".into(), "row".into());
            out.push_str(&serde_json::to_string(&obj)?);
            out.push('\n');
        }
        for f in &self.failures {
            let mut v = serde_json::to_value(f)?;
            v["kind"] = "failure".into();
            out.push_str(&serde_json::to_string(&v)?);
            out.push('\n');
        }
        let summary = serde_json::json!({
            "kind": "summary",
            "variants": self.summary(),
            "mean_delta": self.mean_delta,
        });
        out.push_str(&serde_json::to_string(&summary)?);
        out.push('\n');
        Ok(out)
    }

    pub fn from_jsonl_str(text: &str) -> Result<Self> {
        let mut rep = RatioReport::default();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let v: serde_json::Value = serde_json::from_str(line)?;
            match v["kind"].as_str() {
                Some("row") => {
                    let fields = CSV_HEADER
                        .iter()
                        .map(|k| v[*k].as_str().unwrap_or("").to_string())
                        .collect::<Vec<_>>();
                    rep.rows.push(ReportRow::from_fields(&fields)?);
                }
                Some("failure") => rep.failures.push(serde_json::from_value(v)?),
                Some("summary") => rep.mean_delta = v["mean_delta"].as_f64(),
                _ => return Err(Error::Parse(format!("unknown record {line:?}"))),
            }
        }
        Ok(rep)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv_string(),
            Format::Jsonl => self.to_jsonl_string(),
        }
    }
}

/// Writes the report to `path`.
pub fn emit(report: &RatioReport, path: &Path, format: Format) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(report.render(format)?.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Reads a report written by [`emit`].
pub fn parse(path: &Path, format: Format) -> Result<RatioReport> {
    let mut text = String::new();
    for line in BufReader::new(File::open(path)?).lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    match format {
        Format::Csv => RatioReport::from_csv_str(&text),
        Format::Jsonl => RatioReport::from_jsonl_str(&text),
    }
}
