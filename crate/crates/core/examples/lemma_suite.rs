//! Numerical checks of the local and truncation estimates for (X, X+2).

use majorant_lab::harness::{verify_technical_lemmas, LemmaConfig};
use majorant_lab::mfunc::tau_m;
use majorant_lab::FactoredSystem;

fn main() -> majorant_lab::Result<()> {
    let s = FactoredSystem::shifted_pair(2)?;
    let f = tau_m(2, 2, 1e-3)?;
    let cfg = LemmaConfig { zs: vec![1e2, 1e3], prime_bound: 2000, ..LemmaConfig::default() };
    let report = verify_technical_lemmas(&s, &f, &cfg)?;
    for r in &report.rows {
        println!(
            "{:<4} {:<28} {:>12.4}  {}  {}",
            r.lemma,
            r.param,
            r.ratio.to_f64(),
            r.limit,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
