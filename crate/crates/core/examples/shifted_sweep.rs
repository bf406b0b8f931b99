//! sum_{n<=x} tau(n) tau(n+l) against the shifted-pair bound, l = 1..24.

use majorant_lab::harness::sweep_shifted_pairs;
use majorant_lab::scalar::Mode;

fn main() -> majorant_lab::Result<()> {
    let ells: Vec<i64> = (1..=24).collect();
    let report = sweep_shifted_pairs(2e4, &ells, 2, Mode::Exact)?;
    for row in &report.rows {
        println!(
            "{:>6}  lhs {:>10}  ratio {:.4}  delta {:.4}",
            row.family_param,
            row.lhs.render(),
            row.ratio.to_f64(),
            row.delta_factor.to_f64()
        );
    }
    if let Some(m) = report.mean_delta {
        println!("mean delta over the sweep: {m:.4}");
    }
    Ok(())
}
