//! A ratio experiment over X^2 + c, written as CSV to stdout.

use majorant_lab::harness::config::parse_config_text;
use majorant_lab::harness::config::Format;
use majorant_lab::harness::{run_ratio_experiment, threshold_violations, ExperimentConfig};

fn main() -> majorant_lab::Result<()> {
    let text = "family = quadratic\nc = 1..8\nfunction = tau\nx = 1e4, 1e5\n\
                variants = main, cor-disc\nmode = float\nspread_ceiling = 10\n";
    let config = ExperimentConfig::from_map(&parse_config_text(text)?)?;
    let report = run_ratio_experiment(&config)?;
    print!("{}", report.render(Format::Csv)?);
    for (variant, s) in report.summary() {
        eprintln!("{variant}: {s:?}");
    }
    for v in threshold_violations(&config, &report) {
        eprintln!("violation: {v}");
    }
    Ok(())
}
