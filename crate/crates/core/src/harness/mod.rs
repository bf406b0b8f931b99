//! Experiment runner: ratio experiments across families of systems, the
//! shifted-pair sweep, lemma suites, and report output.

pub mod config;
pub mod lemmas;
pub mod ratio;
pub mod report;

pub use config::{parse_system, ExperimentConfig, Family, Format, Variant};
pub use lemmas::{verify_sieve_lemma, verify_technical_lemmas, LemmaConfig, LemmaReport, SieveGrid};
pub use ratio::{mean_delta, run_ratio_experiment, sweep_shifted_pairs, threshold_violations};
pub use report::{emit, parse, RatioReport, ReportRow};
