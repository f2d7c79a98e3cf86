//! Family generation, experiment orchestration and report emission.

pub mod config;
pub mod experiment;
pub mod generate;
pub mod report;

pub use config::{ExperimentConfig, FamilyKind, ProfileSpec};
pub use experiment::{run_experiment, run_family, run_trial, Bundle, Summary, TrialOutcome, TrialRecord, TrialStatus};
pub use generate::{generate_adversarial_family, generate_family, generate_zygmund_family};
pub use report::emit_report;
