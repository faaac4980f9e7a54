//! Experiment orchestration: configuration files, the run pipeline,
//! reports, cross-report ranking, and the toy dataset generator.

mod config;
mod report;
mod run;
mod toy;

pub use config::{
    load_config, ExperimentConfig, Method, SearchOverrides, SplitFractions,
};
pub use report::{
    compare, mean, median, ChosenStrategy, DatasetSummary, EnvironmentFingerprint, MethodRank,
    RankTable, RunReport, ScoreSummary, SeedOutcome, REPORT_VERSION,
};
pub use run::{run, RunOutcome, TestAudit};
pub use toy::{make_toy, write_toy_csv, ToyConfig};
