//! Configuration, seeded runs, metrics persistence and agent comparison.

pub mod compare;
pub mod config;
pub mod experiment;
pub mod kpi;
pub mod metrics;

pub use compare::{compare, CompareEntry, Comparison, LongRecord};
pub use config::{
    load_config, load_config_str, resolve_seed, AgentConfig, ExperimentConfig, RewardConfig, RunConfig,
    DEFAULTS_TOML, SEED_ENV,
};
pub use experiment::{
    build_agent, evaluate, read_snapshots, run_experiment, run_seeds, seed_dir, seed_streams, write_json,
    RunArtifacts, RunSummary, Session, Snapshot, CHECKPOINT_FILE, EVAL_FILE, METRICS_FILE, SNAPSHOT_FILE,
    SUMMARY_FILE,
};
pub use kpi::{KpiAggregate, Kpis, MeanStd};
pub use metrics::{fmt_sig9, read_metrics, write_metrics, EpochMetrics, MetricsWriter, CSV_HEADER};
