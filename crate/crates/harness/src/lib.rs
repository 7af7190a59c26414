//! Experiment orchestration for hybrid cloud-RAN resource allocation:
//! benchmark schemes, parameter sweeps, clustering of large deployments,
//! a brute-force oracle for tiny instances and result files.

pub mod cluster;
pub mod config;
pub mod oracle;
pub mod output;
pub mod scheme;
pub mod sweep;

use hcran_channel::ChannelError;
use hcran_core::{ModelError, SolverError};
use thiserror::Error;

pub use cluster::{cluster_and_solve, sub_problem, ClusterRun, ClusteredRun};
pub use config::{ExperimentConfig, OutputConfig, OutputFormat, Preset, Sweep, SweepVar};
pub use oracle::{brute_force_oracle, OracleResult};
pub use output::{emit_results, read_csv};
pub use scheme::{run_scheme, Scheme, SchemeRun};
pub use sweep::{run_sweep, DrawRecord, ResultRow, SweepTable};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("scheme not applicable: {0}")]
    SchemeMismatch(String),
    #[error("oracle refused: {0}")]
    OracleLimits(String),
    #[error("dominance check failed: {0}")]
    Dominance(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("nothing to emit: {0}")]
    EmptyTable(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
