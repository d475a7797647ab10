//! Shared domain types: the network instance, per-task policies and reports.

mod instance;
mod policy;
mod report;

pub use instance::{NetworkInstance, Violation, Weights, FREQ_SUM_TOLERANCE};
pub use policy::AllocationPolicy;
pub use report::{inf_as_null, MetricsReport, SolveResult, INFEASIBLE};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{what} index {index} out of range (have {len})")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("instance violates {} invariant(s): {}", .0.len(), join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
