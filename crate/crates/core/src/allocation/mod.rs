//! Network metrics, allocation constraints and the closed-form derivation of
//! exploitation and transmission policies from a fixed storage configuration.
//!
//! Tasks are independent: every function here works on a single task `k`,
//! and totals over tasks are plain sums.

mod constraints;
mod context;
mod metrics;
mod prop1;
mod storage;

pub use constraints::{check_constraints, Constraint, ConstraintViolation};
pub use context::{Derivation, Scratch, TaskContext};
pub use metrics::{alignment_loss, network_loss, storage_cost, task_metrics, transmission_overhead};
pub use prop1::{derive_policies_prop1, derive_with_context, min_transmission, Prop1Result};
pub use storage::{StorageConfig, MAX_LEVELS};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum AllocError {
    #[error("link {tx}->{rx} does not select exactly one level")]
    MalformedExploit { tx: usize, rx: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}
