//! Storage-space search for the allocation problem.
//!
//! Every solver only chooses the storage configuration; exploitation and
//! transmission follow from the closed-form derivation in [`crate::allocation`].

mod baseline;
mod exact;
mod ga;
mod greedy;

pub use baseline::solve_fully_store;
pub use exact::{solve_exact, ExactConfig, DEFAULT_MAX_BITS};
pub use ga::{solve_ga, GaConfig};
pub use greedy::{solve_greedy, GreedyConfig};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocation::{derive_with_context, StorageConfig, TaskContext, MAX_LEVELS};
use crate::model::{ModelError, NetworkInstance, SolveResult};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("exhaustive search needs {bits} bits but the guard allows {max_bits}; raise --max-bits or use another solver")]
    GuardExceeded { bits: usize, max_bits: u32 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown solver `{0}` (expected exact, greedy, ga or fully-store)")]
    UnknownSolver(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Exact,
    Greedy,
    #[serde(alias = "genetic")]
    Ga,
    FullyStore,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [SolverKind::Exact, SolverKind::Greedy, SolverKind::Ga, SolverKind::FullyStore];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Greedy => "greedy",
            SolverKind::Ga => "ga",
            SolverKind::FullyStore => "fully-store",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = SolveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" | "optimal" => Ok(SolverKind::Exact),
            "greedy" => Ok(SolverKind::Greedy),
            "ga" | "genetic" => Ok(SolverKind::Ga),
            "fully-store" | "fully_store" => Ok(SolverKind::FullyStore),
            other => Err(SolveError::UnknownSolver(other.to_string())),
        }
    }
}

/// Per-solver settings; missing sections take their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub exact: ExactConfig,
    pub greedy: GreedyConfig,
    pub ga: GaConfig,
}

/// Runs one solver on task `k`.
pub fn solve_task(inst: &NetworkInstance, k: usize, kind: SolverKind, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    inst.check_task(k)?;
    match kind {
        SolverKind::Exact => solve_exact(inst, k, &cfg.exact),
        SolverKind::Greedy => solve_greedy(inst, k, &cfg.greedy),
        SolverKind::Ga => solve_ga(inst, k, &cfg.ga),
        SolverKind::FullyStore => Ok(solve_fully_store(inst, k)),
    }
}

/// Validates the instance, solves every task independently and sums the results.
pub fn solve_all(inst: &NetworkInstance, kind: SolverKind, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    let violations = inst.validate();
    if !violations.is_empty() {
        return Err(ModelError::Invalid(violations).into());
    }
    let parts = (0..inst.n_tasks)
        .map(|k| solve_task(inst, k, kind, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SolveResult::merge(parts).expect("instance has at least one task"))
}

fn check_levels(inst: &NetworkInstance) -> Result<(), SolveError> {
    if inst.n_levels > MAX_LEVELS {
        return Err(SolveError::InvalidConfig(format!(
            "{} levels exceed the supported maximum of {MAX_LEVELS}",
            inst.n_levels
        )));
    }
    Ok(())
}

/// Materializes the policy of the chosen storage and packages the result.
/// Reported metrics are recomputed from the policy arrays.
struct Finish<'a> {
    inst: &'a NetworkInstance,
    ctx: &'a TaskContext,
    k: usize,
    started: Instant,
}

impl Finish<'_> {
    fn result(
        self,
        kind: SolverKind,
        storage: &StorageConfig,
        iterations: u64,
        evaluations: u64,
        trace: Vec<f64>,
    ) -> SolveResult {
        let derived = derive_with_context(self.inst, self.ctx, storage, self.k);
        SolveResult {
            solver: kind.name().to_string(),
            tasks: vec![self.k],
            policies: vec![derived.policy],
            metrics: derived.metrics,
            iterations,
            evaluations,
            trace,
            wall_time: self.started.elapsed(),
        }
    }
}
