use std::time::Instant;

use crate::allocation::{StorageConfig, TaskContext};
use crate::model::{NetworkInstance, SolveResult};

use super::{Finish, SolverKind};

/// Every agent stores every chunk; nothing is ever transmitted.
pub fn solve_fully_store(inst: &NetworkInstance, k: usize) -> SolveResult {
    let started = Instant::now();
    let ctx = TaskContext::new(inst, k);
    let storage = StorageConfig::full(inst.n_agents, inst.n_levels);
    Finish { inst, ctx: &ctx, k, started }.result(SolverKind::FullyStore, &storage, 1, 1, Vec::new())
}
