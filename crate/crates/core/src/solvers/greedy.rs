use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::allocation::{Scratch, StorageConfig, TaskContext};
use crate::model::{NetworkInstance, SolveResult};

use super::{check_levels, Finish, SolveError, SolverKind};

const MAX_ROW_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GreedyConfig {
    pub max_sweeps: u32,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self { max_sweeps: 100 }
    }
}

/// Agent-by-agent local search over storage rows, starting from fully-store.
///
/// For each agent in ascending order, all `2^L` rows are tried with the
/// other agents fixed and the best one is kept if it strictly improves the
/// network loss. Stops after a sweep with no change or after `max_sweeps`.
/// `iterations` counts sweeps; `trace` holds the loss after every accepted move,
/// starting with the fully-store loss.
pub fn solve_greedy(inst: &NetworkInstance, k: usize, cfg: &GreedyConfig) -> Result<SolveResult, SolveError> {
    check_levels(inst)?;
    if inst.n_levels > MAX_ROW_BITS {
        return Err(SolveError::InvalidConfig(format!(
            "greedy enumerates 2^L rows per agent; L = {} exceeds {MAX_ROW_BITS}",
            inst.n_levels
        )));
    }
    if cfg.max_sweeps == 0 {
        return Err(SolveError::InvalidConfig("max_sweeps must be at least 1".into()));
    }
    let started = Instant::now();
    let ctx = TaskContext::new(inst, k);
    let mut scratch = Scratch::default();
    let mut storage = StorageConfig::full(inst.n_agents, inst.n_levels);
    let rows = 1u32 << inst.n_levels;

    let mut current = ctx.evaluate(&storage, &mut scratch).network_loss;
    let mut evaluations = 1u64;
    let mut trace = vec![current];
    let mut sweeps = 0u64;

    for _ in 0..cfg.max_sweeps {
        sweeps += 1;
        let mut changed = false;
        for i in 0..inst.n_agents {
            let incumbent = storage.row(i);
            let mut best = (current, incumbent);
            for row in 0..rows {
                if row == incumbent {
                    continue;
                }
                storage.set_row(i, row);
                let cost = ctx.evaluate(&storage, &mut scratch).network_loss;
                evaluations += 1;
                if cost < best.0 {
                    best = (cost, row);
                }
            }
            storage.set_row(i, best.1);
            if best.1 != incumbent {
                current = best.0;
                trace.push(current);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    Ok(Finish { inst, ctx: &ctx, k, started }.result(SolverKind::Greedy, &storage, sweeps, evaluations, trace))
}
