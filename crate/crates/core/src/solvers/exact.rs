use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::{Scratch, StorageConfig, TaskContext};
use crate::model::{NetworkInstance, SolveResult};

use super::{check_levels, Finish, SolveError, SolverKind};

/// Default cap on `n_agents * n_levels` for exhaustive search (about 16.7M evaluations).
pub const DEFAULT_MAX_BITS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExactConfig {
    /// Refuse instances with more than this many storage bits.
    pub max_bits: u32,
    /// Evaluate candidates on the rayon pool.
    pub parallel: bool,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self { max_bits: DEFAULT_MAX_BITS, parallel: true }
    }
}

#[inline]
fn better(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    // Lowest cost, then lowest mask.
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => {
            if a.1 <= b.1 {
                a
            } else {
                b
            }
        }
    }
}

/// Global optimum over all `2^(N*L)` storage configurations of task `k`.
///
/// The winner is the lowest-cost configuration, ties broken by the smallest
/// bitmask, so the result does not depend on evaluation order.
pub fn solve_exact(inst: &NetworkInstance, k: usize, cfg: &ExactConfig) -> Result<SolveResult, SolveError> {
    check_levels(inst)?;
    let bits = inst.n_agents * inst.n_levels;
    if cfg.max_bits > 63 {
        return Err(SolveError::InvalidConfig("max_bits must be at most 63".into()));
    }
    if bits > cfg.max_bits as usize {
        return Err(SolveError::GuardExceeded { bits, max_bits: cfg.max_bits });
    }
    let started = Instant::now();
    let ctx = TaskContext::new(inst, k);
    let total: u64 = 1 << bits;
    let (n, levels) = (inst.n_agents, inst.n_levels);

    let eval = |state: &mut (Scratch, StorageConfig), mask: u64| {
        state.1.set_mask(mask);
        (ctx.evaluate(&state.1, &mut state.0).network_loss, mask)
    };
    let init = || (Scratch::default(), StorageConfig::empty(n, levels));
    let (_, best_mask) = if cfg.parallel {
        (0..total)
            .into_par_iter()
            .map_init(init, eval)
            .reduce(|| (f64::INFINITY, u64::MAX), better)
    } else {
        let mut state = init();
        (0..total).fold((f64::INFINITY, u64::MAX), |acc, m| better(acc, eval(&mut state, m)))
    };

    let storage = StorageConfig::from_mask(best_mask, n, levels);
    Ok(Finish { inst, ctx: &ctx, k, started }.result(SolverKind::Exact, &storage, 1, total, Vec::new()))
}
