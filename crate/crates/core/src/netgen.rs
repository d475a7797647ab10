//! Random network instances under the normalized protocol: uniform frequency
//! rows summing to one, unit chunk sizes and log-normal link rates.
//!
//! Randomness comes from ChaCha8 seeded with the configured seed. Each kind
//! of quantity draws from its own stream of that generator, so adding draws
//! to one quantity never shifts the values of another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{NetworkInstance, Weights};

const FREQ_STREAM: u64 = 1;
const RATE_STREAM: u64 = 2;
const ALIGN_STREAM: u64 = 3;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}

/// Where the per-task alignment-loss tables come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum AlignTableMode {
    /// `J_A[k][l] = a_k * decay^(l+1)` with `a_k ~ U[base_min, base_max]`.
    SyntheticDecay {
        #[serde(default = "default_base_min")]
        base_min: f64,
        #[serde(default = "default_base_max")]
        base_max: f64,
        #[serde(default = "default_decay")]
        decay: f64,
    },
    /// One table per task, typically exported by the distiller.
    DistillerFed { tables: Vec<Vec<f64>> },
}

fn default_base_min() -> f64 {
    0.5
}
fn default_base_max() -> f64 {
    1.0
}
fn default_decay() -> f64 {
    0.6
}
fn default_tasks() -> usize {
    4
}
fn default_levels() -> usize {
    5
}

impl Default for AlignTableMode {
    fn default() -> Self {
        AlignTableMode::SyntheticDecay {
            base_min: default_base_min(),
            base_max: default_base_max(),
            decay: default_decay(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n_agents: usize,
    #[serde(default = "default_tasks")]
    pub n_tasks: usize,
    #[serde(default = "default_levels")]
    pub n_levels: usize,
    pub seed: u64,
    #[serde(default)]
    pub align: AlignTableMode,
    #[serde(default)]
    pub weights: Weights,
}

impl GenConfig {
    pub fn new(n_agents: usize, n_tasks: usize, n_levels: usize, seed: u64) -> Self {
        Self {
            n_agents,
            n_tasks,
            n_levels,
            seed,
            align: AlignTableMode::default(),
            weights: Weights::default(),
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidConfig(m));
        if self.n_agents < 2 {
            return bad(format!("n_agents must be at least 2, got {}", self.n_agents));
        }
        if self.n_tasks == 0 || self.n_levels == 0 {
            return bad("n_tasks and n_levels must be positive".into());
        }
        for w in [self.weights.eta_a, self.weights.eta_t, self.weights.eta_s] {
            if !(0.0..=1.0).contains(&w) {
                return bad(format!("weights must lie in [0, 1], got {w}"));
            }
        }
        match &self.align {
            AlignTableMode::SyntheticDecay { base_min, base_max, decay } => {
                if !(*decay > 0.0 && *decay < 1.0) {
                    return bad(format!("decay must lie in (0, 1), got {decay}"));
                }
                if !(base_min.is_finite() && base_max.is_finite() && *base_min > 0.0 && base_min <= base_max) {
                    return bad(format!("need 0 < base_min <= base_max, got [{base_min}, {base_max}]"));
                }
            }
            AlignTableMode::DistillerFed { tables } => {
                if tables.len() != self.n_tasks {
                    return bad(format!("{} alignment tables for {} tasks", tables.len(), self.n_tasks));
                }
                for (k, t) in tables.iter().enumerate() {
                    if t.len() != self.n_levels {
                        return bad(format!("table {k} has {} levels, expected {}", t.len(), self.n_levels));
                    }
                    if t.iter().any(|v| !v.is_finite() || *v < 0.0) {
                        return bad(format!("table {k} must be finite and nonnegative"));
                    }
                    if t.windows(2).any(|w| w[1] > w[0]) {
                        return bad(format!("table {k} must be nonincreasing"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// `a * decay^(l+1)` for `l` in `0..levels`.
pub fn decay_table(a: f64, decay: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|l| a * decay.powi(l as i32 + 1)).collect()
}

/// Alignment-loss table of task `k`.
pub fn synth_alignment_table(cfg: &GenConfig, k: usize) -> Result<Vec<f64>, GenError> {
    cfg.validate()?;
    if k >= cfg.n_tasks {
        return Err(GenError::InvalidConfig(format!("task {k} out of range")));
    }
    Ok(all_tables(cfg).swap_remove(k))
}

fn all_tables(cfg: &GenConfig) -> Vec<Vec<f64>> {
    match &cfg.align {
        AlignTableMode::SyntheticDecay { base_min, base_max, decay } => {
            let mut rng = stream(cfg.seed, ALIGN_STREAM);
            (0..cfg.n_tasks)
                .map(|_| {
                    let a = if base_min == base_max { *base_min } else { rng.random_range(*base_min..=*base_max) };
                    decay_table(a, *decay, cfg.n_levels)
                })
                .collect()
        }
        AlignTableMode::DistillerFed { tables } => tables.clone(),
    }
}

/// Draws a random instance; a pure function of the config (including its seed).
pub fn generate_instance(cfg: &GenConfig) -> Result<NetworkInstance, GenError> {
    cfg.validate()?;
    let (n, tasks, levels) = (cfg.n_agents, cfg.n_tasks, cfg.n_levels);

    let mut freq = vec![vec![vec![0.0; tasks]; n]; n];
    let mut rng = stream(cfg.seed, FREQ_STREAM);
    for i in 0..n {
        for k in 0..tasks {
            let draws: Vec<f64> = (0..n - 1).map(|_| rng.sample(Open01)).collect();
            let total: f64 = draws.iter().sum();
            let others = (0..n).filter(|&j| j != i);
            for (j, d) in others.zip(draws) {
                freq[i][j][k] = d / total;
            }
        }
    }

    let mut rate = vec![vec![0.0; n]; n];
    let mut rng = stream(cfg.seed, RATE_STREAM);
    for h in 0..n {
        for i in 0..n {
            if h != i {
                let z: f64 = rng.sample(StandardNormal);
                rate[h][i] = z.exp();
            }
        }
    }

    Ok(NetworkInstance {
        n_agents: n,
        n_tasks: tasks,
        n_levels: levels,
        freq,
        rate,
        chunk_size: vec![vec![1.0; levels]; tasks],
        align_loss: all_tables(cfg),
        weights: cfg.weights,
        seed: Some(cfg.seed),
        generator: Some(serde_json::to_value(cfg).expect("config serializes")),
    })
}
