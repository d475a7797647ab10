use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::factors::{level_loss, loss_and_gradient, NestedFactors};
use super::schema::LevelSchema;
use super::target::DistillTarget;
use super::DistillError;

const INIT_STREAM: u64 = 0;
const LEVEL_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistillConfig {
    pub step_size: f64,
    /// Total iterations are this times the number of levels.
    pub iterations_per_level: usize,
    /// Seeds the factor initialization and the level sampling.
    pub seed: u64,
    /// Singular-value decay of synthetic targets.
    pub spectrum_decay: f64,
    /// Largest singular value of synthetic targets.
    pub spectrum_scale: f64,
}

impl Default for DistillConfig {
    fn default() -> Self {
        Self { step_size: 5e-4, iterations_per_level: 100, seed: 0, spectrum_decay: 0.7, spectrum_scale: 1.0 }
    }
}

impl DistillConfig {
    pub fn validate(&self) -> Result<(), DistillError> {
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(DistillError::InvalidConfig(format!("step_size must be positive, got {}", self.step_size)));
        }
        if self.iterations_per_level == 0 {
            return Err(DistillError::InvalidConfig("iterations_per_level must be positive".into()));
        }
        if !(self.spectrum_decay > 0.0 && self.spectrum_decay <= 1.0) {
            return Err(DistillError::InvalidConfig(format!(
                "spectrum_decay must lie in (0, 1], got {}",
                self.spectrum_decay
            )));
        }
        if !(self.spectrum_scale.is_finite() && self.spectrum_scale > 0.0) {
            return Err(DistillError::InvalidConfig("spectrum_scale must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistillOutcome {
    pub factors: NestedFactors,
    /// Final residual of every level; may be non-monotone.
    pub raw_losses: Vec<f64>,
    pub iterations: usize,
    /// How often each level was sampled.
    pub level_counts: Vec<usize>,
}

pub fn distill(target: &DistillTarget, schema: &LevelSchema, cfg: &DistillConfig) -> Result<DistillOutcome, DistillError> {
    distill_with(target, schema, cfg, |_, _| {})
}

/// Gradient descent where each iteration picks a level uniformly at random
/// and steps only the blocks that level uses. `observe` sees the factors
/// after every step together with the iteration index.
pub fn distill_with<F>(
    target: &DistillTarget,
    schema: &LevelSchema,
    cfg: &DistillConfig,
    mut observe: F,
) -> Result<DistillOutcome, DistillError>
where
    F: FnMut(usize, &NestedFactors),
{
    cfg.validate()?;
    let shapes = target.shapes();
    schema.check(&shapes)?;
    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    init_rng.set_stream(INIT_STREAM);
    let mut level_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    level_rng.set_stream(LEVEL_STREAM);

    let mut f = NestedFactors::init(&shapes, schema, &mut init_rng)?;
    let levels = schema.n_levels();
    let total = cfg.iterations_per_level * levels;
    let mut counts = vec![0; levels];
    let alpha = cfg.step_size;

    for t in 0..total {
        let l = level_rng.random_range(0..levels);
        counts[l] += 1;
        let r = schema.ranks[l];
        let (loss, g) = loss_and_gradient(&f, target, l);
        for m in 0..f.b.len() {
            let mut bv = f.b[m].columns_mut(0, r);
            bv -= &g.b[m] * alpha;
            let mut av = f.a[m].rows_mut(0, r);
            av -= &g.a[m] * alpha;
        }
        if !loss.is_finite() || !f.is_finite() {
            return Err(DistillError::Diverged { iteration: t, level: l });
        }
        observe(t, &f);
    }

    let raw_losses: Vec<f64> = (0..levels).map(|l| level_loss(&f, target, l)).collect();
    if let Some(l) = raw_losses.iter().position(|v| !v.is_finite()) {
        return Err(DistillError::Diverged { iteration: total, level: l });
    }
    Ok(DistillOutcome { factors: f, raw_losses, iterations: total, level_counts: counts })
}
