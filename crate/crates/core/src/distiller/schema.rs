use serde::{Deserialize, Serialize};

use super::DistillError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerShape {
    pub input: usize,
    pub output: usize,
}

impl LayerShape {
    pub fn new(input: usize, output: usize) -> Self {
        Self { input, output }
    }

    pub fn min_dim(&self) -> usize {
        self.input.min(self.output)
    }
}

pub(crate) fn check_shapes(shapes: &[LayerShape]) -> Result<(), DistillError> {
    if shapes.is_empty() {
        return Err(DistillError::NoLayers);
    }
    for (index, s) in shapes.iter().enumerate() {
        if s.input == 0 || s.output == 0 {
            return Err(DistillError::ZeroDimension { index, input: s.input, output: s.output });
        }
    }
    Ok(())
}

/// Fraction of the full parameter count kept by rank-`r` factors on every layer.
pub fn parameter_ratio(shapes: &[LayerShape], r: usize) -> Result<f64, DistillError> {
    check_shapes(shapes)?;
    Ok(shapes
        .iter()
        .map(|s| (r * (s.input + s.output)) as f64 / (s.input * s.output) as f64)
        .sum())
}

/// Per-level ranks shared by all layers, strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSchema {
    pub ranks: Vec<usize>,
    /// Ratios the ranks were built from; empty when ranks were given directly.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub target_prs: Vec<f64>,
}

impl LevelSchema {
    pub fn from_ranks(ranks: Vec<usize>, shapes: &[LayerShape]) -> Result<Self, DistillError> {
        let schema = Self { ranks, target_prs: Vec::new() };
        schema.check(shapes)?;
        Ok(schema)
    }

    pub fn n_levels(&self) -> usize {
        self.ranks.len()
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.last().copied().unwrap_or(0)
    }

    pub fn check(&self, shapes: &[LayerShape]) -> Result<(), DistillError> {
        check_shapes(shapes)?;
        if self.ranks.is_empty() {
            return Err(DistillError::InvalidSchema("no levels".into()));
        }
        if self.ranks[0] == 0 {
            return Err(DistillError::InvalidSchema("ranks must be positive".into()));
        }
        if self.ranks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DistillError::InvalidSchema(format!("ranks {:?} are not strictly increasing", self.ranks)));
        }
        let bound = shapes.iter().map(LayerShape::min_dim).min().unwrap_or(0);
        if self.max_rank() > bound {
            return Err(DistillError::InvalidSchema(format!(
                "top rank {} exceeds the smallest layer dimension {bound}",
                self.max_rank()
            )));
        }
        Ok(())
    }
}

/// Smallest rank reaching each target ratio, bumped where needed to keep
/// ranks strictly increasing.
pub fn build_schema(shapes: &[LayerShape], target_prs: &[f64]) -> Result<LevelSchema, DistillError> {
    check_shapes(shapes)?;
    if target_prs.is_empty() {
        return Err(DistillError::InvalidSchema("no target ratios".into()));
    }
    if target_prs.iter().any(|g| !g.is_finite() || *g <= 0.0) {
        return Err(DistillError::InvalidSchema("target ratios must be positive and finite".into()));
    }
    if target_prs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DistillError::InvalidSchema("target ratios must be strictly increasing".into()));
    }
    let max_rank = shapes.iter().map(LayerShape::min_dim).min().unwrap_or(0);
    let mut ranks: Vec<usize> = Vec::with_capacity(target_prs.len());
    for &target in target_prs {
        let r = (1..=max_rank)
            .find(|&r| parameter_ratio(shapes, r).map(|g| g >= target).unwrap_or(false))
            .ok_or_else(|| DistillError::Unreachable {
                target,
                max_rank,
                max_ratio: parameter_ratio(shapes, max_rank).unwrap_or(0.0),
            })?;
        let r = match ranks.last() {
            Some(&prev) if r <= prev => prev + 1,
            _ => r,
        };
        ranks.push(r);
    }
    let schema = LevelSchema { ranks, target_prs: target_prs.to_vec() };
    schema.check(shapes)?;
    Ok(schema)
}

/// Size of the differential chunk of each level: the parameters added on top
/// of the previous level.
pub fn chunk_sizes(schema: &LevelSchema, shapes: &[LayerShape]) -> Result<Vec<f64>, DistillError> {
    schema.check(shapes)?;
    let per_rank: usize = shapes.iter().map(|s| s.input + s.output).sum();
    let mut prev = 0;
    Ok(schema
        .ranks
        .iter()
        .map(|&r| {
            let s = (r - prev) * per_rank;
            prev = r;
            s as f64
        })
        .collect())
}
