//! Nested low-rank distillation of a parameter delta.
//!
//! Each layer `m` holds one factor pair `B_m` (I x r_max) and `A_m`
//! (r_max x O). Level `l` is the product of the first `ranks[l]` columns of
//! `B_m` and the first `ranks[l]` rows of `A_m`, so every level is a
//! sub-matrix of the next one by construction. Levels are indexed from 0.

mod export;
mod factors;
mod oracle;
mod schema;
mod target;
mod train;

pub use export::{export_alignment_table, read_factors_bin, FactorsFile};
pub use factors::{level_gradient, level_loss, LevelFactors, LevelGradient, NestedFactors};
pub use oracle::svd_oracle;
pub use schema::{build_schema, chunk_sizes, parameter_ratio, LayerShape, LevelSchema};
pub use target::DistillTarget;
pub use train::{distill, distill_with, DistillConfig, DistillOutcome};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DistillError {
    #[error("no layer shapes given")]
    NoLayers,
    #[error("layer {index} has a zero dimension ({input} x {output})")]
    ZeroDimension { index: usize, input: usize, output: usize },
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("target ratio {target} is unreachable: rank {max_rank} only gives {max_ratio}")]
    Unreachable { target: f64, max_rank: usize, max_ratio: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("loss became non-finite at iteration {iteration} (level {level})")]
    Diverged { iteration: usize, level: usize },
    #[error("invalid loss table: {0}")]
    InvalidTable(String),
    #[error("malformed factors file: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
