use std::path::Path;

use dekap_core::distiller::{
    build_schema, chunk_sizes, distill, export_alignment_table, svd_oracle, DistillConfig, DistillTarget, FactorsFile,
    LayerShape, LevelSchema,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::files::{read_config, write_bytes, write_json};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TargetSpec {
    /// Random orthogonal factors around a decaying spectrum; decay and scale
    /// come from the distillation config.
    Synthetic { layers: Vec<LayerShape>, seed: u64 },
    /// Row-major matrices, one per layer.
    Explicit { layers: Vec<Vec<Vec<f64>>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistillPlan {
    pub target: TargetSpec,
    /// Ranks per level. Give either this or `target_prs`.
    #[serde(default)]
    pub ranks: Option<Vec<usize>>,
    #[serde(default)]
    pub target_prs: Option<Vec<f64>>,
    #[serde(default)]
    pub config: DistillConfig,
}

/// Contents of `alignment.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentExport {
    pub ranks: Vec<usize>,
    pub iterations: usize,
    pub raw_losses: Vec<f64>,
    /// Nonincreasing envelope of `raw_losses`; drop-in for an instance's `align_loss` row.
    pub align_loss: Vec<f64>,
    pub chunk_sizes: Vec<f64>,
    /// Best achievable loss at each rank.
    pub oracle_floors: Vec<f64>,
}

/// Runs the plan and writes `factors.json`, `factors.bin` and `alignment.json`
/// into `out_dir`. `seed` replaces the training seed (initialization and
/// level sampling); the target seed stays as written in the plan.
pub fn run_distill(config: &Path, out_dir: &Path, seed: Option<u64>) -> Result<AlignmentExport, CliError> {
    let mut plan: DistillPlan = read_config(config)?;
    if let Some(seed) = seed {
        plan.config.seed = seed;
    }
    plan.config.validate()?;

    let target = match &plan.target {
        TargetSpec::Synthetic { layers, seed } => {
            DistillTarget::synthetic(layers, plan.config.spectrum_decay, plan.config.spectrum_scale, *seed)?
        }
        TargetSpec::Explicit { layers } => DistillTarget::from_layer_rows(layers)?,
    };
    let shapes = target.shapes();
    let schema = match (&plan.ranks, &plan.target_prs) {
        (Some(r), None) => LevelSchema::from_ranks(r.clone(), &shapes)?,
        (None, Some(g)) => build_schema(&shapes, g)?,
        _ => return Err(CliError::Config("give exactly one of `ranks` and `target_prs`".into())),
    };

    let out = distill(&target, &schema, &plan.config)?;
    let export = AlignmentExport {
        ranks: schema.ranks.clone(),
        iterations: out.iterations,
        align_loss: export_alignment_table(&out.raw_losses)?,
        raw_losses: out.raw_losses,
        chunk_sizes: chunk_sizes(&schema, &shapes)?,
        oracle_floors: schema.ranks.iter().map(|&r| svd_oracle(&target, r)).collect(),
    };

    write_json(&out_dir.join("factors.json"), &FactorsFile::from(&out.factors))?;
    let mut bin = Vec::new();
    out.factors.write_bin(&mut bin).expect("writing to memory");
    write_bytes(&out_dir.join("factors.bin"), &bin)?;
    write_json(&out_dir.join("alignment.json"), &export)?;

    println!("distilled {} levels in {} iterations into {}", schema.n_levels(), export.iterations, out_dir.display());
    for (l, r) in schema.ranks.iter().enumerate() {
        println!(
            "  level {l}: rank {r}, loss {:.6} (floor {:.6}), chunk {}",
            export.align_loss[l], export.oracle_floors[l], export.chunk_sizes[l]
        );
    }
    Ok(export)
}
