use std::path::Path;

use dekap_core::solvers::{solve_all, SolverConfig, SolverKind, DEFAULT_MAX_BITS};
use dekap_core::SolveResult;

use crate::error::CliError;
use crate::files::{load_instance, read_config, to_json, write_bytes};

#[derive(Debug, Clone, Default)]
pub struct SolveArgs<'a> {
    pub config: Option<&'a Path>,
    pub seed: Option<u64>,
    pub max_bits: Option<u32>,
}

/// Solver settings from an optional file plus command-line overrides.
/// `seed` replaces the GA seed.
pub fn solver_config(args: &SolveArgs) -> Result<SolverConfig, CliError> {
    let mut cfg: SolverConfig = match args.config {
        Some(p) => read_config(p)?,
        None => SolverConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.ga.seed = seed;
    }
    if let Some(bits) = args.max_bits {
        if bits > DEFAULT_MAX_BITS {
            eprintln!("warning: --max-bits {bits} allows up to 2^{bits} evaluations per task");
        }
        cfg.exact.max_bits = bits;
    }
    Ok(cfg)
}

pub fn summary_line(r: &SolveResult) -> String {
    format!(
        "{}: J_net={} L_A={} O_T={} C_S={} time={:.3}s evaluations={}",
        r.solver,
        r.metrics.network_loss,
        r.metrics.align_loss_total,
        r.metrics.tx_overhead_total,
        r.metrics.storage_cost_total,
        r.wall_time.as_secs_f64(),
        r.evaluations
    )
}

/// Solves every task of the instance and writes the result JSON to `out`,
/// or to stdout when `out` is `None`.
pub fn run_solve(instance: &Path, solver: &str, out: Option<&Path>, args: &SolveArgs) -> Result<SolveResult, CliError> {
    let kind: SolverKind = solver.parse()?;
    let cfg = solver_config(args)?;
    let inst = load_instance(instance)?;
    let result = solve_all(&inst, kind, &cfg)?;
    let text = to_json(&result);
    match out {
        Some(p) => {
            write_bytes(p, text.as_bytes())?;
            println!("{}", summary_line(&result));
        }
        None => {
            print!("{text}");
            eprintln!("{}", summary_line(&result));
        }
    }
    Ok(result)
}
