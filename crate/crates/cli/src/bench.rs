//! Seeded sweeps over random instances, written as one CSV.
//!
//! The CSV has one `run` row per (instance, solver) followed by one `mean`
//! row per (N, L, K, solver). Columns, in order:
//!
//! `record, n_agents, n_levels, n_tasks, seed, solver, status, runs, j_net,
//! l_a, o_t, c_s, wall_time_s, evaluations, improvement_pct, gap_vs_exact_pct`
//!
//! `improvement_pct` is `100 (J_full - J) / J_full` against the fully-store
//! value of the same instance(s); on `mean` rows it compares the means.
//! `gap_vs_exact_pct` is `100 (J - J_exact) / J_exact` when the exact solver
//! ran on the same instance; on `mean` rows it is the mean per-instance gap.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use dekap_core::netgen::{generate_instance, AlignTableMode, GenConfig};
use dekap_core::solvers::{solve_all, SolveError, SolverConfig, SolverKind};
use dekap_core::{SolveResult, Weights};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::files::write_bytes;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub n_agents: Vec<usize>,
    pub n_levels: Vec<usize>,
    #[serde(default = "one")]
    pub n_tasks: usize,
    /// Number of seeds per (N, L) pair.
    pub seeds: u64,
    #[serde(default)]
    pub seed_start: u64,
    pub solvers: Vec<String>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    #[serde(default)]
    pub sweeps: Vec<Sweep>,
    #[serde(default)]
    pub solvers: SolverConfig,
    #[serde(default)]
    pub weights: Weights,
    #[serde(default)]
    pub align: AlignTableMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Cell {
    n_agents: usize,
    n_levels: usize,
    n_tasks: usize,
    seed: u64,
}

#[derive(Debug, Clone)]
enum Outcome {
    Ok(Box<SolveResult>),
    Skipped,
    Failed(String),
}

#[derive(Debug, Clone)]
struct Run {
    cell: Cell,
    solver: SolverKind,
    outcome: Outcome,
    fully_store: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub record: String,
    pub n_agents: usize,
    pub n_levels: usize,
    pub n_tasks: usize,
    pub seed: Option<u64>,
    pub solver: String,
    pub status: String,
    pub runs: usize,
    pub j_net: Option<f64>,
    pub l_a: Option<f64>,
    pub o_t: Option<f64>,
    pub c_s: Option<f64>,
    pub wall_time_s: Option<f64>,
    pub evaluations: Option<f64>,
    pub improvement_pct: Option<f64>,
    pub gap_vs_exact_pct: Option<f64>,
}

fn solver_rank(kind: SolverKind) -> usize {
    SolverKind::ALL.iter().position(|k| *k == kind).unwrap_or(usize::MAX)
}

fn pct(delta: f64, base: f64) -> f64 {
    100.0 * delta / base
}

impl ExperimentPlan {
    fn kinds(sweep: &Sweep) -> Result<Vec<SolverKind>, CliError> {
        let mut kinds = sweep
            .solvers
            .iter()
            .map(|s| s.parse::<SolverKind>().map_err(|e| CliError::Config(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        kinds.sort_by_key(|k| solver_rank(*k));
        kinds.dedup();
        Ok(kinds)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (x, s) in self.sweeps.iter().enumerate() {
            let bad = |m: &str| Err(CliError::Config(format!("sweep {x}: {m}")));
            if s.n_agents.is_empty() || s.n_levels.is_empty() || s.solvers.is_empty() {
                return bad("n_agents, n_levels and solvers must be nonempty");
            }
            if s.seeds == 0 {
                return bad("seeds must be positive");
            }
            Self::kinds(s)?;
            for &n in &s.n_agents {
                for &l in &s.n_levels {
                    let mut g = GenConfig::new(n, s.n_tasks, l, 0);
                    g.weights = self.weights;
                    g.align = self.align.clone();
                    g.validate()?;
                }
            }
        }
        Ok(())
    }

    fn cells(&self) -> Result<Vec<(Cell, Vec<SolverKind>)>, CliError> {
        let mut out = Vec::new();
        for s in &self.sweeps {
            let kinds = Self::kinds(s)?;
            for &n_agents in &s.n_agents {
                for &n_levels in &s.n_levels {
                    for seed in s.seed_start..s.seed_start + s.seeds {
                        let cell = Cell { n_agents, n_levels, n_tasks: s.n_tasks, seed };
                        out.push((cell, kinds.clone()));
                    }
                }
            }
        }
        Ok(out)
    }
}

fn run_cell(plan: &ExperimentPlan, cell: Cell, kinds: &[SolverKind]) -> Result<Vec<Run>, CliError> {
    let gen = GenConfig {
        n_agents: cell.n_agents,
        n_tasks: cell.n_tasks,
        n_levels: cell.n_levels,
        seed: cell.seed,
        align: plan.align.clone(),
        weights: plan.weights,
    };
    let inst = generate_instance(&gen)?;
    let mut cfg = plan.solvers.clone();
    cfg.ga.seed = cfg.ga.seed.wrapping_add(cell.seed);
    let fully_store = solve_all(&inst, SolverKind::FullyStore, &cfg)?.metrics.network_loss;
    Ok(kinds
        .iter()
        .map(|&solver| {
            let outcome = match solve_all(&inst, solver, &cfg) {
                Ok(r) => Outcome::Ok(Box::new(r)),
                Err(SolveError::GuardExceeded { .. }) => Outcome::Skipped,
                Err(e) => Outcome::Failed(e.to_string()),
            };
            Run { cell, solver, outcome, fully_store }
        })
        .collect())
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn build_rows(runs: &[Run], timing: bool) -> Vec<BenchRow> {
    let exact: BTreeMap<Cell, f64> = runs
        .iter()
        .filter(|r| r.solver == SolverKind::Exact)
        .filter_map(|r| match &r.outcome {
            Outcome::Ok(s) => Some((r.cell, s.metrics.network_loss)),
            _ => None,
        })
        .collect();
    let gap = |r: &Run, j: f64| exact.get(&r.cell).map(|&e| pct(j - e, e));
    let secs = |d: Duration| timing.then_some(d.as_secs_f64());

    let mut rows = Vec::new();
    for r in runs {
        let (status, res) = match &r.outcome {
            Outcome::Ok(s) => ("ok".to_string(), Some(s)),
            Outcome::Skipped => ("skipped".to_string(), None),
            Outcome::Failed(m) => (format!("failed: {m}"), None),
        };
        let m = res.map(|s| s.metrics);
        rows.push(BenchRow {
            record: "run".into(),
            n_agents: r.cell.n_agents,
            n_levels: r.cell.n_levels,
            n_tasks: r.cell.n_tasks,
            seed: Some(r.cell.seed),
            solver: r.solver.name().into(),
            status,
            runs: 1,
            j_net: m.map(|m| m.network_loss),
            l_a: m.map(|m| m.align_loss_total),
            o_t: m.map(|m| m.tx_overhead_total),
            c_s: m.map(|m| m.storage_cost_total),
            wall_time_s: res.and_then(|s| secs(s.wall_time)),
            evaluations: res.map(|s| s.evaluations as f64),
            improvement_pct: m.map(|m| pct(r.fully_store - m.network_loss, r.fully_store)),
            gap_vs_exact_pct: m.and_then(|m| gap(r, m.network_loss)),
        });
    }

    let mut groups: BTreeMap<(usize, usize, usize, usize), Vec<&Run>> = BTreeMap::new();
    for r in runs {
        groups
            .entry((r.cell.n_agents, r.cell.n_levels, r.cell.n_tasks, solver_rank(r.solver)))
            .or_default()
            .push(r);
    }
    for ((n_agents, n_levels, n_tasks, _), group) in groups {
        let ok: Vec<(&Run, &SolveResult)> = group
            .iter()
            .filter_map(|r| match &r.outcome {
                Outcome::Ok(s) => Some((*r, s.as_ref())),
                _ => None,
            })
            .collect();
        let status = if ok.len() == group.len() {
            "ok"
        } else if ok.is_empty() {
            "skipped"
        } else {
            "partial"
        };
        let j = mean(ok.iter().map(|(_, s)| s.metrics.network_loss));
        let full = mean(ok.iter().map(|(r, _)| r.fully_store));
        rows.push(BenchRow {
            record: "mean".into(),
            n_agents,
            n_levels,
            n_tasks,
            seed: None,
            solver: group[0].solver.name().into(),
            status: status.into(),
            runs: ok.len(),
            j_net: j,
            l_a: mean(ok.iter().map(|(_, s)| s.metrics.align_loss_total)),
            o_t: mean(ok.iter().map(|(_, s)| s.metrics.tx_overhead_total)),
            c_s: mean(ok.iter().map(|(_, s)| s.metrics.storage_cost_total)),
            wall_time_s: if timing { mean(ok.iter().map(|(_, s)| s.wall_time.as_secs_f64())) } else { None },
            evaluations: mean(ok.iter().map(|(_, s)| s.evaluations as f64)),
            improvement_pct: j.zip(full).map(|(j, f)| pct(f - j, f)),
            gap_vs_exact_pct: mean(ok.iter().filter_map(|(r, s)| gap(r, s.metrics.network_loss))),
        });
    }
    rows
}

pub fn to_csv(rows: &[BenchRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(HEADER).map_err(|e| CliError::Config(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Config(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Config(e.to_string()))
}

pub const HEADER: [&str; 16] = [
    "record",
    "n_agents",
    "n_levels",
    "n_tasks",
    "seed",
    "solver",
    "status",
    "runs",
    "j_net",
    "l_a",
    "o_t",
    "c_s",
    "wall_time_s",
    "evaluations",
    "improvement_pct",
    "gap_vs_exact_pct",
];

/// Runs the plan on the current rayon pool. Rows come back sorted, runs
/// first, so the output does not depend on scheduling.
pub fn run_plan(plan: &ExperimentPlan, timing: bool) -> Result<Vec<BenchRow>, CliError> {
    plan.validate()?;
    let cells = plan.cells()?;
    let mut runs: Vec<Run> = cells
        .par_iter()
        .map(|(cell, kinds)| run_cell(plan, *cell, kinds))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    runs.sort_by_key(|r| (r.cell, solver_rank(r.solver)));
    for r in &runs {
        if let Outcome::Failed(m) = &r.outcome {
            eprintln!("N={} L={} seed={} {}: {m}", r.cell.n_agents, r.cell.n_levels, r.cell.seed, r.solver);
        }
    }
    Ok(build_rows(&runs, timing))
}

/// Runs the plan and writes the CSV. Without `timing` the wall-time column
/// is left empty and the CSV is byte-reproducible.
pub fn run_bench_plan(plan: &ExperimentPlan, out: &Path, timing: bool) -> Result<Vec<BenchRow>, CliError> {
    let rows = run_plan(plan, timing)?;
    write_bytes(out, &to_csv(&rows)?)?;
    for r in rows.iter().filter(|r| r.record == "mean") {
        println!(
            "N={} L={} K={} {:<11} runs={:<4} J_net={} improvement={}% gap={}%",
            r.n_agents,
            r.n_levels,
            r.n_tasks,
            r.solver,
            r.runs,
            fmt(r.j_net),
            fmt(r.improvement_pct),
            fmt(r.gap_vs_exact_pct)
        );
    }
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(rows)
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.4}"))
}
