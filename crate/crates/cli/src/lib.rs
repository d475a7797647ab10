//! `dekap` command-line harness: instance generation, distillation, solving,
//! benchmarking and policy verification.

pub mod bench;
pub mod distill;
pub mod error;
pub mod files;
pub mod gen;
pub mod solve;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "dekap", version, about = "Distill nested low-rank knowledge and allocate it across an agent network")]
pub struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random network instance.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Distill a target into nested factors and export its alignment table.
    Distill {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve every task of an instance.
    Solve {
        instance: PathBuf,
        /// exact, greedy, ga or fully-store.
        #[arg(long, default_value = "greedy")]
        solver: String,
        /// Solver settings (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Result file; prints to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Largest N*L the exact solver accepts.
        #[arg(long)]
        max_bits: Option<u32>,
    },
    /// Run an experiment plan and write a CSV report.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_bits: Option<u32>,
        /// Leave the wall-time column empty so the report is reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Check a policy or result file against an instance.
    Verify { instance: PathBuf, policy: PathBuf },
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen { config, out, seed } => gen::run_gen(&config, &out, seed).map(drop),
        Command::Distill { config, out, seed } => distill::run_distill(&config, &out, seed).map(drop),
        Command::Solve { instance, solver, config, out, seed, max_bits } => {
            let args = solve::SolveArgs { config: config.as_deref(), seed, max_bits };
            solve::run_solve(&instance, &solver, out.as_deref(), &args).map(drop)
        }
        Command::Bench { config, out, seed, max_bits, no_timing } => {
            let mut plan: bench::ExperimentPlan = files::read_config(&config)?;
            if let Some(seed) = seed {
                for s in &mut plan.sweeps {
                    s.seed_start = seed;
                }
            }
            if let Some(bits) = max_bits {
                if bits > dekap_core::solvers::DEFAULT_MAX_BITS {
                    eprintln!("warning: --max-bits {bits} allows up to 2^{bits} evaluations per task");
                }
                plan.solvers.exact.max_bits = bits;
            }
            bench::run_bench_plan(&plan, &out, !no_timing).map(drop)
        }
        Command::Verify { instance, policy } => verify::run_verify(&instance, &policy).map(drop),
    }
}

/// Runs a parsed command line on a thread pool of the requested size.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| dispatch(cli.command))
}
