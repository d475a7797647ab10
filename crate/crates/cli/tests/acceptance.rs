//! Acceptance criteria. Runs every check, prints one PASS/FAIL line each and
//! exits nonzero when any fails. Tolerances are pinned below.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dekap_core::allocation::{derive_policies_prop1, StorageConfig};
use dekap_core::distiller::{
    chunk_sizes, distill_with, level_gradient, level_loss, parameter_ratio, svd_oracle, DistillConfig,
    DistillTarget, LayerShape, LevelSchema, NestedFactors,
};
use dekap_core::netgen::{generate_instance, GenConfig};
use dekap_core::solvers::{solve_exact, solve_fully_store, solve_ga, solve_greedy, ExactConfig, GaConfig, GreedyConfig};
use dekap_core::NetworkInstance;

const PROP1_REL: f64 = 1e-9;
const PROP1_BUDGET: Duration = Duration::from_secs(60);
const MEAN_GAP_MAX: f64 = 0.05;
const EXACT_SUITE_BUDGET: Duration = Duration::from_secs(300);
const LARGE_IMPROVEMENT_MIN: f64 = 0.10;
const LARGE_GREEDY_BUDGET: Duration = Duration::from_secs(30);
const EXACT_GROWTH_MIN: f64 = 3.0;
const GREEDY_GROWTH_MAX: f64 = 1.5;
const DISTILL_REL: f64 = 0.05;
const DISTILL_ITERS: usize = 20_000;
const GRAD_REL: f64 = 1e-4;
const DISTILL_BUDGET: Duration = Duration::from_secs(120);
const GA_MATCH_MIN: f64 = 0.90;
const SAME: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn instance(n: usize, levels: usize, tasks: usize, seed: u64) -> NetworkInstance {
    generate_instance(&GenConfig::new(n, tasks, levels, seed)).expect("valid generator config")
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b) / b
}

fn prop1_equivalence() -> Outcome {
    let start = Instant::now();
    let (n, levels) = (3, 2);
    let (mut mismatches, mut worst, mut total) = (0usize, 0.0f64, 0usize);
    let mut bad_instances = 0;
    for seed in 0..200 {
        let inst = instance(n, levels, 1, seed);
        let mut bad = false;
        for mask in 0..1u64 << (n * levels) {
            let derived = derive_policies_prop1(&inst, &StorageConfig::from_mask(mask, n, levels), 0).metrics.network_loss;
            let truth = oracle::fixed_storage_optimum(&inst, mask, 0);
            total += 1;
            if !oracle::rel_close(derived, truth, PROP1_REL) {
                mismatches += 1;
                bad = true;
                if truth.is_finite() {
                    worst = worst.max(rel_gap(derived, truth));
                }
            }
        }
        bad_instances += bad as usize;
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: mismatches == 0 && elapsed < PROP1_BUDGET,
        detail: format!(
            "{mismatches}/{total} storage configs differ from the exhaustive optimum ({bad_instances}/200 instances, worst excess {:.2}%), {:.1}s",
            worst * 100.0,
            elapsed.as_secs_f64()
        ),
    }
}

struct SuiteRow {
    exact: f64,
    greedy: f64,
    full: f64,
}

fn exact_suite() -> (Vec<SuiteRow>, Duration) {
    let start = Instant::now();
    let rows = (0..100u64)
        .map(|seed| {
            let inst = instance(3 + (seed % 3) as usize, 3, 1, seed);
            SuiteRow {
                exact: solve_exact(&inst, 0, &ExactConfig::default()).unwrap().metrics.network_loss,
                greedy: solve_greedy(&inst, 0, &GreedyConfig::default()).unwrap().metrics.network_loss,
                full: solve_fully_store(&inst, 0).metrics.network_loss,
            }
        })
        .collect();
    (rows, start.elapsed())
}

fn exact_vs_greedy(rows: &[SuiteRow], elapsed: Duration) -> Outcome {
    let gaps: Vec<f64> = rows.iter().map(|r| rel_gap(r.greedy, r.exact)).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let max = gaps.iter().cloned().fold(0.0, f64::max);
    let chain_breaks = rows.iter().filter(|r| !(r.exact <= r.greedy && r.greedy <= r.full)).count();
    Outcome {
        pass: mean <= MEAN_GAP_MAX && chain_breaks == 0 && elapsed < EXACT_SUITE_BUDGET,
        detail: format!(
            "mean gap {:.3}%, max {:.3}%, greedy optimal on {}/100, dominance breaks {chain_breaks}, {:.1}s",
            mean * 100.0,
            max * 100.0,
            gaps.iter().filter(|&&g| g <= SAME).count(),
            elapsed.as_secs_f64()
        ),
    }
}

fn baseline_improvement(rows: &[SuiteRow]) -> Outcome {
    let mean = |f: fn(&SuiteRow) -> f64| rows.iter().map(f).sum::<f64>() / rows.len() as f64;
    let suite = 1.0 - mean(|r| r.greedy) / mean(|r| r.full);

    let inst = instance(50, 5, 4, 2024);
    let start = Instant::now();
    let greedy = (0..inst.n_tasks)
        .map(|k| solve_greedy(&inst, k, &GreedyConfig::default()).unwrap().metrics.network_loss)
        .sum::<f64>();
    let elapsed = start.elapsed();
    let full = (0..inst.n_tasks).map(|k| solve_fully_store(&inst, k).metrics.network_loss).sum::<f64>();
    let large = 1.0 - greedy / full;
    Outcome {
        pass: suite > 0.0 && large >= LARGE_IMPROVEMENT_MIN && elapsed < LARGE_GREEDY_BUDGET,
        detail: format!(
            "suite improvement {:.2}%; N=50 L=5 K=4 improvement {:.2}% with greedy in {:.2}s",
            suite * 100.0,
            large * 100.0,
            elapsed.as_secs_f64()
        ),
    }
}

/// Median wall time of `reps` back-to-back runs over a fixed set of instances.
fn median_time(insts: &[NetworkInstance], reps: usize, run: impl Fn(&NetworkInstance)) -> f64 {
    let mut samples: Vec<f64> = (0..7)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..reps {
                insts.iter().for_each(&run);
            }
            start.elapsed().as_secs_f64()
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}

fn scaling_shape() -> Outcome {
    let seq = ExactConfig { parallel: false, ..Default::default() };
    let (mut exact, mut greedy, mut sweeps) = (Vec::new(), Vec::new(), Vec::new());
    for n in 3..=6 {
        let insts: Vec<_> = (0..20).map(|s| instance(n, 2, 1, 100 + s)).collect();
        exact.push(median_time(&insts, 1, |i| {
            solve_exact(i, 0, &seq).unwrap();
        }));
        greedy.push(median_time(&insts, 50, |i| {
            solve_greedy(i, 0, &GreedyConfig::default()).unwrap();
        }));
        let total: u64 = insts.iter().map(|i| solve_greedy(i, 0, &GreedyConfig::default()).unwrap().iterations).sum();
        sweeps.push(total as f64 / insts.len() as f64);
    }
    let ratios = |t: &[f64]| t.windows(2).map(|w| w[1] / w[0]).collect::<Vec<_>>();
    let (er, gr) = (ratios(&exact), ratios(&greedy));
    let fmt = |r: &[f64]| r.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ");
    Outcome {
        pass: er.iter().all(|&r| r >= EXACT_GROWTH_MIN) && gr.iter().all(|&r| r <= GREEDY_GROWTH_MAX),
        detail: format!(
            "per-unit-N growth, N=3..6, L=2: exact [{}], greedy [{}] (mean greedy sweeps [{}])",
            fmt(&er),
            fmt(&gr),
            fmt(&sweeps)
        ),
    }
}

/// Central-difference check of the analytic gradient, relative in norm.
fn gradient_error(f: &NestedFactors, t: &DistillTarget, l: usize) -> f64 {
    let h = 1e-6;
    let g = level_gradient(f, t, l);
    let r = f.schema.ranks[l];
    let (mut diff, mut norm) = (0.0, 0.0);
    for m in 0..f.b.len() {
        for i in 0..f.b[m].nrows() {
            for j in 0..r {
                let (mut p, mut q) = (f.clone(), f.clone());
                p.b[m][(i, j)] += h;
                q.b[m][(i, j)] -= h;
                let fd = (level_loss(&p, t, l) - level_loss(&q, t, l)) / (2.0 * h);
                diff += (fd - g.b[m][(i, j)]).powi(2);
                norm += fd * fd;
            }
        }
        for i in 0..r {
            for j in 0..f.a[m].ncols() {
                let (mut p, mut q) = (f.clone(), f.clone());
                p.a[m][(i, j)] += h;
                q.a[m][(i, j)] -= h;
                let fd = (level_loss(&p, t, l) - level_loss(&q, t, l)) / (2.0 * h);
                diff += (fd - g.a[m][(i, j)]).powi(2);
                norm += fd * fd;
            }
        }
    }
    diff.sqrt() / norm.sqrt()
}

fn distiller_vs_floor() -> Outcome {
    let start = Instant::now();
    let shapes = [LayerShape::new(12, 10)];
    let schema = LevelSchema::from_ranks(vec![1, 3], &shapes).unwrap();
    let (mut worst_gap, mut worst_grad, mut misses) = (0.0f64, 0.0f64, 0);
    for seed in 0..20 {
        let cfg = DistillConfig { iterations_per_level: DISTILL_ITERS, seed, ..Default::default() };
        let t = DistillTarget::synthetic(&shapes, cfg.spectrum_decay, cfg.spectrum_scale, seed).unwrap();
        let out = distill_with(&t, &schema, &cfg, |it, f| {
            if it == 0 {
                for l in 0..schema.n_levels() {
                    worst_grad = worst_grad.max(gradient_error(f, &t, l));
                }
            }
        })
        .unwrap();
        for (l, &r) in schema.ranks.iter().enumerate() {
            let gap = rel_gap(out.raw_losses[l], svd_oracle(&t, r));
            worst_gap = worst_gap.max(gap.abs());
            misses += (gap.abs() > DISTILL_REL) as usize;
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: misses == 0 && worst_grad < GRAD_REL && elapsed < DISTILL_BUDGET,
        detail: format!(
            "20 seeds, ranks (1, 3): worst gap to floor {:.3}% ({misses} over 5%), worst gradient error {worst_grad:.2e}, {:.1}s",
            worst_gap * 100.0,
            elapsed.as_secs_f64()
        ),
    }
}

fn nesting_and_arithmetic() -> Outcome {
    let mut failures = Vec::new();

    let cases: [(&[LayerShape], Vec<usize>); 3] = [
        (&[LayerShape::new(12, 10)], vec![1, 3]),
        (&[LayerShape::new(6, 5), LayerShape::new(4, 7)], vec![1, 2, 4]),
        (&[LayerShape::new(8, 4), LayerShape::new(3, 9), LayerShape::new(5, 5)], vec![1, 3]),
    ];
    let mut checkpoints = 0;
    for (c, (shapes, ranks)) in cases.iter().enumerate() {
        let schema = LevelSchema::from_ranks(ranks.clone(), shapes).unwrap();
        let t = DistillTarget::synthetic(shapes, 0.7, 1.0, c as u64).unwrap();
        let cfg = DistillConfig { iterations_per_level: 500, seed: c as u64, ..Default::default() };
        distill_with(&t, &schema, &cfg, |it, f| {
            checkpoints += 1;
            for l in 0..ranks.len() - 1 {
                if f.level(l).to_le_bytes() != f.level(l + 1).truncated(ranks[l]).to_le_bytes() {
                    failures.push(format!("case {c} iteration {it} level {l} not nested"));
                }
            }
        })
        .unwrap();
    }

    let ratio = |shapes: &[LayerShape], r| parameter_ratio(shapes, r).unwrap();
    let ratio_cases = [
        (ratio(&[LayerShape::new(100, 100)], 1), 0.02),
        (ratio(&[LayerShape::new(10, 10); 2], 1), 0.4),
        (ratio(&[LayerShape::new(8, 4)], 2), 0.75),
    ];
    for (got, want) in ratio_cases {
        if (got - want).abs() > 1e-15 {
            failures.push(format!("parameter ratio {got} != {want}"));
        }
    }

    let chunks = |shapes: &[LayerShape], ranks: Vec<usize>| {
        chunk_sizes(&LevelSchema::from_ranks(ranks, shapes).unwrap(), shapes).unwrap()
    };
    let c100 = chunks(&[LayerShape::new(100, 100)], vec![1, 2]);
    let c84 = chunks(&[LayerShape::new(8, 4)], vec![1, 3]);
    if c100 != [200.0, 200.0] {
        failures.push(format!("chunks {c100:?}"));
    }
    if c84 != [12.0, 24.0] {
        failures.push(format!("chunks {c84:?}"));
    }

    // Telescoping over every strictly increasing rank sequence up to the bound.
    let mut schemas = 0;
    let shape_sets: [&[LayerShape]; 4] = [
        &[LayerShape::new(8, 4)],
        &[LayerShape::new(100, 100)],
        &[LayerShape::new(6, 5), LayerShape::new(4, 7)],
        &[LayerShape::new(9, 6), LayerShape::new(6, 11), LayerShape::new(7, 7)],
    ];
    for shapes in shape_sets {
        let bound = shapes.iter().map(LayerShape::min_dim).min().unwrap().min(8);
        let per_rank: usize = shapes.iter().map(|s| s.input + s.output).sum();
        for subset in 1u32..1 << bound {
            let ranks: Vec<usize> = (0..bound).filter(|b| subset >> b & 1 == 1).map(|b| b + 1).collect();
            let top = *ranks.last().unwrap();
            let sum: f64 = chunks(shapes, ranks).iter().sum();
            if sum != (top * per_rank) as f64 {
                failures.push(format!("telescoping fails for subset {subset:#b}"));
            }
            schemas += 1;
        }
    }

    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{checkpoints} checkpoints nested, ratio and chunk examples exact, telescoping on {schemas} schemas")
        } else {
            failures.join("; ")
        },
    }
}

fn run_twice(dir: &Path, name: &str, args: &[&str], outputs: &[&str]) -> Result<(), String> {
    let mut copies = Vec::new();
    for round in 0..2 {
        let out = Command::new(env!("CARGO_BIN_EXE_dekap")).args(args).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{name}: {}", String::from_utf8_lossy(&out.stderr).trim()));
        }
        let mut files = vec![out.stdout];
        for f in outputs {
            files.push(fs::read(dir.join(f)).map_err(|e| format!("{name}: {f}: {e}"))?);
        }
        if round == 0 {
            for f in outputs {
                fs::remove_file(dir.join(f)).ok();
            }
        }
        copies.push(files);
    }
    if copies[0] == copies[1] {
        Ok(())
    } else {
        Err(format!("{name}: outputs differ"))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let d = dir.path();
    let p = |f: &str| d.join(f).to_str().unwrap().to_string();
    let write = |f: &str, text: &str| fs::write(d.join(f), text).unwrap();
    write("gen.json", r#"{"n_agents": 4, "n_tasks": 2, "n_levels": 2}"#);
    write(
        "distill.json",
        r#"{"target": {"kind": "synthetic", "layers": [{"input": 6, "output": 5}], "seed": 3}, "ranks": [1, 3], "config": {"iterations_per_level": 2000}}"#,
    );
    write(
        "bench.json",
        r#"{"sweeps": [{"n_agents": [3, 4], "n_levels": [2], "seeds": 3, "solvers": ["exact", "greedy", "ga", "fully-store"]}]}"#,
    );

    let mut runs: Vec<(String, Vec<String>, Vec<&str>)> = vec![
        ("gen".into(), vec!["gen".into(), "--config".into(), p("gen.json"), "--out".into(), p("inst.json"), "--seed".into(), "9".into()], vec!["inst.json"]),
        (
            "distill".into(),
            vec!["distill".into(), "--config".into(), p("distill.json"), "--out".into(), p("dist"), "--seed".into(), "5".into()],
            vec!["dist/factors.json", "dist/factors.bin", "dist/alignment.json"],
        ),
        (
            "bench".into(),
            vec!["bench".into(), "--config".into(), p("bench.json"), "--out".into(), p("bench.csv"), "--no-timing".into()],
            vec!["bench.csv"],
        ),
    ];
    for solver in ["exact", "greedy", "ga", "fully-store"] {
        runs.push((
            format!("solve {solver}"),
            vec!["solve".into(), p("inst.json"), "--solver".into(), solver.into(), "--seed".into(), "4".into()],
            vec![],
        ));
    }
    // the solver runs read the generated instance, so it must exist first
    let mut errors = Vec::new();
    for (name, args, outputs) in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        if let Err(e) = run_twice(d, name, &args, outputs) {
            errors.push(e);
        }
    }
    Outcome {
        pass: errors.is_empty(),
        detail: if errors.is_empty() {
            format!("{} command/config/seed triples byte-identical across two runs", runs.len())
        } else {
            errors.join("; ")
        },
    }
}

fn ga_sanity() -> Outcome {
    let (mut matched, mut beaten) = (0, 0);
    for seed in 0..50 {
        let inst = instance(3, 2, 1, 500 + seed);
        let exact = solve_exact(&inst, 0, &ExactConfig::default()).unwrap().metrics.network_loss;
        let ga = solve_ga(&inst, 0, &GaConfig::default()).unwrap().metrics.network_loss;
        if rel_gap(ga, exact).abs() <= SAME {
            matched += 1;
        } else if ga < exact {
            beaten += 1;
        }
    }
    Outcome {
        pass: matched as f64 >= GA_MATCH_MIN * 50.0 && beaten == 0,
        detail: format!("GA matched exact on {matched}/50, beat it on {beaten}"),
    }
}

fn report(name: &str, o: Outcome) -> bool {
    println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    o.pass
}

fn main() {
    let mut all = true;
    all &= report("fixed-storage closed form equals exhaustive optimum", prop1_equivalence());
    let (rows, elapsed) = exact_suite();
    all &= report("greedy close to exact, dominance chain", exact_vs_greedy(&rows, elapsed));
    all &= report("greedy improves on fully-store", baseline_improvement(&rows));
    all &= report("exact grows exponentially, greedy stays flat", scaling_shape());
    all &= report("distiller reaches rank-r floors", distiller_vs_floor());
    all &= report("nesting and chunk arithmetic", nesting_and_arithmetic());
    all &= report("byte-identical reruns", determinism());
    all &= report("GA finds the exact optimum", ga_sanity());
    if !all {
        std::process::exit(1);
    }
}
