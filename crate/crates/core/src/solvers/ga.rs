use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::allocation::{Scratch, StorageConfig, TaskContext};
use crate::model::{NetworkInstance, SolveResult};

use super::{check_levels, Finish, SolveError, SolverKind};

/// Genetic search over storage bitstrings (bit `i * L + l` is `s_i[l]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament: usize,
    /// Probability that a child comes from uniform crossover rather than a copy.
    pub crossover_prob: f64,
    /// Per-bit flip probability; `None` means `1 / (N * L)`.
    pub mutation_prob: Option<f64>,
    pub elitism: usize,
    /// Put the all-ones (fully-store) individual in the initial population.
    pub seed_fully_store: bool,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 64,
            generations: 200,
            tournament: 3,
            crossover_prob: 0.9,
            mutation_prob: None,
            elitism: 2,
            seed_fully_store: true,
            seed: 0,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<(), SolveError> {
        let bad = |m: &str| Err(SolveError::InvalidConfig(m.to_string()));
        if self.population < 2 {
            return bad("population must be at least 2");
        }
        if self.tournament == 0 {
            return bad("tournament size must be at least 1");
        }
        if self.elitism > self.population {
            return bad("elitism cannot exceed the population");
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return bad("crossover_prob must lie in [0, 1]");
        }
        if let Some(p) = self.mutation_prob {
            if !(0.0..=1.0).contains(&p) {
                return bad("mutation_prob must lie in [0, 1]");
            }
        }
        Ok(())
    }
}

type Genome = Vec<bool>;

fn to_storage(g: &[bool], storage: &mut StorageConfig, levels: usize) {
    for (b, &bit) in g.iter().enumerate() {
        storage.set(b / levels, b % levels, bit);
    }
}

fn tournament(rng: &mut ChaCha8Rng, fitness: &[f64], size: usize) -> usize {
    let mut best = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let c = rng.random_range(0..fitness.len());
        if fitness[c] < fitness[best] || (fitness[c] == fitness[best] && c < best) {
            best = c;
        }
    }
    best
}

/// Steady generational GA with tournament selection, uniform crossover,
/// per-bit mutation and elitism. Infeasible genomes score `+inf`.
///
/// Returns the best genome ever evaluated; `iterations` counts generations.
pub fn solve_ga(inst: &NetworkInstance, k: usize, cfg: &GaConfig) -> Result<SolveResult, SolveError> {
    check_levels(inst)?;
    cfg.validate()?;
    let started = Instant::now();
    let (n, levels) = (inst.n_agents, inst.n_levels);
    let bits = n * levels;
    let p_mut = cfg.mutation_prob.unwrap_or(1.0 / bits as f64);
    let ctx = TaskContext::new(inst, k);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut scratch = Scratch::default();
    let mut storage = StorageConfig::empty(n, levels);
    let mut evaluations = 0u64;

    let mut evaluate = |g: &Genome, evaluations: &mut u64| {
        to_storage(g, &mut storage, levels);
        *evaluations += 1;
        ctx.evaluate(&storage, &mut scratch).network_loss
    };

    let mut population: Vec<Genome> = (0..cfg.population)
        .map(|idx| {
            if idx == 0 && cfg.seed_fully_store {
                vec![true; bits]
            } else {
                (0..bits).map(|_| rng.random_bool(0.5)).collect()
            }
        })
        .collect();
    let mut fitness: Vec<f64> = population.iter().map(|g| evaluate(g, &mut evaluations)).collect();

    let mut best_idx = 0;
    for i in 1..fitness.len() {
        if fitness[i] < fitness[best_idx] {
            best_idx = i;
        }
    }
    let mut best = (fitness[best_idx], population[best_idx].clone());

    for _ in 0..cfg.generations {
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));

        let mut next: Vec<Genome> = Vec::with_capacity(cfg.population);
        let mut next_fit: Vec<f64> = Vec::with_capacity(cfg.population);
        for &e in order.iter().take(cfg.elitism) {
            next.push(population[e].clone());
            next_fit.push(fitness[e]);
        }
        while next.len() < cfg.population {
            let a = tournament(&mut rng, &fitness, cfg.tournament);
            let mut child = if rng.random_bool(cfg.crossover_prob) {
                let b = tournament(&mut rng, &fitness, cfg.tournament);
                (0..bits)
                    .map(|bit| if rng.random_bool(0.5) { population[a][bit] } else { population[b][bit] })
                    .collect()
            } else {
                population[a].clone()
            };
            for gene in child.iter_mut() {
                if rng.random_bool(p_mut) {
                    *gene = !*gene;
                }
            }
            let f = evaluate(&child, &mut evaluations);
            if f < best.0 {
                best = (f, child.clone());
            }
            next.push(child);
            next_fit.push(f);
        }
        population = next;
        fitness = next_fit;
    }

    let mut winner = StorageConfig::empty(n, levels);
    to_storage(&best.1, &mut winner, levels);
    Ok(Finish { inst, ctx: &ctx, k, started }.result(
        SolverKind::Ga,
        &winner,
        cfg.generations as u64,
        evaluations,
        Vec::new(),
    ))
}
