use crate::model::{MetricsReport, NetworkInstance, Weights, INFEASIBLE};

use super::StorageConfig;

/// Per-task tables used to evaluate storage configurations without
/// materializing the full policy arrays.
///
/// `evaluate` returns exactly the metrics of the policy built by
/// [`derive_policies_prop1`](super::derive_policies_prop1), up to summation order.
#[derive(Debug, Clone)]
pub struct TaskContext {
    n: usize,
    levels: usize,
    weights: Weights,
    /// `times[(h * n + i) * levels + l]`, zero on `h == i`.
    times: Vec<f64>,
    /// Total frequency of links touching each agent, as Tx or Rx.
    flow: Vec<f64>,
    /// `freq[i * n + j]` for this task.
    freq: Vec<f64>,
    align: Vec<f64>,
    chunk: Vec<f64>,
}

/// Reusable buffers for [`TaskContext::evaluate`].
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    t_min: Vec<f64>,
    source: Vec<Option<usize>>,
    prefix: Vec<f64>,
    top_level: Vec<usize>,
}

/// Outcome of the closed-form derivation for one storage configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub metrics: MetricsReport,
    /// Chosen level per link `(i, j)` at `i * n + j`; `None` on the diagonal
    /// and for links with no finite-cost level.
    pub levels: Vec<Option<usize>>,
    /// `t_min[i * levels + l]`.
    pub t_min: Vec<f64>,
    pub source: Vec<Option<usize>>,
}

/// Picks the lowest level minimizing the per-link cost. `None` when every
/// level needs a chunk nobody stores.
#[inline]
pub(crate) fn choose_level(weights: &Weights, align: &[f64], prefix_tx: &[f64], prefix_rx: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for l in 0..align.len() {
        let t = prefix_tx[l] + prefix_rx[l];
        if t.is_infinite() {
            // Prefix sums only grow, so no higher level is reachable either.
            break;
        }
        let cost = weights.eta_a * align[l] + weights.eta_t * t;
        if best.is_none_or(|(_, c)| cost < c) {
            best = Some((l, cost));
        }
    }
    best
}

impl TaskContext {
    pub fn new(inst: &NetworkInstance, k: usize) -> Self {
        let (n, levels) = (inst.n_agents, inst.n_levels);
        let mut times = vec![0.0; n * n * levels];
        for h in 0..n {
            for i in 0..n {
                if h == i {
                    continue;
                }
                for l in 0..levels {
                    times[(h * n + i) * levels + l] = inst.chunk_size[k][l] / inst.rate[h][i];
                }
            }
        }
        let mut flow = vec![0.0; n];
        let mut freq = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let f = inst.freq[i][j][k];
                    freq[i * n + j] = f;
                    flow[i] += f;
                    flow[j] += f;
                }
            }
        }
        Self {
            n,
            levels,
            weights: inst.weights,
            times,
            flow,
            freq,
            align: inst.align_loss[k].clone(),
            chunk: inst.chunk_size[k].clone(),
        }
    }

    pub fn n_agents(&self) -> usize {
        self.n
    }

    pub fn n_levels(&self) -> usize {
        self.levels
    }

    fn fill_t_min(&self, storage: &StorageConfig, t_min: &mut [f64], source: &mut [Option<usize>]) {
        let (n, levels) = (self.n, self.levels);
        for i in 0..n {
            for l in 0..levels {
                let idx = i * levels + l;
                if storage.get(i, l) {
                    t_min[idx] = 0.0;
                    source[idx] = Some(i);
                    continue;
                }
                let mut best = INFEASIBLE;
                let mut src = None;
                for h in 0..n {
                    if storage.get(h, l) {
                        let t = self.times[(h * n + i) * levels + l];
                        if t < best {
                            best = t;
                            src = Some(h);
                        }
                    }
                }
                t_min[idx] = best;
                source[idx] = src;
            }
        }
    }

    /// Network metrics of the closed-form policy for `storage`.
    pub fn evaluate(&self, storage: &StorageConfig, scratch: &mut Scratch) -> MetricsReport {
        let (n, levels) = (self.n, self.levels);
        scratch.t_min.resize(n * levels, 0.0);
        scratch.source.resize(n * levels, None);
        scratch.prefix.resize(n * levels, 0.0);
        scratch.top_level.clear();
        scratch.top_level.resize(n, 0);
        self.fill_t_min(storage, &mut scratch.t_min, &mut scratch.source);
        for i in 0..n {
            let mut acc = 0.0;
            for l in 0..levels {
                acc += scratch.t_min[i * levels + l];
                scratch.prefix[i * levels + l] = acc;
            }
        }

        let mut storage_cost = 0.0;
        for i in 0..n {
            for l in 0..levels {
                if storage.get(i, l) {
                    storage_cost += self.chunk[l];
                }
            }
        }

        let mut align = 0.0;
        for i in 0..n {
            let prefix_i = &scratch.prefix[i * levels..(i + 1) * levels];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let prefix_j = &scratch.prefix[j * levels..(j + 1) * levels];
                match choose_level(&self.weights, &self.align, prefix_i, prefix_j) {
                    Some((l, _)) => {
                        align += self.freq[i * n + j] * self.align[l];
                        scratch.top_level[i] = scratch.top_level[i].max(l);
                        scratch.top_level[j] = scratch.top_level[j].max(l);
                    }
                    None => return MetricsReport::from_parts(&self.weights, 0.0, 0.0, storage_cost, false),
                }
            }
        }

        let mut tx = 0.0;
        for i in 0..n {
            let mut need = 0.0;
            for l in 0..=scratch.top_level[i] {
                need += scratch.t_min[i * levels + l];
            }
            tx += need * self.flow[i];
        }
        MetricsReport::from_parts(&self.weights, align, tx, storage_cost, true)
    }

    /// Full closed-form derivation: chosen levels, delivery tables and metrics.
    pub fn derive(&self, storage: &StorageConfig) -> Derivation {
        let mut scratch = Scratch::default();
        let metrics = self.evaluate(storage, &mut scratch);
        let (n, levels) = (self.n, self.levels);
        let mut chosen = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    chosen[i * n + j] = choose_level(
                        &self.weights,
                        &self.align,
                        &scratch.prefix[i * levels..(i + 1) * levels],
                        &scratch.prefix[j * levels..(j + 1) * levels],
                    )
                    .map(|(l, _)| l);
                }
            }
        }
        Derivation {
            metrics,
            levels: chosen,
            t_min: scratch.t_min,
            source: scratch.source,
        }
    }
}
