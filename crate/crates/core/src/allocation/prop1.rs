use crate::model::{AllocationPolicy, MetricsReport, NetworkInstance};

use super::{task_metrics, StorageConfig, TaskContext};

/// Policy derived in closed form from a fixed storage configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop1Result {
    pub policy: AllocationPolicy,
    /// `levels[i][j]`: chosen level of link `i -> j` (`None` on the diagonal
    /// and when no level is obtainable).
    pub levels: Vec<Vec<Option<usize>>>,
    /// `t_min[i][l]`: cheapest delivery time of chunk `l` to agent `i`.
    pub t_min: Vec<Vec<f64>>,
    pub metrics: MetricsReport,
    pub feasible: bool,
}

/// Cheapest time to deliver chunk `l` of task `k` to agent `i`, and the
/// lowest-index agent achieving it.
///
/// Returns `(0, Some(i))` when `i` stores the chunk itself and
/// `(inf, None)` when nobody does.
pub fn min_transmission(
    inst: &NetworkInstance,
    storage: &StorageConfig,
    i: usize,
    k: usize,
    l: usize,
) -> (f64, Option<usize>) {
    if storage.get(i, l) {
        return (0.0, Some(i));
    }
    let mut best = (f64::INFINITY, None);
    for h in 0..inst.n_agents {
        if h != i && storage.get(h, l) {
            let t = inst.chunk_size[k][l] / inst.rate[h][i];
            if t < best.0 {
                best = (t, Some(h));
            }
        }
    }
    best
}

/// Derives exploitation, need and transmission policies for a fixed storage.
///
/// Each link independently picks the lowest level minimizing
/// `eta_a * J_A[l] + eta_t * sum_{l'' <= l} (T_min,i[l''] + T_min,j[l''])`.
/// An agent needs level `l` when any of its links (as Tx or Rx) uses a level
/// at least `l`; each needed chunk is then fetched from the cheapest storer
/// on every link of that agent.
pub fn derive_policies_prop1(inst: &NetworkInstance, storage: &StorageConfig, k: usize) -> Prop1Result {
    let ctx = TaskContext::new(inst, k);
    derive_with_context(inst, &ctx, storage, k)
}

/// Same as [`derive_policies_prop1`] with a prebuilt context.
pub fn derive_with_context(inst: &NetworkInstance, ctx: &TaskContext, storage: &StorageConfig, k: usize) -> Prop1Result {
    let (n, levels) = (inst.n_agents, inst.n_levels);
    let d = ctx.derive(storage);

    let mut policy = AllocationPolicy::zeros(n, levels);
    policy.store = storage.to_matrix();

    let mut top: Vec<Option<usize>> = vec![None; n];
    let mut link_levels = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if let Some(l) = d.levels[i * n + j] {
                policy.exploit[i][j][l] = 1;
                link_levels[i][j] = Some(l);
                top[i] = top[i].max(Some(l));
                top[j] = top[j].max(Some(l));
            }
        }
    }
    for i in 0..n {
        if let Some(t) = top[i] {
            for l in 0..=t {
                policy.needed[i][l] = 1;
            }
        }
    }
    for i in 0..n {
        for l in 0..levels {
            if policy.needed[i][l] == 0 {
                continue;
            }
            let Some(h) = d.source[i * levels + l] else { continue };
            for j in 0..n {
                if j != i {
                    // i as the Tx of i -> j, and as the Rx of j -> i.
                    policy.tx_to_tx[h][i][j][l] = 1;
                    policy.tx_to_rx[h][j][i][l] = 1;
                }
            }
        }
    }

    let metrics = task_metrics(inst, &policy, k).expect("policy shape matches instance");
    let t_min = (0..n).map(|i| d.t_min[i * levels..(i + 1) * levels].to_vec()).collect();
    Prop1Result {
        feasible: metrics.feasible,
        policy,
        levels: link_levels,
        t_min,
        metrics,
    }
}
