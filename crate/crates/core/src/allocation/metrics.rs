use crate::model::{AllocationPolicy, MetricsReport, ModelError, NetworkInstance};

use super::{check_constraints, AllocError, StorageConfig};

#[inline]
fn time(inst: &NetworkInstance, h: usize, i: usize, k: usize, l: usize) -> f64 {
    if h == i {
        0.0
    } else {
        inst.chunk_size[k][l] / inst.rate[h][i]
    }
}

/// Frequency-weighted alignment loss of task `k` under `exploit[i][j][l]`.
///
/// Every link must select exactly one level.
pub fn alignment_loss(inst: &NetworkInstance, exploit: &[Vec<Vec<u8>>], k: usize) -> Result<f64, AllocError> {
    let n = inst.n_agents;
    if exploit.len() != n || exploit.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != inst.n_levels)) {
        return Err(ModelError::Dimension("exploit policy shape".into()).into());
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let row = &exploit[i][j];
            let ones: Vec<usize> = (0..row.len()).filter(|&l| row[l] != 0).collect();
            if ones.len() != 1 || row[ones[0]] != 1 {
                return Err(AllocError::MalformedExploit { tx: i, rx: j });
            }
            total += inst.freq[i][j][k] * inst.align_loss[k][ones[0]];
        }
    }
    Ok(total)
}

/// Frequency-weighted cost of every transmission the policy schedules for task `k`.
pub fn transmission_overhead(inst: &NetworkInstance, policy: &AllocationPolicy, k: usize) -> f64 {
    let n = inst.n_agents;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut link = 0.0;
            for l in 0..inst.n_levels {
                for h in 0..n {
                    if policy.tx_to_tx[h][i][j][l] != 0 {
                        link += time(inst, h, i, k, l);
                    }
                    if policy.tx_to_rx[h][i][j][l] != 0 {
                        link += time(inst, h, j, k, l);
                    }
                }
            }
            total += inst.freq[i][j][k] * link;
        }
    }
    total
}

/// Total size of the chunks kept by all agents for task `k`.
pub fn storage_cost(inst: &NetworkInstance, storage: &StorageConfig, k: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..storage.n_agents() {
        for l in 0..storage.n_levels() {
            if storage.get(i, l) {
                total += inst.chunk_size[k][l];
            }
        }
    }
    total
}

fn raw_alignment(inst: &NetworkInstance, exploit: &[Vec<Vec<u8>>], k: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..inst.n_agents {
        for j in 0..inst.n_agents {
            if i == j {
                continue;
            }
            for l in 0..inst.n_levels {
                total += inst.freq[i][j][k] * exploit[i][j][l] as f64 * inst.align_loss[k][l];
            }
        }
    }
    total
}

/// Metrics of one task's policy, recomputed from its arrays.
///
/// The report is marked infeasible (with the infinite sentinel as network
/// loss) when any constraint is violated.
pub fn task_metrics(inst: &NetworkInstance, policy: &AllocationPolicy, k: usize) -> Result<MetricsReport, ModelError> {
    inst.check_task(k)?;
    policy.check_shape(inst.n_agents, inst.n_levels)?;
    let feasible = check_constraints(inst, policy, k).is_empty();
    let align = raw_alignment(inst, &policy.exploit, k);
    let tx = transmission_overhead(inst, policy, k);
    let mut storage = 0.0;
    for row in &policy.store {
        for (l, &v) in row.iter().enumerate() {
            storage += v as f64 * inst.chunk_size[k][l];
        }
    }
    Ok(MetricsReport::from_parts(&inst.weights, align, tx, storage, feasible))
}

/// Sums the metrics of `policies[k]` over all tasks `k` and applies the weights.
pub fn network_loss(inst: &NetworkInstance, policies: &[AllocationPolicy]) -> Result<MetricsReport, ModelError> {
    if policies.len() != inst.n_tasks {
        return Err(ModelError::Dimension(format!(
            "{} policies given for {} tasks",
            policies.len(),
            inst.n_tasks
        )));
    }
    let mut total = MetricsReport::zero();
    for (k, p) in policies.iter().enumerate() {
        total = total + task_metrics(inst, p, k)?;
    }
    Ok(total)
}
