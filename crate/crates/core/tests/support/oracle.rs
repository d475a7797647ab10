//! Brute-force reference computations that share no code with the library.
//! Storage configurations are bitmasks with bit `i * L + l` set when agent
//! `i` stores chunk `l`.

#![allow(dead_code)]

use dekap_core::{AllocationPolicy, NetworkInstance};

pub fn stored(mask: u64, levels: usize, i: usize, l: usize) -> bool {
    mask >> (i * levels + l) & 1 == 1
}

fn time(inst: &NetworkInstance, h: usize, i: usize, k: usize, l: usize) -> f64 {
    if h == i {
        0.0
    } else {
        inst.chunk_size[k][l] / inst.rate[h][i]
    }
}

fn weighted(inst: &NetworkInstance, la: f64, ot: f64, cs: f64) -> f64 {
    let w = inst.weights;
    w.eta_a * la + w.eta_t * ot + w.eta_s * cs
}

fn storage_sum(inst: &NetworkInstance, mask: u64, k: usize) -> f64 {
    let levels = inst.n_levels;
    let mut total = 0.0;
    for l in 0..levels {
        for i in 0..inst.n_agents {
            if stored(mask, levels, i, l) {
                total += inst.chunk_size[k][l];
            }
        }
    }
    total
}

/// Cheapest way to satisfy one "agent `a` holds chunk `l` on link `i -> j`"
/// requirement: every subset of storers is tried and charged
/// `F_ij * sum_{h in subset} T_ha`. `0` when `a` stores the chunk itself.
fn cheapest_supply(inst: &NetworkInstance, mask: u64, k: usize, i: usize, j: usize, a: usize, l: usize) -> f64 {
    let (n, levels) = (inst.n_agents, inst.n_levels);
    if stored(mask, levels, a, l) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for subset in 1u32..(1 << n) {
        let mut cost = 0.0;
        let mut ok = true;
        for h in 0..n {
            if subset >> h & 1 == 1 {
                if !stored(mask, levels, h, l) {
                    ok = false;
                    break;
                }
                cost += inst.freq[i][j][k] * time(inst, h, a, k, l);
            }
        }
        if ok && cost < best {
            best = cost;
        }
    }
    best
}

/// Minimum network loss of task `k` over every exploitation, need and
/// transmission assignment allowed by the constraints with storage fixed to
/// `mask`. `inf` when nothing is feasible.
///
/// Exploitation (one level per link) and need bits are enumerated jointly.
/// Transmission variables of different `(link, endpoint, level)` groups never
/// share a constraint, so each group is minimized over all its source
/// subsets on its own.
pub fn fixed_storage_optimum(inst: &NetworkInstance, mask: u64, k: usize) -> f64 {
    let (n, levels) = (inst.n_agents, inst.n_levels);
    let links: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();

    // supply[link][l] = (tx side, rx side)
    let supply: Vec<Vec<(f64, f64)>> = links
        .iter()
        .map(|&(i, j)| {
            (0..levels)
                .map(|l| (cheapest_supply(inst, mask, k, i, j, i, l), cheapest_supply(inst, mask, k, i, j, j, l)))
                .collect()
        })
        .collect();
    let cs = storage_sum(inst, mask, k);

    let n_exploit = levels.pow(links.len() as u32);
    let mut best = f64::INFINITY;
    for code in 0..n_exploit {
        let mut c = code;
        let choice: Vec<usize> = links
            .iter()
            .map(|_| {
                let l = c % levels;
                c /= levels;
                l
            })
            .collect();
        let la: f64 = links.iter().zip(&choice).map(|(&(i, j), &l)| inst.freq[i][j][k] * inst.align_loss[k][l]).sum();

        for tau in 0u64..(1 << (n * levels)) {
            let need = |i: usize, l: usize| tau >> (i * levels + l) & 1 == 1;
            // A link at level l' needs every level up to l' at both endpoints.
            let ok = links.iter().zip(&choice).all(|(&(i, j), &lc)| (0..=lc).all(|l| need(i, l) && need(j, l)));
            if !ok {
                continue;
            }
            let mut ot = 0.0;
            for (x, &(i, j)) in links.iter().enumerate() {
                for l in 0..levels {
                    if need(i, l) {
                        ot += supply[x][l].0;
                    }
                    if need(j, l) {
                        ot += supply[x][l].1;
                    }
                }
            }
            let j_net = weighted(inst, la, ot, cs);
            if j_net < best {
                best = j_net;
            }
        }
    }
    best
}

/// Global optimum of task `k`, found without the closed-form level rule:
/// every storage mask times every per-agent need depth. An agent with depth
/// `d` needs levels `0..d`; each of its needed chunks is charged its cheapest
/// delivery time on all of its outgoing and incoming links. Each link then
/// uses the best level both endpoints hold.
pub fn global_optimum(inst: &NetworkInstance, k: usize) -> f64 {
    let (n, levels) = (inst.n_agents, inst.n_levels);
    let flow: Vec<f64> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| inst.freq[i][j][k] + inst.freq[j][i][k]).sum())
        .collect();
    let mut best = f64::INFINITY;
    let mut tmin = vec![vec![0.0; levels]; n];
    for mask in 0u64..(1 << (n * levels)) {
        for i in 0..n {
            for l in 0..levels {
                tmin[i][l] = (0..n)
                    .filter(|&h| stored(mask, levels, h, l))
                    .map(|h| time(inst, h, i, k, l))
                    .fold(f64::INFINITY, f64::min);
            }
        }
        let cs = storage_sum(inst, mask, k);
        // prefix[i][d]: transmission charge of agent i at depth d
        let prefix: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut acc = vec![0.0; levels + 1];
                for l in 0..levels {
                    acc[l + 1] = acc[l] + tmin[i][l] * flow[i];
                }
                acc
            })
            .collect();

        let mut depth = vec![1usize; n];
        loop {
            let mut ot = 0.0;
            for i in 0..n {
                ot += prefix[i][depth[i]];
            }
            if ot.is_finite() {
                let mut la = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            let top = depth[i].min(depth[j]) - 1;
                            let a = (0..=top).map(|l| inst.align_loss[k][l]).fold(f64::INFINITY, f64::min);
                            la += inst.freq[i][j][k] * a;
                        }
                    }
                }
                let j_net = weighted(inst, la, ot, cs);
                if j_net < best {
                    best = j_net;
                }
            }
            // odometer over depths 1..=levels
            let mut p = 0;
            while p < n && depth[p] == levels {
                depth[p] = 1;
                p += 1;
            }
            if p == n {
                break;
            }
            depth[p] += 1;
        }
    }
    best
}

/// `(L_A, O_T, C_S)` of a policy, summed straight from the arrays.
pub fn resum(inst: &NetworkInstance, p: &AllocationPolicy, k: usize) -> (f64, f64, f64) {
    let (n, levels) = (inst.n_agents, inst.n_levels);
    let (mut la, mut ot, mut cs) = (0.0, 0.0, 0.0);
    for l in (0..levels).rev() {
        for j in (0..n).rev() {
            for i in (0..n).rev() {
                if i == j {
                    continue;
                }
                la += inst.freq[i][j][k] * inst.align_loss[k][l] * f64::from(p.exploit[i][j][l]);
                for h in 0..n {
                    let f = inst.freq[i][j][k];
                    ot += f * f64::from(p.tx_to_tx[h][i][j][l]) * time(inst, h, i, k, l);
                    ot += f * f64::from(p.tx_to_rx[h][i][j][l]) * time(inst, h, j, k, l);
                }
            }
            cs += inst.chunk_size[k][l] * f64::from(p.store[j][l]);
        }
    }
    (la, ot, cs)
}

pub fn resum_weighted(inst: &NetworkInstance, p: &AllocationPolicy, k: usize) -> f64 {
    let (la, ot, cs) = resum(inst, p, k);
    weighted(inst, la, ot, cs)
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
