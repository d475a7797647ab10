#![allow(dead_code)]

pub mod oracle;

use dekap_core::netgen::{generate_instance, GenConfig};
use dekap_core::{NetworkInstance, Weights};

/// Two agents, unit rates and sizes, alignment losses (0.4, 0.1).
pub fn two_agent() -> NetworkInstance {
    NetworkInstance {
        n_agents: 2,
        n_tasks: 1,
        n_levels: 2,
        freq: vec![vec![vec![0.0], vec![1.0]], vec![vec![1.0], vec![0.0]]],
        rate: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        chunk_size: vec![vec![1.0, 1.0]],
        align_loss: vec![vec![0.4, 0.1]],
        weights: Weights::default(),
        seed: None,
        generator: None,
    }
}

/// Single-task random instance under the normalized protocol.
pub fn random(n: usize, levels: usize, seed: u64) -> NetworkInstance {
    generate_instance(&GenConfig::new(n, 1, levels, seed)).expect("valid generator config")
}
