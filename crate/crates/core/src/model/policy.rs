use serde::{Deserialize, Serialize};

use super::ModelError;

/// Binary decision variables of one task.
///
/// Arrays are indexed exactly as written: `exploit[i][j][l]`, `store[i][l]`,
/// `tx_to_tx[h][i][j][l]`, `tx_to_rx[h][i][j][l]`, `needed[i][l]`. Entries on
/// the `i == j` diagonal of link-indexed arrays are not decision variables and
/// stay zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationPolicy {
    pub exploit: Vec<Vec<Vec<u8>>>,
    pub store: Vec<Vec<u8>>,
    pub tx_to_tx: Vec<Vec<Vec<Vec<u8>>>>,
    pub tx_to_rx: Vec<Vec<Vec<Vec<u8>>>>,
    pub needed: Vec<Vec<u8>>,
}

impl AllocationPolicy {
    /// All-zero policy for `n` agents and `levels` levels.
    pub fn zeros(n: usize, levels: usize) -> Self {
        Self {
            exploit: vec![vec![vec![0; levels]; n]; n],
            store: vec![vec![0; levels]; n],
            tx_to_tx: vec![vec![vec![vec![0; levels]; n]; n]; n],
            tx_to_rx: vec![vec![vec![vec![0; levels]; n]; n]; n],
            needed: vec![vec![0; levels]; n],
        }
    }

    pub fn n_agents(&self) -> usize {
        self.store.len()
    }

    pub fn n_levels(&self) -> usize {
        self.store.first().map_or(0, Vec::len)
    }

    /// Level used by link `i -> j`, if exactly one is selected.
    pub fn link_level(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.exploit[i][j];
        let mut found = None;
        for (l, &v) in row.iter().enumerate() {
            if v != 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(l);
            }
        }
        found
    }

    /// Verifies every array has shape consistent with `n` agents and `levels` levels.
    pub fn check_shape(&self, n: usize, levels: usize) -> Result<(), ModelError> {
        let mismatch = |field: &str| ModelError::Dimension(format!(
            "policy field `{field}` does not match {n} agents and {levels} levels"
        ));
        let vec2 = |v: &Vec<Vec<u8>>| v.len() == n && v.iter().all(|r| r.len() == levels);
        let vec3 = |v: &Vec<Vec<Vec<u8>>>| v.len() == n && v.iter().all(vec2);
        if !vec3(&self.exploit) {
            return Err(mismatch("exploit"));
        }
        if !vec2(&self.store) {
            return Err(mismatch("store"));
        }
        if !(self.tx_to_tx.len() == n && self.tx_to_tx.iter().all(vec3)) {
            return Err(mismatch("tx_to_tx"));
        }
        if !(self.tx_to_rx.len() == n && self.tx_to_rx.iter().all(vec3)) {
            return Err(mismatch("tx_to_rx"));
        }
        if !vec2(&self.needed) {
            return Err(mismatch("needed"));
        }
        Ok(())
    }
}
