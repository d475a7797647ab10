use serde::{Deserialize, Serialize};

use crate::model::ModelError;

/// Which differential chunks each agent keeps locally, for one task.
///
/// Stored as one bit row per agent (bit `l` set means chunk `l` is stored),
/// so at most 32 levels are supported. Serializes as a `[i][l]` matrix of 0/1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u8>>", into = "Vec<Vec<u8>>")]
pub struct StorageConfig {
    n_levels: usize,
    rows: Vec<u32>,
}

pub const MAX_LEVELS: usize = 32;

impl StorageConfig {
    pub fn empty(n_agents: usize, n_levels: usize) -> Self {
        assert!(n_levels <= MAX_LEVELS, "at most {MAX_LEVELS} levels supported");
        Self { n_levels, rows: vec![0; n_agents] }
    }

    /// Every agent stores every chunk.
    pub fn full(n_agents: usize, n_levels: usize) -> Self {
        let mut s = Self::empty(n_agents, n_levels);
        let all = s.full_row();
        s.rows.iter_mut().for_each(|r| *r = all);
        s
    }

    /// Decodes a bitmask where bit `i * n_levels + l` is `s_i[l]`.
    pub fn from_mask(mask: u64, n_agents: usize, n_levels: usize) -> Self {
        let mut s = Self::empty(n_agents, n_levels);
        s.set_mask(mask);
        s
    }

    /// Overwrites every row from a bitmask laid out as in [`Self::from_mask`].
    pub fn set_mask(&mut self, mask: u64) {
        let row_mask = self.full_row() as u64;
        let levels = self.n_levels;
        for (i, row) in self.rows.iter_mut().enumerate() {
            *row = ((mask >> (i * levels)) & row_mask) as u32;
        }
    }

    pub fn to_mask(&self) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &r)| acc | ((r as u64) << (i * self.n_levels)))
    }

    pub fn from_matrix(m: &[Vec<u8>]) -> Result<Self, ModelError> {
        let n_levels = m.first().map_or(0, Vec::len);
        if n_levels > MAX_LEVELS {
            return Err(ModelError::Dimension(format!("storage has {n_levels} levels, at most {MAX_LEVELS} supported")));
        }
        let mut s = Self::empty(m.len(), n_levels);
        for (i, row) in m.iter().enumerate() {
            if row.len() != n_levels {
                return Err(ModelError::Dimension(format!("storage row {i} has {} levels, expected {n_levels}", row.len())));
            }
            for (l, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => s.rows[i] |= 1 << l,
                    other => {
                        return Err(ModelError::Dimension(format!("storage entry [{i}][{l}] = {other} is not binary")))
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|&r| (0..self.n_levels).map(|l| ((r >> l) & 1) as u8).collect())
            .collect()
    }

    pub fn n_agents(&self) -> usize {
        self.rows.len()
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    /// Bit pattern with all `n_levels` bits set.
    pub fn full_row(&self) -> u32 {
        if self.n_levels == 32 {
            u32::MAX
        } else {
            (1u32 << self.n_levels) - 1
        }
    }

    #[inline]
    pub fn get(&self, i: usize, l: usize) -> bool {
        (self.rows[i] >> l) & 1 == 1
    }

    pub fn set(&mut self, i: usize, l: usize, stored: bool) {
        if stored {
            self.rows[i] |= 1 << l;
        } else {
            self.rows[i] &= !(1 << l);
        }
    }

    pub fn row(&self, i: usize) -> u32 {
        self.rows[i]
    }

    pub fn set_row(&mut self, i: usize, row: u32) {
        self.rows[i] = row & self.full_row();
    }

    /// Number of stored chunks across all agents.
    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }
}

impl TryFrom<Vec<Vec<u8>>> for StorageConfig {
    type Error = ModelError;

    fn try_from(m: Vec<Vec<u8>>) -> Result<Self, Self::Error> {
        Self::from_matrix(&m)
    }
}

impl From<StorageConfig> for Vec<Vec<u8>> {
    fn from(s: StorageConfig) -> Self {
        s.to_matrix()
    }
}
