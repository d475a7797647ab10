use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Tolerance used when checking that a frequency row sums to one.
pub const FREQ_SUM_TOLERANCE: f64 = 1e-9;

/// Objective weights on alignment loss, transmission overhead and storage cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub eta_a: f64,
    pub eta_t: f64,
    pub eta_s: f64,
}

impl Weights {
    pub const fn new(eta_a: f64, eta_t: f64, eta_s: f64) -> Self {
        Self { eta_a, eta_t, eta_s }
    }
}

impl Default for Weights {
    /// The normalized-network defaults: `(1.0, 0.5, 0.1)`.
    fn default() -> Self {
        Self::new(1.0, 0.5, 0.1)
    }
}

/// A complete allocation problem: agents, tasks, knowledge levels and costs.
///
/// Index conventions (all zero-based):
/// - `freq[i][j][k]`: how often agent `i` (Tx) talks to agent `j` (Rx) for task `k`;
/// - `rate[h][i]`: link rate from agent `h` to agent `i` (the diagonal is unused);
/// - `chunk_size[k][l]`: size of the differential chunk that upgrades level `l-1` to `l`;
/// - `align_loss[k][l]`: residual alignment loss when a link uses level `l` of task `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkInstance {
    pub n_agents: usize,
    pub n_tasks: usize,
    pub n_levels: usize,
    pub freq: Vec<Vec<Vec<f64>>>,
    pub rate: Vec<Vec<f64>>,
    pub chunk_size: Vec<Vec<f64>>,
    pub align_loss: Vec<Vec<f64>>,
    pub weights: Weights,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Free-form provenance (for example the generator configuration).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<serde_json::Value>,
}

/// One broken instance invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub index: Vec<usize>,
    pub rule: String,
}

impl Violation {
    fn new(field: &str, index: Vec<usize>, rule: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            index,
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.index.iter().map(|i| i.to_string()).collect();
        write!(f, "{}[{}]: {}", self.field, idx.join("]["), self.rule)
    }
}

impl NetworkInstance {
    /// Checks every structural and numeric invariant and lists what is broken.
    ///
    /// Shape problems are reported first; value checks are skipped for any
    /// array whose shape is wrong.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let (n, k_count, l_count) = (self.n_agents, self.n_tasks, self.n_levels);

        if n < 2 {
            out.push(Violation::new("n_agents", vec![], format!("need at least 2 agents, got {n}")));
        }
        if k_count < 1 {
            out.push(Violation::new("n_tasks", vec![], "need at least 1 task"));
        }
        if l_count < 1 {
            out.push(Violation::new("n_levels", vec![], "need at least 1 level"));
        }

        let freq_ok = self.freq.len() == n
            && self
                .freq
                .iter()
                .all(|row| row.len() == n && row.iter().all(|cell| cell.len() == k_count));
        if !freq_ok {
            out.push(Violation::new(
                "freq",
                vec![],
                format!("expected shape [{n}][{n}][{k_count}]"),
            ));
        }
        let rate_ok = self.rate.len() == n && self.rate.iter().all(|row| row.len() == n);
        if !rate_ok {
            out.push(Violation::new("rate", vec![], format!("expected shape [{n}][{n}]")));
        }
        let table_ok = |t: &Vec<Vec<f64>>| t.len() == k_count && t.iter().all(|r| r.len() == l_count);
        let chunk_ok = table_ok(&self.chunk_size);
        if !chunk_ok {
            out.push(Violation::new(
                "chunk_size",
                vec![],
                format!("expected shape [{k_count}][{l_count}]"),
            ));
        }
        let align_ok = table_ok(&self.align_loss);
        if !align_ok {
            out.push(Violation::new(
                "align_loss",
                vec![],
                format!("expected shape [{k_count}][{l_count}]"),
            ));
        }

        if freq_ok {
            for i in 0..n {
                for k in 0..k_count {
                    let mut sum = 0.0;
                    for j in 0..n {
                        let v = self.freq[i][j][k];
                        if i == j {
                            if v != 0.0 {
                                out.push(Violation::new("freq", vec![i, j, k], format!("self-link frequency must be 0, got {v}")));
                            }
                            continue;
                        }
                        if !v.is_finite() || v < 0.0 {
                            out.push(Violation::new("freq", vec![i, j, k], format!("must be finite and nonnegative, got {v}")));
                        }
                        sum += v;
                    }
                    if (sum - 1.0).abs() > FREQ_SUM_TOLERANCE {
                        out.push(Violation::new("freq", vec![i, k], format!("freq row ({i},{k}) sums to {sum}")));
                    }
                }
            }
        }
        if rate_ok {
            for h in 0..n {
                for i in 0..n {
                    let r = self.rate[h][i];
                    if h != i && !(r.is_finite() && r > 0.0) {
                        out.push(Violation::new("rate", vec![h, i], format!("R[{h}][{i}] must be finite and positive, got {r}")));
                    } else if h == i && !r.is_finite() {
                        out.push(Violation::new("rate", vec![h, i], "diagonal entry must be finite"));
                    }
                }
            }
        }
        if chunk_ok {
            for (k, row) in self.chunk_size.iter().enumerate() {
                for (l, &s) in row.iter().enumerate() {
                    if !(s.is_finite() && s > 0.0) {
                        out.push(Violation::new("chunk_size", vec![k, l], format!("must be finite and positive, got {s}")));
                    }
                }
            }
        }
        if align_ok {
            for (k, row) in self.align_loss.iter().enumerate() {
                for (l, &j) in row.iter().enumerate() {
                    if !(j.is_finite() && j >= 0.0) {
                        out.push(Violation::new("align_loss", vec![k, l], format!("must be finite and nonnegative, got {j}")));
                    }
                    if l > 0 && j > row[l - 1] {
                        out.push(Violation::new(
                            "align_loss",
                            vec![k, l],
                            format!("must be nonincreasing in level: {j} > {}", row[l - 1]),
                        ));
                    }
                }
            }
        }
        for (name, w) in [
            ("weights.eta_a", self.weights.eta_a),
            ("weights.eta_t", self.weights.eta_t),
            ("weights.eta_s", self.weights.eta_s),
        ] {
            if !(0.0..=1.0).contains(&w) {
                out.push(Violation::new(name, vec![], format!("must lie in [0, 1], got {w}")));
            }
        }
        out
    }

    /// Time for agent `h` to send chunk `l` of task `k` to agent `i`; zero for `h == i`.
    pub fn transmission_time(&self, h: usize, i: usize, k: usize, l: usize) -> Result<f64, ModelError> {
        self.check_agent(h)?;
        self.check_agent(i)?;
        self.check_task(k)?;
        self.check_level(l)?;
        if h == i {
            return Ok(0.0);
        }
        Ok(self.chunk_size[k][l] / self.rate[h][i])
    }

    pub fn check_agent(&self, i: usize) -> Result<(), ModelError> {
        if i >= self.n_agents {
            return Err(ModelError::IndexOutOfRange { what: "agent", index: i, len: self.n_agents });
        }
        Ok(())
    }

    pub fn check_task(&self, k: usize) -> Result<(), ModelError> {
        if k >= self.n_tasks {
            return Err(ModelError::IndexOutOfRange { what: "task", index: k, len: self.n_tasks });
        }
        Ok(())
    }

    pub fn check_level(&self, l: usize) -> Result<(), ModelError> {
        if l >= self.n_levels {
            return Err(ModelError::IndexOutOfRange { what: "level", index: l, len: self.n_levels });
        }
        Ok(())
    }

    /// Parses an instance without validating it.
    pub fn from_json_str(s: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String, ModelError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Reads an instance file and rejects it if any invariant is violated.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let inst = Self::from_json_str(&text)?;
        let violations = inst.validate();
        if violations.is_empty() {
            Ok(inst)
        } else {
            Err(ModelError::Invalid(violations))
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let mut text = self.to_json_string()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}
