use std::ops::Add;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::AllocationPolicy;

/// Cost sentinel for infeasible policies. Compares above every finite value.
pub const INFEASIBLE: f64 = f64::INFINITY;

/// JSON has no infinity; `+inf` is written as `null` and read back as `+inf`.
pub mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// The three network metrics and their weighted sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub align_loss_total: f64,
    pub tx_overhead_total: f64,
    pub storage_cost_total: f64,
    #[serde(with = "inf_as_null")]
    pub network_loss: f64,
    pub feasible: bool,
}

impl MetricsReport {
    pub fn zero() -> Self {
        Self {
            align_loss_total: 0.0,
            tx_overhead_total: 0.0,
            storage_cost_total: 0.0,
            network_loss: 0.0,
            feasible: true,
        }
    }

    /// Builds a report; the network loss is the weighted sum when feasible and
    /// [`INFEASIBLE`] otherwise.
    pub fn from_parts(
        weights: &super::Weights,
        align: f64,
        tx: f64,
        storage: f64,
        feasible: bool,
    ) -> Self {
        let network_loss = if feasible {
            weights.eta_a * align + weights.eta_t * tx + weights.eta_s * storage
        } else {
            INFEASIBLE
        };
        Self {
            align_loss_total: align,
            tx_overhead_total: tx,
            storage_cost_total: storage,
            network_loss,
            feasible,
        }
    }

    /// Relative agreement of every field within `rel`.
    pub fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        let close = |a: f64, b: f64| {
            if a.is_infinite() || b.is_infinite() {
                return a == b;
            }
            (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
        };
        self.feasible == other.feasible
            && close(self.align_loss_total, other.align_loss_total)
            && close(self.tx_overhead_total, other.tx_overhead_total)
            && close(self.storage_cost_total, other.storage_cost_total)
            && close(self.network_loss, other.network_loss)
    }
}

impl Add for MetricsReport {
    type Output = MetricsReport;

    fn add(self, rhs: Self) -> Self {
        let feasible = self.feasible && rhs.feasible;
        Self {
            align_loss_total: self.align_loss_total + rhs.align_loss_total,
            tx_overhead_total: self.tx_overhead_total + rhs.tx_overhead_total,
            storage_cost_total: self.storage_cost_total + rhs.storage_cost_total,
            network_loss: if feasible {
                self.network_loss + rhs.network_loss
            } else {
                INFEASIBLE
            },
            feasible,
        }
    }
}

/// Output of a solver: one policy per solved task plus diagnostics.
///
/// `wall_time` is measured with a monotonic clock. It is not serialized so
/// that result files are byte-reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solver: String,
    pub tasks: Vec<usize>,
    pub policies: Vec<AllocationPolicy>,
    pub metrics: MetricsReport,
    pub iterations: u64,
    pub evaluations: u64,
    /// Network loss after each accepted move (local-search solvers only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<f64>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SolveResult {
    /// Concatenates per-task results of the same solver.
    pub fn merge(parts: Vec<SolveResult>) -> Option<SolveResult> {
        let mut iter = parts.into_iter();
        let mut acc = iter.next()?;
        for part in iter {
            acc.tasks.extend(part.tasks);
            acc.policies.extend(part.policies);
            acc.metrics = acc.metrics + part.metrics;
            acc.iterations += part.iterations;
            acc.evaluations += part.evaluations;
            acc.trace.extend(part.trace);
            acc.wall_time += part.wall_time;
        }
        Some(acc)
    }
}
