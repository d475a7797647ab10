use std::path::Path;

use dekap_core::allocation::{check_constraints, task_metrics, ConstraintViolation};
use dekap_core::{AllocationPolicy, MetricsReport, SolveResult};
use serde::Deserialize;

use crate::error::CliError;
use crate::files::{load_instance, read_input};

/// Relative tolerance when comparing recomputed and embedded metrics.
pub const METRICS_TOLERANCE: f64 = 1e-9;

/// Accepted policy files: a solver result, a list of per-task policies, or a
/// single policy for task 0.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PolicyFile {
    Result(Box<SolveResult>),
    Many(Vec<AllocationPolicy>),
    One(Box<AllocationPolicy>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    /// `(task, violation)` pairs.
    pub violations: Vec<(usize, ConstraintViolation)>,
    pub metrics: MetricsReport,
    /// Metrics stored in the file, when it had any.
    pub embedded: Option<MetricsReport>,
}

impl VerifyReport {
    pub fn metrics_match(&self) -> bool {
        self.embedded.as_ref().is_none_or(|e| e.approx_eq(&self.metrics, METRICS_TOLERANCE))
    }
}

pub fn verify(instance: &Path, policy: &Path) -> Result<VerifyReport, CliError> {
    let inst = load_instance(instance)?;
    let (tasks, policies, embedded) = match read_input::<PolicyFile>(policy)? {
        PolicyFile::Result(r) => (r.tasks, r.policies, Some(r.metrics)),
        PolicyFile::Many(p) => ((0..p.len()).collect(), p, None),
        PolicyFile::One(p) => (vec![0], vec![*p], None),
    };
    if tasks.len() != policies.len() {
        return Err(CliError::Validation(format!("{} task ids for {} policies", tasks.len(), policies.len())));
    }
    let mut violations = Vec::new();
    let mut metrics = MetricsReport::zero();
    for (&k, p) in tasks.iter().zip(&policies) {
        inst.check_task(k)?;
        p.check_shape(inst.n_agents, inst.n_levels)?;
        violations.extend(check_constraints(&inst, p, k).into_iter().map(|v| (k, v)));
        metrics = metrics + task_metrics(&inst, p, k)?;
    }
    Ok(VerifyReport { violations, metrics, embedded })
}

/// Prints the report; violations or a metrics mismatch are a validation error.
pub fn run_verify(instance: &Path, policy: &Path) -> Result<VerifyReport, CliError> {
    let report = verify(instance, policy)?;
    for (k, v) in &report.violations {
        println!("task {k}: {v}");
    }
    if report.violations.is_empty() {
        println!("feasible");
    }
    let m = &report.metrics;
    println!(
        "J_net={} L_A={} O_T={} C_S={}",
        m.network_loss, m.align_loss_total, m.tx_overhead_total, m.storage_cost_total
    );
    if let Some(e) = &report.embedded {
        if report.metrics_match() {
            println!("embedded metrics match");
        } else {
            println!("embedded metrics differ: file says J_net={}", e.network_loss);
        }
    }
    if !report.violations.is_empty() {
        return Err(CliError::Validation(format!("{} constraint violation(s)", report.violations.len())));
    }
    if !report.metrics_match() {
        return Err(CliError::Validation("embedded metrics do not match the policy".into()));
    }
    Ok(report)
}
