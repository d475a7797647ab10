use super::target::DistillTarget;

/// Best achievable rank-`r` residual: the squared singular values past `r`,
/// summed over layers. `r = 0` gives the squared norm of the target.
pub fn svd_oracle(target: &DistillTarget, r: usize) -> f64 {
    target
        .layers
        .iter()
        .map(|m| {
            let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            sv.iter().skip(r).map(|s| s * s).sum::<f64>()
        })
        .sum()
}
