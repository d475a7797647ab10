use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::schema::{check_shapes, LayerShape};
use super::DistillError;

/// Per-layer parameter deltas to approximate.
#[derive(Debug, Clone, PartialEq)]
pub struct DistillTarget {
    pub layers: Vec<DMatrix<f64>>,
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

impl DistillTarget {
    pub fn new(layers: Vec<DMatrix<f64>>) -> Result<Self, DistillError> {
        let t = Self { layers };
        check_shapes(&t.shapes())?;
        Ok(t)
    }

    /// Row-major construction of a single-layer target.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, DistillError> {
        Self::from_layer_rows(std::slice::from_ref(&rows.to_vec()))
    }

    /// One row-major matrix per layer.
    pub fn from_layer_rows(layers: &[Vec<Vec<f64>>]) -> Result<Self, DistillError> {
        let mut out = Vec::with_capacity(layers.len());
        for (m, rows) in layers.iter().enumerate() {
            let o = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|r| r.len() != o) {
                return Err(DistillError::ShapeMismatch(format!("layer {m} has ragged rows")));
            }
            if rows.iter().flatten().any(|v| !v.is_finite()) {
                return Err(DistillError::ShapeMismatch(format!("layer {m} has non-finite entries")));
            }
            out.push(DMatrix::from_fn(rows.len(), o, |i, j| rows[i][j]));
        }
        Self::new(out)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self { layers: vec![DMatrix::from_diagonal(&DVector::from_column_slice(values))] }
    }

    /// `U diag(sigma) V^T` per layer with `sigma_i = scale * decay^i` and
    /// random orthogonal `U`, `V`.
    pub fn synthetic(shapes: &[LayerShape], decay: f64, scale: f64, seed: u64) -> Result<Self, DistillError> {
        check_shapes(shapes)?;
        if !(decay > 0.0 && decay <= 1.0) || !scale.is_finite() || scale <= 0.0 {
            return Err(DistillError::InvalidConfig(format!(
                "need decay in (0, 1] and positive scale, got {decay} and {scale}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = shapes
            .iter()
            .map(|s| {
                let u = random_orthogonal(&mut rng, s.input);
                let v = random_orthogonal(&mut rng, s.output);
                let p = s.min_dim();
                let sigma = DMatrix::from_fn(p, p, |i, j| if i == j { scale * decay.powi(i as i32) } else { 0.0 });
                u.columns(0, p) * sigma * v.columns(0, p).transpose()
            })
            .collect();
        Ok(Self { layers })
    }

    pub fn shapes(&self) -> Vec<LayerShape> {
        self.layers.iter().map(|m| LayerShape::new(m.nrows(), m.ncols())).collect()
    }

    pub fn squared_norm(&self) -> f64 {
        self.layers.iter().map(|m| m.norm_squared()).sum()
    }
}
