use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::schema::{LayerShape, LevelSchema};
use super::target::DistillTarget;
use super::DistillError;

/// One `(B, A)` pair per layer at the top rank. Lower levels are views.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedFactors {
    pub schema: LevelSchema,
    pub b: Vec<DMatrix<f64>>,
    pub a: Vec<DMatrix<f64>>,
}

/// Owned copy of the factors active at one rank.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelFactors {
    pub rank: usize,
    pub b: Vec<DMatrix<f64>>,
    pub a: Vec<DMatrix<f64>>,
}

impl LevelFactors {
    /// Keeps the first `rank` columns of each `B` and rows of each `A`.
    pub fn truncated(&self, rank: usize) -> Self {
        let rank = rank.min(self.rank);
        Self {
            rank,
            b: self.b.iter().map(|m| m.columns(0, rank).into_owned()).collect(),
            a: self.a.iter().map(|m| m.rows(0, rank).into_owned()).collect(),
        }
    }

    /// Little-endian dump: every `B` row-major, then every `A` row-major.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for m in self.b.iter().chain(&self.a) {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    out.extend_from_slice(&m[(i, j)].to_le_bytes());
                }
            }
        }
        out
    }
}

impl NestedFactors {
    pub fn zeros(shapes: &[LayerShape], schema: &LevelSchema) -> Result<Self, DistillError> {
        schema.check(shapes)?;
        let r = schema.max_rank();
        Ok(Self {
            schema: schema.clone(),
            b: shapes.iter().map(|s| DMatrix::zeros(s.input, r)).collect(),
            a: shapes.iter().map(|s| DMatrix::zeros(r, s.output)).collect(),
        })
    }

    /// `B` entries drawn from `N(0, 1/I)`, `A` zero, so the initial product is zero.
    pub fn init<R: Rng>(shapes: &[LayerShape], schema: &LevelSchema, rng: &mut R) -> Result<Self, DistillError> {
        let mut f = Self::zeros(shapes, schema)?;
        for b in &mut f.b {
            let scale = 1.0 / (b.nrows() as f64).sqrt();
            for v in b.iter_mut() {
                *v = scale * rng.sample::<f64, _>(StandardNormal);
            }
        }
        Ok(f)
    }

    pub fn shapes(&self) -> Vec<LayerShape> {
        self.b.iter().zip(&self.a).map(|(b, a)| LayerShape::new(b.nrows(), a.ncols())).collect()
    }

    pub fn n_levels(&self) -> usize {
        self.schema.n_levels()
    }

    pub fn level(&self, l: usize) -> LevelFactors {
        let r = self.schema.ranks[l];
        LevelFactors {
            rank: r,
            b: self.b.iter().map(|m| m.columns(0, r).into_owned()).collect(),
            a: self.a.iter().map(|m| m.rows(0, r).into_owned()).collect(),
        }
    }

    /// Product `B[:, :r] A[:r, :]` of layer `m` at level `l`.
    pub fn product(&self, m: usize, l: usize) -> DMatrix<f64> {
        let r = self.schema.ranks[l];
        self.b[m].columns(0, r) * self.a[m].rows(0, r)
    }

    pub fn is_finite(&self) -> bool {
        self.b.iter().chain(&self.a).all(|m| m.iter().all(|v| v.is_finite()))
    }
}

fn residual(f: &NestedFactors, t: &DistillTarget, m: usize, l: usize) -> DMatrix<f64> {
    f.product(m, l) - &t.layers[m]
}

/// Squared Frobenius residual of level `l`, summed over layers.
pub fn level_loss(f: &NestedFactors, t: &DistillTarget, l: usize) -> f64 {
    (0..f.b.len()).map(|m| residual(f, t, m, l).norm_squared()).sum()
}

/// Gradient of [`level_loss`] with respect to the active blocks only:
/// `b[m]` is `I x r_l` and `a[m]` is `r_l x O`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGradient {
    pub b: Vec<DMatrix<f64>>,
    pub a: Vec<DMatrix<f64>>,
}

pub fn level_gradient(f: &NestedFactors, t: &DistillTarget, l: usize) -> LevelGradient {
    loss_and_gradient(f, t, l).1
}

pub(crate) fn loss_and_gradient(f: &NestedFactors, t: &DistillTarget, l: usize) -> (f64, LevelGradient) {
    let r = f.schema.ranks[l];
    let mut loss = 0.0;
    let mut gb = Vec::with_capacity(f.b.len());
    let mut ga = Vec::with_capacity(f.a.len());
    for m in 0..f.b.len() {
        let res = residual(f, t, m, l);
        loss += res.norm_squared();
        let res = res * 2.0;
        gb.push(&res * f.a[m].rows(0, r).transpose());
        ga.push(f.b[m].columns(0, r).transpose() * &res);
    }
    (loss, LevelGradient { b: gb, a: ga })
}
