use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::factors::NestedFactors;
use super::schema::{LayerShape, LevelSchema};
use super::DistillError;

/// Nonincreasing envelope of raw per-level losses (running minimum).
pub fn export_alignment_table(raw: &[f64]) -> Result<Vec<f64>, DistillError> {
    if raw.is_empty() {
        return Err(DistillError::InvalidTable("empty".into()));
    }
    if let Some((l, v)) = raw.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(DistillError::InvalidTable(format!("entry {l} is {v}")));
    }
    let mut best = f64::INFINITY;
    Ok(raw
        .iter()
        .map(|&v| {
            best = best.min(v);
            best
        })
        .collect())
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>], nrows: usize, ncols: usize) -> Result<DMatrix<f64>, DistillError> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(DistillError::Format(format!("expected a {nrows} x {ncols} block")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// JSON form of [`NestedFactors`]; matrices are nested row-major arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorsFile {
    pub shapes: Vec<LayerShape>,
    pub ranks: Vec<usize>,
    pub b: Vec<Vec<Vec<f64>>>,
    pub a: Vec<Vec<Vec<f64>>>,
}

impl From<&NestedFactors> for FactorsFile {
    fn from(f: &NestedFactors) -> Self {
        Self {
            shapes: f.shapes(),
            ranks: f.schema.ranks.clone(),
            b: f.b.iter().map(rows_of).collect(),
            a: f.a.iter().map(rows_of).collect(),
        }
    }
}

impl FactorsFile {
    pub fn into_factors(self) -> Result<NestedFactors, DistillError> {
        let schema = LevelSchema::from_ranks(self.ranks, &self.shapes)?;
        if self.b.len() != self.shapes.len() || self.a.len() != self.shapes.len() {
            return Err(DistillError::Format("factor count does not match layer count".into()));
        }
        let r = schema.max_rank();
        let mut f = NestedFactors::zeros(&self.shapes, &schema)?;
        for (m, s) in self.shapes.iter().enumerate() {
            f.b[m] = from_rows(&self.b[m], s.input, r)?;
            f.a[m] = from_rows(&self.a[m], r, s.output)?;
        }
        Ok(f)
    }
}

fn put(out: &mut impl Write, v: u64) -> std::io::Result<()> {
    out.write_all(&v.to_le_bytes())
}

fn put_block(out: &mut impl Write, m: &DMatrix<f64>) -> std::io::Result<()> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

impl NestedFactors {
    /// Flat little-endian dump. Header of u64 values: layer count `M`, level
    /// count `L`, the `L` ranks, then `(I_m, O_m)` for every layer. Body of
    /// f64 values: every `B_m` row-major, then every `A_m` row-major.
    pub fn write_bin(&self, out: &mut impl Write) -> std::io::Result<()> {
        put(out, self.b.len() as u64)?;
        put(out, self.schema.n_levels() as u64)?;
        for &r in &self.schema.ranks {
            put(out, r as u64)?;
        }
        for s in self.shapes() {
            put(out, s.input as u64)?;
            put(out, s.output as u64)?;
        }
        for m in self.b.iter().chain(&self.a) {
            put_block(out, m)?;
        }
        Ok(())
    }
}

fn take<const N: usize>(input: &mut impl Read) -> Result<[u8; N], DistillError> {
    let mut buf = [0u8; N];
    input.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => DistillError::Format("truncated".into()),
        _ => DistillError::Io(e),
    })?;
    Ok(buf)
}

fn take_usize(input: &mut impl Read) -> Result<usize, DistillError> {
    let v = u64::from_le_bytes(take::<8>(input)?);
    usize::try_from(v).ok().filter(|v| *v <= 1 << 32).ok_or_else(|| DistillError::Format(format!("implausible size {v}")))
}

fn take_block(input: &mut impl Read, nrows: usize, ncols: usize) -> Result<DMatrix<f64>, DistillError> {
    let mut m = DMatrix::zeros(nrows, ncols);
    for i in 0..nrows {
        for j in 0..ncols {
            m[(i, j)] = f64::from_le_bytes(take::<8>(input)?);
        }
    }
    Ok(m)
}

/// Reads the format written by [`NestedFactors::write_bin`].
pub fn read_factors_bin(input: &mut impl Read) -> Result<NestedFactors, DistillError> {
    let layers = take_usize(input)?;
    let levels = take_usize(input)?;
    let ranks = (0..levels).map(|_| take_usize(input)).collect::<Result<Vec<_>, _>>()?;
    let shapes = (0..layers)
        .map(|_| Ok(LayerShape::new(take_usize(input)?, take_usize(input)?)))
        .collect::<Result<Vec<_>, DistillError>>()?;
    let schema = LevelSchema::from_ranks(ranks, &shapes)?;
    let r = schema.max_rank();
    let mut f = NestedFactors::zeros(&shapes, &schema)?;
    for (m, s) in shapes.iter().enumerate() {
        f.b[m] = take_block(input, s.input, r)?;
    }
    for (m, s) in shapes.iter().enumerate() {
        f.a[m] = take_block(input, r, s.output)?;
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(DistillError::Format("trailing bytes".into()));
    }
    Ok(f)
}
