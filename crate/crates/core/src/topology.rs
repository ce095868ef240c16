//! Score-matrix machinery of the relationship head: sinusoidal encodings of
//! centerline endpoints, Sinkhorn normalization and adjacency extraction.
//!
//! Rows are predecessor candidates and columns successor candidates; nothing
//! here symmetrizes a matrix.

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::metrics::ScoredEdge;
use crate::scalar::Real;

pub const DEFAULT_SINKHORN_ITERATIONS: usize = 100;
pub const DEFAULT_SINKHORN_EPSILON: f64 = 1e-12;
/// Early-exit tolerance on the row and column marginals.
const MARGINAL_TOLERANCE: f64 = 1e-9;

/// Dense non-negative score matrix with instance ids on both axes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
    pub row_ids: Vec<usize>,
    pub col_ids: Vec<usize>,
}

impl<T: Real> ScoreMatrix<T> {
    pub fn new(values: Vec<T>, row_ids: Vec<usize>, col_ids: Vec<usize>) -> Result<Self> {
        let (rows, cols) = (row_ids.len(), col_ids.len());
        if values.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{} values for {rows} row ids and {cols} column ids",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) = {} is negative or not finite",
                i / cols.max(1),
                i % cols.max(1),
                values[i]
            )));
        }
        Ok(Self {
            rows,
            cols,
            values,
            row_ids,
            col_ids,
        })
    }

    /// Matrix with ids `0..rows` and `0..cols`.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        Self::new(
            rows.into_iter().flatten().collect(),
            (0..n).collect(),
            (0..m).collect(),
        )
    }

    pub fn empty() -> Self {
        Self {
            rows: 0,
            cols: 0,
            values: Vec::new(),
            row_ids: Vec::new(),
            col_ids: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.values[r * self.cols + c]
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|r| {
                self.values[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .copied()
                    .sum()
            })
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c)).sum())
            .collect()
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * k).collect(),
            ..self.clone()
        }
    }
}

/// Alternating row / column normalization.
///
/// Adds `epsilon` to every entry first, then runs up to `iterations` rounds,
/// stopping early once every row and column sum is within 1e-9 of one.
pub fn sinkhorn_normalize<T: Real>(
    m: &ScoreMatrix<T>,
    iterations: usize,
    epsilon: T,
) -> Result<ScoreMatrix<T>> {
    if m.values.iter().any(|v| !v.is_finite()) || !epsilon.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    let mut out = m.clone();
    if out.rows == 0 || out.cols == 0 {
        return Ok(out);
    }
    for v in out.values.iter_mut() {
        *v = *v + epsilon;
    }
    if out.values.iter().any(|v| *v <= T::zero()) {
        return Err(Error::InvalidMatrix(
            "entries must be positive after adding epsilon".into(),
        ));
    }
    let tol = T::lit(MARGINAL_TOLERANCE);
    let (rows, cols) = (out.rows, out.cols);
    for _ in 0..iterations {
        for r in 0..rows {
            let row = &mut out.values[r * cols..(r + 1) * cols];
            let s: T = row.iter().copied().sum();
            row.iter_mut().for_each(|v| *v = *v / s);
        }
        for (c, s) in out.col_sums().into_iter().enumerate() {
            for r in 0..rows {
                out.values[r * cols + c] = out.values[r * cols + c] / s;
            }
        }
        let dev = |sums: Vec<T>| {
            sums.into_iter()
                .map(|s| (s - T::one()).abs())
                .fold(T::zero(), T::max)
        };
        if dev(out.row_sums()) < tol && dev(out.col_sums()) < tol {
            break;
        }
    }
    Ok(out)
}

/// Edges `row_id -> col_id` for every entry at or above `threshold`, sorted by
/// descending score (ties in row-major order).
pub fn adjacency_from_scores<T: Real>(m: &ScoreMatrix<T>, threshold: T) -> Vec<ScoredEdge> {
    let mut edges: Vec<ScoredEdge> = (0..m.rows)
        .flat_map(|r| (0..m.cols).map(move |c| (r, c)))
        .filter(|&(r, c)| m.get(r, c) >= threshold)
        .map(|(r, c)| ScoredEdge {
            from: m.row_ids[r],
            to: m.col_ids[c],
            score: m.get(r, c).to_f64_lossy(),
        })
        .collect();
    edges.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(std::cmp::Ordering::Equal));
    edges
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionalEncoding<T> {
    dim: usize,
    temperature: T,
}

impl<T: Real> PositionalEncoding<T> {
    pub fn new(dim: usize, temperature: T) -> Result<Self> {
        if dim < 2 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidDim(dim));
        }
        if !(temperature > T::zero()) || !temperature.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "temperature {temperature} must be positive"
            )));
        }
        Ok(Self { dim, temperature })
    }

    pub fn with_dim(dim: usize) -> Result<Self> {
        Self::new(dim, T::lit(10000.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn temperature(&self) -> T {
        self.temperature
    }
}

/// Interleaved sin/cos: component `2i` is `sin(v / temperature^(2i/dim))`,
/// component `2i + 1` the matching cosine.
pub fn sinusoidal_encode<T: Real>(value: T, pe: &PositionalEncoding<T>) -> Vec<T> {
    let dim = T::from_count(pe.dim);
    let mut out = Vec::with_capacity(pe.dim);
    for i in 0..pe.dim / 2 {
        let freq = pe.temperature.powf(T::from_count(2 * i) / dim);
        let arg = value / freq;
        out.push(arg.sin());
        out.push(arg.cos());
    }
    out
}

/// Concatenated per-coordinate encodings of a point (`3 * dim` values).
pub fn sinusoidal_encode_point<T: Real>(p: &Point3<T>, pe: &PositionalEncoding<T>) -> Vec<T> {
    [p.x, p.y, p.z]
        .into_iter()
        .flat_map(|v| sinusoidal_encode(v, pe))
        .collect()
}

/// Encoding of a centerline's start and end points, start first.
pub fn encode_endpoints<T: Real>(start: &Point3<T>, end: &Point3<T>, pe: &PositionalEncoding<T>) -> Vec<T> {
    let mut v = sinusoidal_encode_point(start, pe);
    v.extend(sinusoidal_encode_point(end, pe));
    v
}
