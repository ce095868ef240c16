//! BEV instance-mask encoding of centerlines and decoding back to ordered
//! polylines, plus the mask/Bezier fusion policies.
//!
//! Grid rows index the forward `x` axis and columns the lateral `y` axis.
//! Decoding runs an expectation over each row (Up/Down labels) or column
//! (Left/Right labels), fits a quadratic through the per-line locations and
//! samples it at a fixed point count with `z = 0`.

mod decode;
mod fusion;
mod raster;

use std::fmt;
use std::str::FromStr;

pub use decode::{decode_mask, line_points};
pub use fusion::{fuse_predictions, resolve_mask_bezier, FusionPolicy};
pub use raster::rasterize_centerline;

use crate::error::{Error, Result};
use crate::geometry::{DirectionLabel, Roi, DEFAULT_SAMPLE_COUNT};
use crate::scalar::Real;

/// Default BEV grid: 200 rows over 100 m of `x`, 104 columns over 50 m of `y`.
pub const DEFAULT_ROWS: usize = 200;
pub const DEFAULT_COLS: usize = 104;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub rows: usize,
    pub cols: usize,
    pub roi: Roi<T>,
}

impl<T: Real> GridSpec<T> {
    pub fn new(rows: usize, cols: usize, roi: Roi<T>) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidGrid(format!(
                "{rows}x{cols}: both dimensions must be at least 2"
            )));
        }
        Ok(Self { rows, cols, roi })
    }

    pub fn cell_size_x(&self) -> T {
        self.roi.width_x() / T::from_count(self.rows)
    }

    pub fn cell_size_y(&self) -> T {
        self.roi.width_y() / T::from_count(self.cols)
    }

    /// Half the diagonal of one cell.
    pub fn half_cell_diagonal(&self) -> T {
        self.cell_size_x().hypot(self.cell_size_y()) / T::lit(2.0)
    }

    #[inline]
    pub fn row_center(&self, r: usize) -> T {
        self.roi.x_min + (T::from_count(r) + T::lit(0.5)) * self.roi.width_x() / T::from_count(self.rows)
    }

    #[inline]
    pub fn col_center(&self, c: usize) -> T {
        self.roi.y_min + (T::from_count(c) + T::lit(0.5)) * self.roi.width_y() / T::from_count(self.cols)
    }

    /// Continuous row coordinate of `x` (cell `r` spans `[r, r + 1)`).
    #[inline]
    pub(crate) fn row_coord(&self, x: T) -> T {
        (x - self.roi.x_min) * T::from_count(self.rows) / self.roi.width_x()
    }

    #[inline]
    pub(crate) fn col_coord(&self, y: T) -> T {
        (y - self.roi.y_min) * T::from_count(self.cols) / self.roi.width_y()
    }

    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self {
            rows: DEFAULT_ROWS,
            cols: DEFAULT_COLS,
            roi: Roi::default(),
        }
    }
}

/// One predicted (or rasterized) centerline instance on the BEV grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMask<T> {
    rows: usize,
    cols: usize,
    probs: Vec<T>,
    pub direction: DirectionLabel,
    pub confidence: T,
}

impl<T: Real> InstanceMask<T> {
    /// `probs` is row-major, `rows * cols` long, every value in `[0, 1]`.
    pub fn new(
        rows: usize,
        cols: usize,
        probs: Vec<T>,
        direction: DirectionLabel,
        confidence: T,
    ) -> Result<Self> {
        if probs.len() != rows * cols {
            return Err(Error::InvalidGrid(format!(
                "mask holds {} values, expected {rows}x{cols} = {}",
                probs.len(),
                rows * cols
            )));
        }
        let unit = |v: T| v >= T::zero() && v <= T::one();
        if let Some(i) = probs.iter().position(|&v| !unit(v)) {
            return Err(Error::InvalidGrid(format!(
                "cell ({}, {}) = {} outside [0, 1]",
                i / cols,
                i % cols,
                probs[i]
            )));
        }
        if !unit(confidence) {
            return Err(Error::InvalidScore(confidence.to_f64_lossy()));
        }
        Ok(Self {
            rows,
            cols,
            probs,
            direction,
            confidence,
        })
    }

    pub fn zeros(grid: &GridSpec<T>, direction: DirectionLabel) -> Self {
        Self {
            rows: grid.rows,
            cols: grid.cols,
            probs: vec![T::zero(); grid.cell_count()],
            direction,
            confidence: T::one(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.probs[r * self.cols + c]
    }

    /// Sets a cell, clamping into `[0, 1]`.
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.probs[r * self.cols + c] = v.max(T::zero()).min(T::one());
    }

    pub fn is_binary(&self) -> bool {
        self.probs.iter().all(|&v| v == T::zero() || v == T::one())
    }

    pub fn marked_cells(&self) -> usize {
        self.probs.iter().filter(|&&v| v > T::zero()).count()
    }

    pub fn matches(&self, grid: &GridSpec<T>) -> bool {
        self.rows == grid.rows && self.cols == grid.cols
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            probs: self.probs.iter().map(|&v| v * k).collect(),
            ..self.clone()
        }
    }
}

/// How the sampled points are spread along the fitted curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleSpacing {
    /// Uniform in the independent axis (row or column coordinate).
    #[default]
    IndependentAxis,
    /// Uniform in arc length along the fitted curve.
    ArcLength,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeConfig {
    /// A row/column is a valid line when its peak probability reaches this.
    pub row_valid_threshold: f64,
    /// Cells below this mass are excluded from the expectation.
    pub cell_mass_floor: f64,
    pub sample_count: usize,
    pub min_valid_lines: usize,
    pub spacing: SampleSpacing,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            row_valid_threshold: 0.5,
            cell_mass_floor: 0.05,
            sample_count: DEFAULT_SAMPLE_COUNT,
            min_valid_lines: 3,
            spacing: SampleSpacing::IndependentAxis,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        let (floor, thr) = (self.cell_mass_floor, self.row_valid_threshold);
        if !(floor > 0.0 && floor <= thr && thr <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < cell_mass_floor ({floor}) <= row_valid_threshold ({thr}) <= 1"
            )));
        }
        if self.sample_count < 2 {
            return Err(Error::InvalidSampleCount(self.sample_count));
        }
        if self.min_valid_lines < 2 {
            return Err(Error::InvalidConfig(format!(
                "min_valid_lines {} must be at least 2",
                self.min_valid_lines
            )));
        }
        Ok(())
    }

    /// Thresholds multiplied by `k`, for masks whose probabilities were scaled.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            row_valid_threshold: self.row_valid_threshold * k,
            cell_mass_floor: self.cell_mass_floor * k,
            ..*self
        }
    }
}

impl fmt::Display for SampleSpacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::IndependentAxis => "axis",
            Self::ArcLength => "arc-length",
        })
    }
}

impl FromStr for SampleSpacing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "axis" | "independent-axis" => Ok(Self::IndependentAxis),
            "arc-length" | "arclength" => Ok(Self::ArcLength),
            _ => Err(Error::InvalidConfig(format!("unknown sample spacing {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests;
