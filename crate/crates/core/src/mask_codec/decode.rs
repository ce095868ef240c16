use log::debug;

use crate::error::{Error, Result};
use crate::geometry::{fit_quadratic, resample_polyline, Axis, DirectionLabel, Point3, Polyline};
use crate::mask_codec::{DecodeConfig, GridSpec, InstanceMask, SampleSpacing};
use crate::scalar::Real;

/// Oversampling factor used before arc-length resampling.
const ARC_OVERSAMPLE: usize = 16;

/// Per-line expected locations `(independent, dependent)`.
///
/// For Up/Down masks each valid row yields `(row_center, E[y])`; for
/// Left/Right each valid column yields `(col_center, E[x])`.
pub fn line_points<T: Real>(
    mask: &InstanceMask<T>,
    grid: &GridSpec<T>,
    cfg: &DecodeConfig,
) -> Result<Vec<(T, T)>> {
    if !mask.matches(grid) {
        return Err(Error::InvalidGrid(format!(
            "mask is {}x{}, grid is {}x{}",
            mask.rows(),
            mask.cols(),
            grid.rows,
            grid.cols
        )));
    }
    cfg.validate()?;
    let valid = T::lit(cfg.row_valid_threshold);
    let floor = T::lit(cfg.cell_mass_floor);
    let longitudinal = mask.direction.is_longitudinal();
    let (lines, cells) = if longitudinal {
        (grid.rows, grid.cols)
    } else {
        (grid.cols, grid.rows)
    };
    let at = |line: usize, cell: usize| {
        if longitudinal {
            mask.get(line, cell)
        } else {
            mask.get(cell, line)
        }
    };
    let cell_center = |cell: usize| {
        if longitudinal {
            grid.col_center(cell)
        } else {
            grid.row_center(cell)
        }
    };
    let line_center = |line: usize| {
        if longitudinal {
            grid.row_center(line)
        } else {
            grid.col_center(line)
        }
    };

    let mut out = Vec::new();
    for line in 0..lines {
        let peak = (0..cells).map(|c| at(line, c)).fold(T::zero(), T::max);
        if peak < valid {
            continue;
        }
        let mut mass = T::zero();
        let mut moment = T::zero();
        for cell in 0..cells {
            let w = at(line, cell);
            if w >= floor {
                mass = mass + w;
                moment = moment + w * cell_center(cell);
            }
        }
        if mass > T::zero() {
            out.push((line_center(line), moment / mass));
        }
    }
    Ok(out)
}

/// Decodes an instance mask into an ordered polyline with `z = 0`.
pub fn decode_mask<T: Real>(
    mask: &InstanceMask<T>,
    grid: &GridSpec<T>,
    cfg: &DecodeConfig,
) -> Result<Polyline<T>> {
    let lines = line_points(mask, grid, cfg)?;
    if lines.len() < cfg.min_valid_lines {
        debug!(
            "dropping {} mask: {} valid lines < {}",
            mask.direction,
            lines.len(),
            cfg.min_valid_lines
        );
        return Err(Error::DecodeFailed {
            valid: lines.len(),
            required: cfg.min_valid_lines,
        });
    }
    let label = mask.direction;
    let axis = if label.is_longitudinal() { Axis::X } else { Axis::Y };
    let fit = fit_quadratic(&lines, axis)?;

    // Lines are produced in ascending order of their center.
    let t_lo = lines[0].0;
    let t_hi = lines[lines.len() - 1].0;
    let count = match cfg.spacing {
        SampleSpacing::IndependentAxis => cfg.sample_count,
        SampleSpacing::ArcLength => (cfg.sample_count - 1) * ARC_OVERSAMPLE + 1,
    };
    let denom = T::from_count(count - 1);
    let mut points: Vec<Point3<T>> = (0..count)
        .map(|i| {
            let t = if i == count - 1 {
                t_hi
            } else {
                t_lo + (t_hi - t_lo) * T::from_count(i) / denom
            };
            let u = fit.eval(t);
            match axis {
                Axis::X => Point3::new(t, u, T::zero()),
                Axis::Y => Point3::new(u, t, T::zero()),
            }
        })
        .collect();
    if matches!(label, DirectionLabel::Down | DirectionLabel::Right) {
        points.reverse();
    }
    let poly = Polyline::new(points)?;
    match cfg.spacing {
        SampleSpacing::IndependentAxis => Ok(poly),
        SampleSpacing::ArcLength => resample_polyline(&poly, cfg.sample_count),
    }
}
