use crate::error::{Error, Result};
use crate::geometry::{clip_to_roi, point_segment_distance_xy, Point3, Polyline};
use crate::mask_codec::{GridSpec, InstanceMask};
use crate::scalar::Real;

/// Burns a centerline into a binary instance mask.
///
/// Marks every cell the polyline passes through, plus (for `thickness > 0`)
/// every cell whose center lies within `thickness / 2` of it in the ground
/// plane. The label comes from the unclipped polyline.
pub fn rasterize_centerline<T: Real>(
    p: &Polyline<T>,
    grid: &GridSpec<T>,
    thickness: T,
) -> Result<InstanceMask<T>> {
    if !(thickness >= T::zero()) || !thickness.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "thickness {thickness} must be finite and non-negative"
        )));
    }
    let pieces = clip_to_roi(p, &grid.roi);
    if pieces.is_empty() {
        return Err(Error::EmptyRasterization);
    }
    let mut mask = InstanceMask::zeros(grid, p.direction_label());
    let radius = thickness / T::lit(2.0);
    for piece in &pieces {
        for seg in piece.points().windows(2) {
            trace_segment(&mut mask, grid, &seg[0], &seg[1]);
            if radius > T::zero() {
                band_segment(&mut mask, grid, &seg[0], &seg[1], radius);
            }
        }
    }
    if mask.marked_cells() == 0 {
        return Err(Error::EmptyRasterization);
    }
    Ok(mask)
}

fn cell_index<T: Real>(coord: T, n: usize) -> usize {
    let f = coord.floor();
    if f <= T::zero() {
        0
    } else {
        f.to_usize().unwrap_or(n - 1).min(n - 1)
    }
}

/// Grid traversal (Amanatides-Woo) from `a` to `b`.
fn trace_segment<T: Real>(mask: &mut InstanceMask<T>, grid: &GridSpec<T>, a: &Point3<T>, b: &Point3<T>) {
    let (u0, v0) = (grid.row_coord(a.x), grid.col_coord(a.y));
    let (u1, v1) = (grid.row_coord(b.x), grid.col_coord(b.y));
    let (mut r, mut c) = (cell_index(u0, grid.rows), cell_index(v0, grid.cols));
    let (r_end, c_end) = (cell_index(u1, grid.rows), cell_index(v1, grid.cols));
    let (du, dv) = (u1 - u0, v1 - v0);

    let axis_setup = |d: T, start: T| -> (T, T) {
        if d > T::zero() {
            ((start.floor() + T::one() - start) / d, T::one() / d)
        } else if d < T::zero() {
            ((start - start.floor()) / -d, T::one() / -d)
        } else {
            (T::infinity(), T::infinity())
        }
    };
    let (mut t_max_u, t_delta_u) = axis_setup(du, u0);
    let (mut t_max_v, t_delta_v) = axis_setup(dv, v0);
    let mut left_r = r.abs_diff(r_end);
    let mut left_c = c.abs_diff(c_end);

    mask.set(r, c, T::one());
    while left_r + left_c > 0 {
        let step_row = left_c == 0 || (left_r > 0 && t_max_u < t_max_v);
        if step_row {
            r = if r_end > r { r + 1 } else { r - 1 };
            t_max_u = t_max_u + t_delta_u;
            left_r -= 1;
        } else {
            c = if c_end > c { c + 1 } else { c - 1 };
            t_max_v = t_max_v + t_delta_v;
            left_c -= 1;
        }
        mask.set(r, c, T::one());
    }
}

fn band_segment<T: Real>(
    mask: &mut InstanceMask<T>,
    grid: &GridSpec<T>,
    a: &Point3<T>,
    b: &Point3<T>,
    radius: T,
) {
    let lo_x = a.x.min(b.x) - radius;
    let hi_x = a.x.max(b.x) + radius;
    let lo_y = a.y.min(b.y) - radius;
    let hi_y = a.y.max(b.y) + radius;
    let r0 = cell_index(grid.row_coord(lo_x), grid.rows);
    let r1 = cell_index(grid.row_coord(hi_x), grid.rows);
    let c0 = cell_index(grid.col_coord(lo_y), grid.cols);
    let c1 = cell_index(grid.col_coord(hi_y), grid.cols);
    for r in r0..=r1 {
        let x = grid.row_center(r);
        for c in c0..=c1 {
            let center = Point3::new(x, grid.col_center(c), T::zero());
            if point_segment_distance_xy(&center, a, b) <= radius {
                mask.set(r, c, T::one());
            }
        }
    }
}
