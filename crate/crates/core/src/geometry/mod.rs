//! Polyline, Bezier, direction-label and curve-fitting primitives.

mod bezier;
mod clip;
mod direction;
mod fit;
mod point;
mod polyline;
mod roi;

pub use bezier::{
    bezier_sample, bezier_sample_points, fix_bezier_endpoints, BezierCurve, DEFAULT_SAMPLE_COUNT,
};
pub use clip::{clip_to_roi, clip_to_roi_longest};
pub use direction::{assign_direction_label, assign_direction_label_by_steps, order_points, DirectionLabel};
pub use fit::{fit_quadratic, Axis, QuadraticFit};
pub use point::{point_segment_distance, point_segment_distance_xy, Point3};
pub use polyline::{resample_polyline, Polyline};
pub use roi::Roi;

#[cfg(test)]
mod tests;
