use crate::error::{Error, Result};
use crate::geometry::{Point3, Polyline};
use crate::scalar::Real;

/// Default number of points emitted for any centerline.
pub const DEFAULT_SAMPLE_COUNT: usize = 11;

/// Quartic Bezier curve with five control points; the curve passes through
/// the first and last.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BezierCurve<T> {
    pub control_points: [Point3<T>; 5],
}

impl<T: Real> BezierCurve<T> {
    pub fn new(control_points: [Point3<T>; 5]) -> Self {
        Self { control_points }
    }

    /// Evaluates the curve at `t` by de Casteljau subdivision.
    ///
    /// Exact at `t = 0` and `t = 1`, and exact for coincident control points.
    pub fn eval(&self, t: T) -> Point3<T> {
        if t == T::zero() {
            return self.control_points[0];
        }
        if t == T::one() {
            return self.control_points[4];
        }
        let mut pts = self.control_points;
        for level in (1..5).rev() {
            for i in 0..level {
                pts[i] = pts[i] + (pts[i + 1] - pts[i]) * t;
            }
        }
        pts[0]
    }

    pub fn start(&self) -> Point3<T> {
        self.control_points[0]
    }

    pub fn end(&self) -> Point3<T> {
        self.control_points[4]
    }

    /// Replaces the curve endpoints, keeping the three inner control points.
    pub fn with_endpoints(&self, start: Point3<T>, end: Point3<T>) -> Self {
        let mut cps = self.control_points;
        cps[0] = start;
        cps[4] = end;
        Self::new(cps)
    }
}

/// Samples `n` points at `t = i / (n - 1)`.
///
/// Consecutive samples that coincide (a degenerate curve) are emitted as-is
/// in the returned vector; use [`bezier_sample`] for a validated polyline.
pub fn bezier_sample_points<T: Real>(curve: &BezierCurve<T>, n: usize) -> Result<Vec<Point3<T>>> {
    if n < 2 {
        return Err(Error::InvalidSampleCount(n));
    }
    let denom = T::from_count(n - 1);
    Ok((0..n)
        .map(|i| match i {
            0 => curve.control_points[0],
            _ if i == n - 1 => curve.control_points[4],
            _ => curve.eval(T::from_count(i) / denom),
        })
        .collect())
}

/// Samples the curve into a polyline of `n` points.
///
/// Fails with `InvalidPolyline` when the curve is degenerate enough that
/// consecutive samples coincide.
pub fn bezier_sample<T: Real>(curve: &BezierCurve<T>, n: usize) -> Result<Polyline<T>> {
    Polyline::new(bezier_sample_points(curve, n)?)
}

/// Pins a predicted curve's endpoints to `start` and `end`.
pub fn fix_bezier_endpoints<T: Real>(
    control_points: [Point3<T>; 5],
    start: Point3<T>,
    end: Point3<T>,
) -> BezierCurve<T> {
    BezierCurve::new(control_points).with_endpoints(start, end)
}
