use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, Point3};
use crate::scalar::Real;

/// Ordered centerline points; the order is the direction of traffic flow.
///
/// Always holds at least two finite points and never two identical
/// consecutive points.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<T> {
    points: Vec<Point3<T>>,
}

impl<T: Real> Polyline<T> {
    pub fn new(points: Vec<Point3<T>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPolyline(format!(
                "{} point(s), at least 2 required",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidPolyline(format!("point {i} is not finite")));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidPolyline(format!(
                "points {} and {} are identical",
                i,
                i + 1
            )));
        }
        Ok(Self { points })
    }

    /// Like [`Polyline::new`] but silently drops consecutive duplicates first.
    pub fn from_points_dedup(mut points: Vec<Point3<T>>) -> Result<Self> {
        points.dedup();
        Self::new(points)
    }

    pub fn from_f64(coords: &[[f64; 3]]) -> Result<Self> {
        Self::new(
            coords
                .iter()
                .map(|&[x, y, z]| Point3::from_f64(x, y, z))
                .collect(),
        )
    }

    #[inline]
    pub fn points(&self) -> &[Point3<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point3<T>> {
        self.points
    }

    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn first(&self) -> Point3<T> {
        self.points[0]
    }

    pub fn last(&self) -> Point3<T> {
        self.points[self.points.len() - 1]
    }

    /// Total arc length.
    pub fn length(&self) -> T {
        self.points
            .windows(2)
            .map(|w| w[0].distance(&w[1]))
            .fold(T::zero(), |a, b| a + b)
    }

    /// Cumulative arc length at every vertex, starting at zero.
    pub fn cumulative_lengths(&self) -> Vec<T> {
        let mut acc = T::zero();
        let mut out = Vec::with_capacity(self.points.len());
        out.push(acc);
        for w in self.points.windows(2) {
            acc = acc + w[0].distance(&w[1]);
            out.push(acc);
        }
        out
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    pub fn translated(&self, offset: Point3<T>) -> Self {
        Self {
            points: self.points.iter().map(|p| *p + offset).collect(),
        }
    }

    /// Distance from `p` to the nearest point on any segment.
    pub fn distance_to_point(&self, p: &Point3<T>) -> T {
        self.points
            .windows(2)
            .map(|w| point_segment_distance(p, &w[0], &w[1]))
            .fold(T::infinity(), T::min)
    }

    pub fn cast<U: Real>(&self) -> Polyline<U> {
        Polyline {
            points: self.points.iter().map(Point3::cast).collect(),
        }
    }
}

/// Resamples `p` to `n` points at uniform arc-length fractions.
///
/// The first and last points are copied verbatim.
pub fn resample_polyline<T: Real>(p: &Polyline<T>, n: usize) -> Result<Polyline<T>> {
    if n < 2 {
        return Err(Error::InvalidSampleCount(n));
    }
    let pts = p.points();
    let cum = p.cumulative_lengths();
    let total = cum[cum.len() - 1];
    let mut out = Vec::with_capacity(n);
    out.push(pts[0]);
    let mut seg = 0;
    let denom = T::from_count(n - 1);
    for k in 1..n - 1 {
        let target = total * T::from_count(k) / denom;
        while seg + 2 < pts.len() && cum[seg + 1] < target {
            seg += 1;
        }
        let seg_len = cum[seg + 1] - cum[seg];
        let t = if seg_len > T::zero() {
            ((target - cum[seg]) / seg_len).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        out.push(pts[seg].lerp(&pts[seg + 1], t));
    }
    out.push(pts[pts.len() - 1]);
    Polyline::from_points_dedup(out)
}
