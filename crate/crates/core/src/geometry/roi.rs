use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::scalar::Real;

/// Axis-aligned evaluation region in the ground plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Roi<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
}

impl<T: Real> Roi<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T) -> Result<Self> {
        let all_finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !all_finite || !(x_min < x_max) || !(y_min < y_max) {
            return Err(Error::InvalidRoi(format!(
                "x [{x_min}, {x_max}], y [{y_min}, {y_max}]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// Inclusive containment test in the ground plane.
    #[inline]
    pub fn contains(&self, p: &Point3<T>) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn width_x(&self) -> T {
        self.x_max - self.x_min
    }

    pub fn width_y(&self) -> T {
        self.y_max - self.y_min
    }
}

impl<T: Real> Default for Roi<T> {
    /// ±50 m forward, ±25 m lateral.
    fn default() -> Self {
        Self {
            x_min: T::lit(-50.0),
            x_max: T::lit(50.0),
            y_min: T::lit(-25.0),
            y_max: T::lit(25.0),
        }
    }
}
