use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

/// A point in the vehicle frame: `x` forward, `y` left, `z` up (meters).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Point3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    /// Builds a point from `f64` literals.
    pub fn from_f64(x: f64, y: f64, z: f64) -> Self {
        Self::new(T::lit(x), T::lit(y), T::lit(z))
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn distance(&self, other: &Self) -> T {
        (*self - *other).norm()
    }

    /// Distance in the ground plane, ignoring `z`.
    #[inline]
    pub fn distance_xy(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// `(1 - t) * self + t * other`, exact at both `t = 0` and `t = 1`.
    #[inline]
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        let s = T::one() - t;
        Self::new(
            s * self.x + t * other.x,
            s * self.y + t * other.y,
            s * self.z + t * other.z,
        )
    }

    pub fn with_z(self, z: T) -> Self {
        Self { z, ..self }
    }

    pub fn cast<U: Real>(&self) -> Point3<U> {
        Point3::new(
            U::lit(self.x.to_f64_lossy()),
            U::lit(self.y.to_f64_lossy()),
            U::lit(self.z.to_f64_lossy()),
        )
    }
}

impl<T: Real> Add for Point3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Point3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Mul<T> for Point3<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl<T: Real> Neg for Point3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Euclidean distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance<T: Real>(p: &Point3<T>, a: &Point3<T>, b: &Point3<T>) -> T {
    let ab = *b - *a;
    let len2 = ab.dot(&ab);
    if len2 <= T::zero() {
        return p.distance(a);
    }
    let t = ((*p - *a).dot(&ab) / len2).max(T::zero()).min(T::one());
    p.distance(&a.lerp(b, t))
}

/// Same as [`point_segment_distance`] but projected onto the ground plane.
pub fn point_segment_distance_xy<T: Real>(p: &Point3<T>, a: &Point3<T>, b: &Point3<T>) -> T {
    let flat = |q: &Point3<T>| q.with_z(T::zero());
    point_segment_distance(&flat(p), &flat(a), &flat(b))
}
