use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Point3, Polyline};
use crate::scalar::Real;

/// Flow direction of a centerline instance in the BEV frame.
///
/// `Up` is +x (forward), `Down` is -x, `Left` is +y, `Right` is -y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DirectionLabel {
    Up,
    Down,
    Left,
    Right,
}

impl DirectionLabel {
    pub const ALL: [DirectionLabel; 4] = [Self::Up, Self::Down, Self::Left, Self::Right];

    /// True for labels whose ordering axis is `x` (row-wise decoding).
    pub fn is_longitudinal(self) -> bool {
        matches!(self, Self::Up | Self::Down)
    }

    pub fn is_lateral(self) -> bool {
        !self.is_longitudinal()
    }

    pub fn opposite(self) -> Self {
        match self {
            Self::Up => Self::Down,
            Self::Down => Self::Up,
            Self::Left => Self::Right,
            Self::Right => Self::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Up => "up",
            Self::Down => "down",
            Self::Left => "left",
            Self::Right => "right",
        }
    }
}

impl fmt::Display for DirectionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DirectionLabel {
    type Err = Error;

    /// Case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "up" => Ok(Self::Up),
            "down" => Ok(Self::Down),
            "left" => Ok(Self::Left),
            "right" => Ok(Self::Right),
            _ => Err(Error::validation(
                "direction",
                format!("unknown direction label {s:?}"),
            )),
        }
    }
}

/// Labels a point sequence by its dominant axis of net displacement.
///
/// The axis with the larger absolute `last - first` displacement wins, ties
/// going to `x`; its sign selects the label.
pub fn assign_direction_label<T: Real>(points: &[Point3<T>]) -> Result<DirectionLabel> {
    if points.len() < 2 {
        return Err(Error::InvalidPolyline(format!(
            "{} point(s), at least 2 required",
            points.len()
        )));
    }
    let first = points[0];
    let last = points[points.len() - 1];
    let dx = last.x - first.x;
    let dy = last.y - first.y;
    Ok(if dx.abs() >= dy.abs() {
        if dx > T::zero() {
            DirectionLabel::Up
        } else {
            DirectionLabel::Down
        }
    } else if dy > T::zero() {
        DirectionLabel::Left
    } else {
        DirectionLabel::Right
    })
}

/// Alternative labelling that counts sign-consistent consecutive steps per axis
/// instead of comparing net displacement. Differs from
/// [`assign_direction_label`] on serpentine curves.
pub fn assign_direction_label_by_steps<T: Real>(points: &[Point3<T>]) -> Result<DirectionLabel> {
    if points.len() < 2 {
        return Err(Error::InvalidPolyline(format!(
            "{} point(s), at least 2 required",
            points.len()
        )));
    }
    let (mut px, mut nx, mut py, mut ny) = (0usize, 0usize, 0usize, 0usize);
    for w in points.windows(2) {
        let dx = w[1].x - w[0].x;
        let dy = w[1].y - w[0].y;
        if dx > T::zero() {
            px += 1;
        } else if dx < T::zero() {
            nx += 1;
        }
        if dy > T::zero() {
            py += 1;
        } else if dy < T::zero() {
            ny += 1;
        }
    }
    let x_score = px.max(nx);
    let y_score = py.max(ny);
    Ok(if x_score >= y_score {
        if px >= nx {
            DirectionLabel::Up
        } else {
            DirectionLabel::Down
        }
    } else if py >= ny {
        DirectionLabel::Left
    } else {
        DirectionLabel::Right
    })
}

impl<T: Real> Polyline<T> {
    pub fn direction_label(&self) -> DirectionLabel {
        assign_direction_label(self.points()).expect("polyline holds at least two points")
    }
}

/// Orders an unordered point set along the axis selected by `label`.
///
/// Ties on the ordering axis break on the other horizontal axis, ascending.
/// Exact duplicate points collapse to one.
pub fn order_points<T: Real>(points: &[Point3<T>], label: DirectionLabel) -> Result<Polyline<T>> {
    if points.len() < 2 {
        return Err(Error::InvalidPolyline(format!(
            "{} point(s), at least 2 required",
            points.len()
        )));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| {
        let (key_a, key_b, tie_a, tie_b) = match label {
            DirectionLabel::Up => (a.x, b.x, a.y, b.y),
            DirectionLabel::Down => (b.x, a.x, a.y, b.y),
            DirectionLabel::Left => (a.y, b.y, a.x, b.x),
            DirectionLabel::Right => (b.y, a.y, a.x, b.x),
        };
        key_a
            .partial_cmp(&key_b)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(tie_a.partial_cmp(&tie_b).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.z.partial_cmp(&b.z).unwrap_or(std::cmp::Ordering::Equal))
    });
    Polyline::from_points_dedup(pts)
}
