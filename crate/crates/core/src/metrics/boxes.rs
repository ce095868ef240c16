use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Traffic-element classes (lights and signs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficCategory {
    Unknown,
    Red,
    Green,
    Yellow,
    GoStraight,
    TurnLeft,
    TurnRight,
    NoLeftTurn,
    NoRightTurn,
    UTurn,
    NoUTurn,
    SlightLeft,
    SlightRight,
}

impl TrafficCategory {
    pub const ALL: [TrafficCategory; 13] = [
        Self::Unknown,
        Self::Red,
        Self::Green,
        Self::Yellow,
        Self::GoStraight,
        Self::TurnLeft,
        Self::TurnRight,
        Self::NoLeftTurn,
        Self::NoRightTurn,
        Self::UTurn,
        Self::NoUTurn,
        Self::SlightLeft,
        Self::SlightRight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Unknown => "unknown",
            Self::Red => "red",
            Self::Green => "green",
            Self::Yellow => "yellow",
            Self::GoStraight => "go_straight",
            Self::TurnLeft => "turn_left",
            Self::TurnRight => "turn_right",
            Self::NoLeftTurn => "no_left_turn",
            Self::NoRightTurn => "no_right_turn",
            Self::UTurn => "u_turn",
            Self::NoUTurn => "no_u_turn",
            Self::SlightLeft => "slight_left",
            Self::SlightRight => "slight_right",
        }
    }
}

impl fmt::Display for TrafficCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrafficCategory {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidBox(format!("unknown traffic category {s:?}")))
    }
}

/// Image-space traffic-element box, pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2D {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub category: TrafficCategory,
}

impl Box2D {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64, category: TrafficCategory) -> Result<Self> {
        let finite = [x1, y1, x2, y2].iter().all(|v| v.is_finite());
        if !finite || !(x1 < x2) || !(y1 < y2) {
            return Err(Error::InvalidBox(format!(
                "({x1}, {y1}, {x2}, {y2}) needs x1 < x2 and y1 < y2"
            )));
        }
        Ok(Self {
            x1,
            y1,
            x2,
            y2,
            category,
        })
    }

    pub fn area(&self) -> f64 {
        (self.x2 - self.x1) * (self.y2 - self.y1)
    }
}

/// Intersection over union; ignores categories.
pub fn box_iou(a: &Box2D, b: &Box2D) -> f64 {
    let w = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let h = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = w * h;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}
