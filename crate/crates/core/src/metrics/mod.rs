//! Polyline distances, matching, and the detection / topology scores that
//! make up an [`EvalSummary`].

mod ap;
mod boxes;
mod detection;
mod distance;
mod evaluate;
mod hungarian;
mod matching;
mod topology_score;

use serde::{Deserialize, Serialize};

pub use ap::average_precision;
pub use boxes::{box_iou, Box2D, TrafficCategory};
pub use detection::{
    det_lanes, det_traffic, f1_counts, f1_score, lane_distance_matrix, lane_hits, match_lanes, traffic_hits,
    F1Counts,
};
pub use distance::{chamfer, discrete_frechet, LaneDistance};
pub use evaluate::{evaluate, evaluate_frames, evaluate_with, resolve_centerlines, EvalOptions};
pub use hungarian::hungarian;
pub use matching::{match_instances, MatchMode, Matching};
pub use topology_score::{top_from_vertex_aps, top_score, top_vertex_aps, ScoredEdge};

use crate::error::{Error, Result};
use crate::geometry::DEFAULT_SAMPLE_COUNT;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricConfig {
    /// Frechet match thresholds, meters.
    pub frechet_thresholds: Vec<f64>,
    /// Chamfer match thresholds, meters.
    pub chamfer_thresholds: Vec<f64>,
    pub iou_threshold: f64,
    /// F1: a predicted point is close when within this many meters.
    pub f1_distance: f64,
    /// F1: fraction of close points needed for a correct prediction.
    pub f1_point_fraction: f64,
    /// Exponent of the TOP transform inside OLS (0.5 = square root).
    pub top_aggregation_exponent: f64,
    /// Common point count both sides are resampled to before matching.
    pub sample_count: usize,
    /// Predicted edges must score strictly above this to count.
    pub edge_score_floor: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            frechet_thresholds: vec![1.0, 2.0, 3.0],
            chamfer_thresholds: vec![0.5, 1.0, 1.5],
            iou_threshold: 0.75,
            f1_distance: 1.5,
            f1_point_fraction: 0.75,
            top_aggregation_exponent: 0.5,
            sample_count: DEFAULT_SAMPLE_COUNT,
            edge_score_floor: 0.0,
        }
    }
}

impl MetricConfig {
    pub fn thresholds(&self, distance: LaneDistance) -> &[f64] {
        match distance {
            LaneDistance::Frechet => &self.frechet_thresholds,
            LaneDistance::Chamfer => &self.chamfer_thresholds,
        }
    }

    /// Strictest Frechet threshold, used for vertex matching in TOP.
    pub fn top_frechet_threshold(&self) -> f64 {
        self.frechet_thresholds[0]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, list) in [
            ("frechet_thresholds", &self.frechet_thresholds),
            ("chamfer_thresholds", &self.chamfer_thresholds),
        ] {
            let increasing = list.windows(2).all(|w| w[0] < w[1]);
            let positive = list.iter().all(|&t| t > 0.0 && t.is_finite());
            if list.is_empty() || !increasing || !positive {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be non-empty, positive and strictly increasing: {list:?}"
                )));
            }
        }
        let unit = |v: f64| v > 0.0 && v <= 1.0;
        if !unit(self.iou_threshold) || !unit(self.f1_point_fraction) {
            return Err(Error::InvalidConfig(
                "iou_threshold and f1_point_fraction must lie in (0, 1]".into(),
            ));
        }
        if !(self.f1_distance > 0.0) || !(self.top_aggregation_exponent > 0.0) {
            return Err(Error::InvalidConfig(
                "f1_distance and top_aggregation_exponent must be positive".into(),
            ));
        }
        if self.sample_count < 2 {
            return Err(Error::InvalidSampleCount(self.sample_count));
        }
        Ok(())
    }
}

/// All scores in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub det_l_frechet: f64,
    pub det_l_chamfer: f64,
    pub det_t: f64,
    pub top_ll: f64,
    pub top_lt: f64,
    pub f1: f64,
    pub ols: f64,
}

impl EvalSummary {
    pub const KEYS: [&'static str; 7] = [
        "det_l_frechet",
        "det_l_chamfer",
        "det_t",
        "top_ll",
        "top_lt",
        "f1",
        "ols",
    ];

    /// `(key, value)` in canonical order.
    pub fn fields(&self) -> [(&'static str, f64); 7] {
        [
            ("det_l_frechet", self.det_l_frechet),
            ("det_l_chamfer", self.det_l_chamfer),
            ("det_t", self.det_t),
            ("top_ll", self.top_ll),
            ("top_lt", self.top_lt),
            ("f1", self.f1),
            ("ols", self.ols),
        ]
    }
}

/// Aggregate score: mean of lane mAP, traffic mAP and the two transformed
/// topology scores. Chamfer mAP and F1 are not part of it.
pub fn ols(det_l: f64, det_t: f64, top_ll: f64, top_lt: f64, cfg: &MetricConfig) -> Result<f64> {
    for v in [det_l, det_t, top_ll, top_lt] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidScore(v));
        }
    }
    let f = |v: f64| v.powf(cfg.top_aggregation_exponent);
    Ok((det_l + det_t + f(top_ll) + f(top_lt)) / 4.0)
}
