//! Scene and prediction data model, JSON interchange, synthetic scene
//! generation and prediction perturbation.

mod archive;
mod json;
mod perturb;
mod rle;
mod synth;

use std::collections::{HashMap, HashSet};

pub use archive::{read_predictions, read_scenes, write_predictions, write_scenes, ArchiveFormat};
pub use json::{load_prediction, load_scene, save_prediction, save_scene};
pub(crate) use perturb::gt_adjacency;
pub use perturb::perturb_scene;
pub use rle::{read_mask_sidecar, rle_decode, rle_encode, write_mask_sidecar, MaskFrame, MaskRecord};
pub use synth::{generate_synthetic_scene, is_strictly_monotone, SynthConfig};

use crate::error::{Error, Result};
use crate::geometry::{clip_to_roi_longest, BezierCurve, DirectionLabel, Polyline, Roi};
use crate::mask_codec::{GridSpec, InstanceMask};
use crate::metrics::Box2D;
use crate::topology::ScoreMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Centerline {
    pub id: String,
    pub polyline: Polyline<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficElement {
    pub id: String,
    pub bbox: Box2D,
}

/// Ground truth for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub frame_id: String,
    pub roi: Roi<f64>,
    pub centerlines: Vec<Centerline>,
    pub traffic_elements: Vec<TrafficElement>,
    /// Directed successor edges between centerline ids.
    pub topology_ll: Vec<(String, String)>,
    /// `(centerline id, traffic element id)` associations.
    pub topology_lt: Vec<(String, String)>,
}

impl Scene {
    /// Validates ids and edges, then clips every centerline to `roi`.
    ///
    /// A centerline leaving and re-entering the region keeps its longest
    /// inside piece; one lying entirely outside is dropped along with its
    /// edges.
    pub fn new(
        frame_id: String,
        roi: Roi<f64>,
        centerlines: Vec<Centerline>,
        traffic_elements: Vec<TrafficElement>,
        topology_ll: Vec<(String, String)>,
        topology_lt: Vec<(String, String)>,
    ) -> Result<Self> {
        let lane_ids = unique_ids(centerlines.iter().map(|c| c.id.as_str()), "/centerlines")?;
        let te_ids = unique_ids(
            traffic_elements.iter().map(|t| t.id.as_str()),
            "/traffic_elements",
        )?;
        check_edges(&topology_ll, "/topology_ll", &lane_ids, &lane_ids, "centerline")?;
        check_edges(
            &topology_lt,
            "/topology_lt",
            &lane_ids,
            &te_ids,
            "traffic element",
        )?;

        let mut kept = Vec::with_capacity(centerlines.len());
        let mut dropped = HashSet::new();
        for c in centerlines {
            match clip_to_roi_longest(&c.polyline, &roi) {
                Some(polyline) => kept.push(Centerline { id: c.id, polyline }),
                None => {
                    dropped.insert(c.id);
                }
            }
        }
        let topology_ll = topology_ll
            .into_iter()
            .filter(|(a, b)| !dropped.contains(a) && !dropped.contains(b))
            .collect();
        let topology_lt = topology_lt
            .into_iter()
            .filter(|(a, _)| !dropped.contains(a))
            .collect();
        Ok(Self {
            frame_id,
            roi,
            centerlines: kept,
            traffic_elements,
            topology_ll,
            topology_lt,
        })
    }

    pub fn lane_index(&self) -> HashMap<&str, usize> {
        self.centerlines
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.as_str(), i))
            .collect()
    }

    pub fn traffic_index(&self) -> HashMap<&str, usize> {
        self.traffic_elements
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id.as_str(), i))
            .collect()
    }

    /// Lane-lane edges as centerline indices.
    pub fn ll_edge_indices(&self) -> Vec<(usize, usize)> {
        let idx = self.lane_index();
        self.topology_ll
            .iter()
            .filter_map(|(a, b)| Some((*idx.get(a.as_str())?, *idx.get(b.as_str())?)))
            .collect()
    }

    /// Lane-traffic edges as `(centerline index, traffic element index)`.
    pub fn lt_edge_indices(&self) -> Vec<(usize, usize)> {
        let lanes = self.lane_index();
        let tes = self.traffic_index();
        self.topology_lt
            .iter()
            .filter_map(|(a, b)| Some((*lanes.get(a.as_str())?, *tes.get(b.as_str())?)))
            .collect()
    }
}

fn unique_ids<'a>(ids: impl Iterator<Item = &'a str>, path: &str) -> Result<HashSet<&'a str>> {
    let mut seen = HashSet::new();
    for (i, id) in ids.enumerate() {
        if !seen.insert(id) {
            return Err(Error::validation(
                format!("{path}/{i}/id"),
                format!("duplicate id {id:?}"),
            ));
        }
    }
    Ok(seen)
}

fn check_edges(
    edges: &[(String, String)],
    path: &str,
    from_ids: &HashSet<&str>,
    to_ids: &HashSet<&str>,
    to_kind: &str,
) -> Result<()> {
    for (i, (a, b)) in edges.iter().enumerate() {
        if !from_ids.contains(a.as_str()) {
            return Err(Error::validation(
                format!("{path}/{i}"),
                format!("unknown centerline id {a:?}"),
            ));
        }
        if !to_ids.contains(b.as_str()) {
            return Err(Error::validation(
                format!("{path}/{i}"),
                format!("unknown {to_kind} id {b:?}"),
            ));
        }
    }
    Ok(())
}

/// Geometry carried by one centerline prediction.
#[derive(Debug, Clone, PartialEq)]
pub enum CenterlineGeometry {
    Polyline(Polyline<f64>),
    Mask {
        mask: InstanceMask<f64>,
        roi: Roi<f64>,
    },
    Bezier(BezierCurve<f64>),
    /// Both branches of one instance plus the label that arbitrates fusion.
    MaskBezier {
        mask: InstanceMask<f64>,
        roi: Roi<f64>,
        bezier: BezierCurve<f64>,
        direction: DirectionLabel,
    },
}

impl CenterlineGeometry {
    /// Grid a mask payload lives on.
    pub fn grid(&self) -> Option<GridSpec<f64>> {
        match self {
            Self::Mask { mask, roi } | Self::MaskBezier { mask, roi, .. } => Some(GridSpec {
                rows: mask.rows(),
                cols: mask.cols(),
                roi: *roi,
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterlinePred {
    pub confidence: f64,
    pub geometry: CenterlineGeometry,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficPred {
    pub confidence: f64,
    pub bbox: Box2D,
}

/// Model output for one frame. Score-matrix ids are indices into
/// `centerline_preds` (rows of both matrices, columns of `ll_scores`) and
/// `traffic_preds` (columns of `lt_scores`).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    pub frame_id: String,
    pub centerline_preds: Vec<CenterlinePred>,
    pub traffic_preds: Vec<TrafficPred>,
    pub ll_scores: ScoreMatrix<f64>,
    pub lt_scores: ScoreMatrix<f64>,
}

impl PredictionSet {
    pub fn empty(frame_id: impl Into<String>) -> Self {
        Self {
            frame_id: frame_id.into(),
            centerline_preds: Vec::new(),
            traffic_preds: Vec::new(),
            ll_scores: ScoreMatrix::empty(),
            lt_scores: ScoreMatrix::empty(),
        }
    }

    /// Checks confidences and score-matrix ids.
    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.centerline_preds.iter().enumerate() {
            if !(0.0..=1.0).contains(&c.confidence) {
                return Err(Error::validation(
                    format!("/centerline_preds/{i}/confidence"),
                    format!("{} outside [0, 1]", c.confidence),
                ));
            }
        }
        for (i, t) in self.traffic_preds.iter().enumerate() {
            if !(0.0..=1.0).contains(&t.confidence) {
                return Err(Error::validation(
                    format!("/traffic_preds/{i}/confidence"),
                    format!("{} outside [0, 1]", t.confidence),
                ));
            }
        }
        let n_lane = self.centerline_preds.len();
        let n_te = self.traffic_preds.len();
        let check = |ids: &[usize], bound: usize, path: &str| -> Result<()> {
            match ids.iter().position(|&i| i >= bound) {
                Some(k) => Err(Error::validation(
                    format!("{path}/{k}"),
                    format!("id {} out of range ({bound} predictions)", ids[k]),
                )),
                None => Ok(()),
            }
        };
        check(&self.ll_scores.row_ids, n_lane, "/ll_scores/rows")?;
        check(&self.ll_scores.col_ids, n_lane, "/ll_scores/cols")?;
        check(&self.lt_scores.row_ids, n_lane, "/lt_scores/rows")?;
        check(&self.lt_scores.col_ids, n_te, "/lt_scores/cols")?;
        Ok(())
    }
}
