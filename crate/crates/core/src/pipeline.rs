//! End-to-end helpers shared by the CLI and the acceptance harness:
//! scene → masks → decoded polylines → scores.

use crate::error::{Error, Result};
use crate::geometry::Roi;
use crate::mask_codec::{rasterize_centerline, GridSpec};
use crate::metrics::{evaluate_with, resolve_centerlines, EvalOptions, EvalSummary};
use crate::scene_io::{
    generate_synthetic_scene, gt_adjacency, CenterlineGeometry, CenterlinePred, PredictionSet, Scene,
    SynthConfig, TrafficPred,
};
use crate::topology::ScoreMatrix;

/// Default band width used when burning ground truth into masks, meters.
pub const DEFAULT_THICKNESS: f64 = 1.0;

/// Rasterizes every centerline of `scene` into a confidence-1 mask
/// prediction. Traffic elements and adjacency pass through unchanged, so a
/// decode of the result isolates the mask codec's own loss.
///
/// Lanes that miss `grid` entirely are dropped with their edges.
pub fn rasterize_scene(scene: &Scene, grid: &GridSpec<f64>, thickness: f64) -> Result<PredictionSet> {
    let mut lane_map = vec![None; scene.centerlines.len()];
    let mut centerline_preds = Vec::new();
    for (i, c) in scene.centerlines.iter().enumerate() {
        match rasterize_centerline(&c.polyline, grid, thickness) {
            Ok(mask) => {
                lane_map[i] = Some(centerline_preds.len());
                centerline_preds.push(CenterlinePred {
                    confidence: 1.0,
                    geometry: CenterlineGeometry::Mask { mask, roi: grid.roi },
                });
            }
            Err(Error::EmptyRasterization) => {
                log::debug!("frame {}: lane {} misses the grid", scene.frame_id, c.id);
            }
            Err(e) => return Err(e),
        }
    }
    let te_map: Vec<Option<usize>> = (0..scene.traffic_elements.len()).map(Some).collect();
    let (ll_scores, lt_scores) = gt_adjacency(scene, &lane_map, &te_map)?;
    Ok(PredictionSet {
        frame_id: scene.frame_id.clone(),
        centerline_preds,
        traffic_preds: scene
            .traffic_elements
            .iter()
            .map(|t| TrafficPred {
                confidence: 1.0,
                bbox: t.bbox,
            })
            .collect(),
        ll_scores,
        lt_scores,
    })
}

/// Replaces mask and Bezier geometry with decoded polylines. Instances that
/// fail to decode are removed and the score matrices re-indexed.
pub fn decode_predictions(pred: &PredictionSet, roi: &Roi<f64>, opts: &EvalOptions) -> Result<PredictionSet> {
    let resolved = resolve_centerlines(pred, roi, opts)?;
    let mut map = vec![None; resolved.len()];
    let mut centerline_preds = Vec::new();
    for (i, p) in resolved.into_iter().enumerate() {
        if let Some(polyline) = p {
            map[i] = Some(centerline_preds.len());
            centerline_preds.push(CenterlinePred {
                confidence: pred.centerline_preds[i].confidence,
                geometry: CenterlineGeometry::Polyline(polyline),
            });
        }
    }
    Ok(PredictionSet {
        frame_id: pred.frame_id.clone(),
        centerline_preds,
        traffic_preds: pred.traffic_preds.clone(),
        ll_scores: reindex(&pred.ll_scores, &map, None)?,
        lt_scores: reindex(&pred.lt_scores, &map, Some(pred.traffic_preds.len()))?,
    })
}

/// Drops rows (and, for lane-lane matrices, columns) whose ids map to `None`.
fn reindex(m: &ScoreMatrix<f64>, map: &[Option<usize>], te_cols: Option<usize>) -> Result<ScoreMatrix<f64>> {
    let rows: Vec<(usize, usize)> = m
        .row_ids
        .iter()
        .enumerate()
        .filter_map(|(r, &id)| Some((r, map.get(id).copied().flatten()?)))
        .collect();
    let cols: Vec<(usize, usize)> = match te_cols {
        Some(_) => m.col_ids.iter().copied().enumerate().collect(),
        None => m
            .col_ids
            .iter()
            .enumerate()
            .filter_map(|(c, &id)| Some((c, map.get(id).copied().flatten()?)))
            .collect(),
    };
    let values = rows
        .iter()
        .flat_map(|&(r, _)| cols.iter().map(move |&(c, _)| m.get(r, c)))
        .collect();
    ScoreMatrix::new(
        values,
        rows.iter().map(|r| r.1).collect(),
        cols.iter().map(|c| c.1).collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripConfig {
    pub synth: SynthConfig,
    pub grid: GridSpec<f64>,
    pub thickness: f64,
    pub eval: EvalOptions,
}

impl Default for RoundtripConfig {
    fn default() -> Self {
        Self {
            synth: SynthConfig::default(),
            grid: GridSpec::default(),
            thickness: DEFAULT_THICKNESS,
            eval: EvalOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripReport {
    pub scene: Scene,
    pub masks: PredictionSet,
    pub summary: EvalSummary,
}

/// Generates a scene, rasterizes it, and scores the decoded masks against it.
pub fn roundtrip(cfg: &RoundtripConfig) -> Result<RoundtripReport> {
    let scene = generate_synthetic_scene(&cfg.synth)?;
    let masks = rasterize_scene(&scene, &cfg.grid, cfg.thickness)?;
    let summary = evaluate_with(&masks, &scene, &cfg.eval)?;
    Ok(RoundtripReport {
        scene,
        masks,
        summary,
    })
}
