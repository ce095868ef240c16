//! Frame and multi-frame evaluation of a [`PredictionSet`] against a [`Scene`].

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{bezier_sample, clip_to_roi_longest, resample_polyline, Polyline, Roi};
use crate::mask_codec::{decode_mask, resolve_mask_bezier, DecodeConfig, FusionPolicy};
use crate::metrics::detection::{mean, traffic_map};
use crate::metrics::{
    average_precision, f1_counts, lane_distance_matrix, lane_hits, match_lanes, ols, top_from_vertex_aps,
    top_vertex_aps, traffic_hits, EvalSummary, F1Counts, LaneDistance, MetricConfig, ScoredEdge,
    TrafficCategory,
};
use crate::scene_io::{CenterlineGeometry, PredictionSet, Scene};
use crate::topology::{adjacency_from_scores, ScoreMatrix};

/// Everything that shapes an evaluation beyond the inputs themselves.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalOptions {
    pub metric: MetricConfig,
    pub decode: DecodeConfig,
    pub policy: FusionPolicy,
}

/// Converts every centerline prediction to a polyline clipped to `roi`.
///
/// The result is indexed like `pred.centerline_preds`; a prediction whose mask
/// fails to decode, or that lies outside `roi`, is `None`.
pub fn resolve_centerlines(
    pred: &PredictionSet,
    roi: &Roi<f64>,
    opts: &EvalOptions,
) -> Result<Vec<Option<Polyline<f64>>>> {
    opts.decode.validate()?;
    let n = opts.decode.sample_count;
    pred.centerline_preds
        .iter()
        .map(|c| {
            let grid = c.geometry.grid();
            let decoded = match &c.geometry {
                CenterlineGeometry::Polyline(p) => Ok(p.clone()),
                CenterlineGeometry::Bezier(b) => bezier_sample(b, n),
                CenterlineGeometry::Mask { mask, .. } => {
                    decode_mask(mask, grid.as_ref().expect("mask has a grid"), &opts.decode)
                }
                CenterlineGeometry::MaskBezier {
                    mask,
                    bezier,
                    direction,
                    ..
                } => resolve_mask_bezier(
                    mask,
                    bezier,
                    *direction,
                    grid.as_ref().expect("mask has a grid"),
                    &opts.decode,
                    opts.policy,
                ),
            };
            match decoded {
                Ok(p) => Ok(clip_to_roi_longest(&p, roi)),
                Err(crate::Error::DecodeFailed { valid, required }) => {
                    log::debug!(
                        "frame {}: dropping undecodable mask ({valid}/{required} valid lines)",
                        pred.frame_id
                    );
                    Ok(None)
                }
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Per-frame sufficient statistics. Frames are merged by concatenation, so
/// the multi-frame scores pool instances rather than average frame scores.
#[derive(Debug, Default)]
struct FrameStats {
    n_gt_lanes: usize,
    frechet: Vec<Vec<(f64, bool)>>,
    chamfer: Vec<Vec<(f64, bool)>>,
    traffic: BTreeMap<TrafficCategory, (Vec<(f64, bool)>, usize)>,
    f1: F1Counts,
    top_ll: TopStats,
    top_lt: TopStats,
}

#[derive(Debug, Default)]
struct TopStats {
    aps: Vec<f64>,
    gt_edges: usize,
    pred_edges: usize,
}

impl TopStats {
    fn merge(&mut self, o: TopStats) {
        self.aps.extend(o.aps);
        self.gt_edges += o.gt_edges;
        self.pred_edges += o.pred_edges;
    }

    fn score(&self) -> f64 {
        top_from_vertex_aps(&self.aps, self.gt_edges, self.pred_edges)
    }
}

impl FrameStats {
    fn merge(&mut self, o: FrameStats) {
        self.n_gt_lanes += o.n_gt_lanes;
        for (acc, add) in [(&mut self.frechet, o.frechet), (&mut self.chamfer, o.chamfer)] {
            if acc.is_empty() {
                *acc = add;
            } else {
                for (a, b) in acc.iter_mut().zip(add) {
                    a.extend(b);
                }
            }
        }
        for (cat, (hits, gt)) in o.traffic {
            let e = self.traffic.entry(cat).or_default();
            e.0.extend(hits);
            e.1 += gt;
        }
        self.f1 = self.f1 + o.f1;
        self.top_ll.merge(o.top_ll);
        self.top_lt.merge(o.top_lt);
    }

    fn summary(&self, cfg: &MetricConfig) -> Result<EvalSummary> {
        let det =
            |hits: &[Vec<(f64, bool)>]| mean(hits.iter().map(|h| average_precision(h, self.n_gt_lanes)));
        let det_l_frechet = det(&self.frechet);
        let det_t = traffic_map(self.traffic.values().map(|(h, g)| (h.as_slice(), *g)));
        let top_ll = self.top_ll.score();
        let top_lt = self.top_lt.score();
        Ok(EvalSummary {
            det_l_frechet,
            det_l_chamfer: det(&self.chamfer),
            det_t,
            top_ll,
            top_lt,
            f1: self.f1.score(),
            ols: ols(det_l_frechet, det_t, top_ll, top_lt, cfg)?,
        })
    }
}

/// Predicted edges above the floor, re-indexed through `from_map`/`to_map`
/// (edges touching dropped predictions disappear).
fn predicted_edges(
    m: &ScoreMatrix<f64>,
    floor: f64,
    from_map: &[Option<usize>],
    to_map: &[Option<usize>],
) -> Vec<ScoredEdge> {
    adjacency_from_scores(m, floor)
        .into_iter()
        .filter(|e| e.score > floor)
        .filter_map(|e| {
            Some(ScoredEdge {
                from: (*from_map.get(e.from)?)?,
                to: (*to_map.get(e.to)?)?,
                score: e.score,
            })
        })
        .collect()
}

fn frame_stats(pred: &PredictionSet, gt: &Scene, opts: &EvalOptions) -> Result<FrameStats> {
    let cfg = &opts.metric;
    pred.validate()?;
    let resolved = resolve_centerlines(pred, &gt.roi, opts)?;

    // Compact the surviving predictions, remembering where each one went.
    let mut lane_map = vec![None; resolved.len()];
    let mut lanes = Vec::new();
    let mut conf = Vec::new();
    for (i, p) in resolved.into_iter().enumerate() {
        if let Some(p) = p {
            lane_map[i] = Some(lanes.len());
            lanes.push(resample_polyline(&p, cfg.sample_count)?);
            conf.push(pred.centerline_preds[i].confidence);
        }
    }
    let gts = gt
        .centerlines
        .iter()
        .map(|c| resample_polyline(&c.polyline, cfg.sample_count))
        .collect::<Result<Vec<_>>>()?;
    let p_refs: Vec<&Polyline<f64>> = lanes.iter().collect();
    let g_refs: Vec<&Polyline<f64>> = gts.iter().collect();

    let frechet = lane_distance_matrix(&p_refs, &g_refs, LaneDistance::Frechet)?;
    let chamfer = lane_distance_matrix(&p_refs, &g_refs, LaneDistance::Chamfer)?;
    let lane_match = match_lanes(&conf, gts.len(), &frechet, cfg.top_frechet_threshold());

    let boxes: Vec<_> = pred
        .traffic_preds
        .iter()
        .map(|t| (t.bbox, t.confidence))
        .collect();
    let gt_boxes: Vec<_> = gt.traffic_elements.iter().map(|t| t.bbox).collect();
    let (traffic, te_match) = traffic_hits(&boxes, &gt_boxes, cfg.iou_threshold);
    let te_map: Vec<Option<usize>> = (0..boxes.len()).map(Some).collect();

    let ll_pred = predicted_edges(&pred.ll_scores, cfg.edge_score_floor, &lane_map, &lane_map);
    let lt_pred = predicted_edges(&pred.lt_scores, cfg.edge_score_floor, &lane_map, &te_map);
    let ll_gt = gt.ll_edge_indices();
    let lt_gt = gt.lt_edge_indices();

    Ok(FrameStats {
        n_gt_lanes: gts.len(),
        frechet: lane_hits(&conf, gts.len(), &frechet, &cfg.frechet_thresholds),
        chamfer: lane_hits(&conf, gts.len(), &chamfer, &cfg.chamfer_thresholds),
        traffic,
        f1: f1_counts(&p_refs, &g_refs, cfg)?,
        top_ll: TopStats {
            aps: top_vertex_aps(&ll_pred, &ll_gt, &lane_match, &lane_match),
            gt_edges: ll_gt.len(),
            pred_edges: ll_pred.len(),
        },
        top_lt: TopStats {
            aps: top_vertex_aps(&lt_pred, &lt_gt, &lane_match, &te_match),
            gt_edges: lt_gt.len(),
            pred_edges: lt_pred.len(),
        },
    })
}

/// Scores one frame with default decoding and fusion.
pub fn evaluate(pred: &PredictionSet, gt: &Scene, cfg: &MetricConfig) -> Result<EvalSummary> {
    evaluate_with(
        pred,
        gt,
        &EvalOptions {
            metric: cfg.clone(),
            ..EvalOptions::default()
        },
    )
}

pub fn evaluate_with(pred: &PredictionSet, gt: &Scene, opts: &EvalOptions) -> Result<EvalSummary> {
    evaluate_frames(&[(pred, gt)], opts)
}

/// Pools all frames into one summary. Frames are scored in parallel on the
/// current rayon pool; the result does not depend on the thread count.
pub fn evaluate_frames(frames: &[(&PredictionSet, &Scene)], opts: &EvalOptions) -> Result<EvalSummary> {
    opts.metric.validate()?;
    let stats = frames
        .par_iter()
        .map(|(p, g)| frame_stats(p, g, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut total = FrameStats::default();
    for s in stats {
        total.merge(s);
    }
    if total.frechet.is_empty() {
        total.frechet = vec![Vec::new(); opts.metric.frechet_thresholds.len()];
        total.chamfer = vec![Vec::new(); opts.metric.chamfer_thresholds.len()];
    }
    total.summary(&opts.metric)
}
