use std::collections::BTreeMap;

use crate::error::Result;
use crate::geometry::Polyline;
use crate::metrics::{
    average_precision, box_iou, hungarian, match_instances, Box2D, LaneDistance, MatchMode, Matching,
    MetricConfig, TrafficCategory,
};
use crate::scalar::Real;

/// Row-major `preds x gts` distance matrix.
pub fn lane_distance_matrix<T: Real>(
    preds: &[&Polyline<T>],
    gts: &[&Polyline<T>],
    distance: LaneDistance,
) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(preds.len() * gts.len());
    for p in preds {
        for g in gts {
            out.push(distance.eval(p.points(), g.points())?);
        }
    }
    Ok(out)
}

/// Greedy lane matching at one distance threshold over a precomputed matrix.
pub fn match_lanes<T: Real>(confidences: &[f64], n_gts: usize, matrix: &[T], threshold: f64) -> Matching<T> {
    match_instances(
        confidences,
        n_gts,
        |i, j| matrix[i * n_gts + j],
        T::lit(threshold),
        MatchMode::LowerIsMatch,
    )
}

/// `(confidence, tp)` per prediction, one list per threshold.
pub fn lane_hits<T: Real>(
    confidences: &[f64],
    n_gts: usize,
    matrix: &[T],
    thresholds: &[f64],
) -> Vec<Vec<(f64, bool)>> {
    thresholds
        .iter()
        .map(|&thr| {
            let flags = match_lanes(confidences, n_gts, matrix, thr).tp_flags(confidences.len());
            confidences.iter().copied().zip(flags).collect()
        })
        .collect()
}

/// Lane detection mAP: mean AP over the distance's thresholds.
pub fn det_lanes<T: Real>(
    preds: &[(Polyline<T>, f64)],
    gts: &[Polyline<T>],
    distance: LaneDistance,
    cfg: &MetricConfig,
) -> Result<f64> {
    let pred_refs: Vec<&Polyline<T>> = preds.iter().map(|p| &p.0).collect();
    let gt_refs: Vec<&Polyline<T>> = gts.iter().collect();
    let conf: Vec<f64> = preds.iter().map(|p| p.1).collect();
    let matrix = lane_distance_matrix(&pred_refs, &gt_refs, distance)?;
    let thresholds = cfg.thresholds(distance);
    let hits = lane_hits(&conf, gts.len(), &matrix, thresholds);
    Ok(mean(hits.iter().map(|h| average_precision(h, gts.len()))))
}

pub(crate) fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub type CategoryHits = BTreeMap<TrafficCategory, (Vec<(f64, bool)>, usize)>;

/// Per-category `(hits, gt_count)` for one frame, plus the merged matching
/// over global box indices.
pub fn traffic_hits(
    preds: &[(Box2D, f64)],
    gts: &[Box2D],
    iou_threshold: f64,
) -> (CategoryHits, Matching<f64>) {
    let mut cats: Vec<TrafficCategory> = preds
        .iter()
        .map(|p| p.0.category)
        .chain(gts.iter().map(|g| g.category))
        .collect();
    cats.sort_unstable();
    cats.dedup();

    let mut per_cat = BTreeMap::new();
    let mut merged = Matching::default();
    for cat in cats {
        let p_idx: Vec<usize> = (0..preds.len()).filter(|&i| preds[i].0.category == cat).collect();
        let g_idx: Vec<usize> = (0..gts.len()).filter(|&j| gts[j].category == cat).collect();
        let conf: Vec<f64> = p_idx.iter().map(|&i| preds[i].1).collect();
        let m = match_instances(
            &conf,
            g_idx.len(),
            |i, j| box_iou(&preds[p_idx[i]].0, &gts[g_idx[j]]),
            iou_threshold,
            MatchMode::HigherIsMatch,
        );
        let flags = m.tp_flags(p_idx.len());
        per_cat.insert(cat, (conf.iter().copied().zip(flags).collect(), g_idx.len()));
        merged
            .pairs
            .extend(m.pairs.iter().map(|&(i, j, s)| (p_idx[i], g_idx[j], s)));
        merged
            .unmatched_preds
            .extend(m.unmatched_preds.iter().map(|&i| p_idx[i]));
        merged
            .unmatched_gts
            .extend(m.unmatched_gts.iter().map(|&j| g_idx[j]));
    }
    merged.pairs.sort_by_key(|p| p.0);
    merged.unmatched_preds.sort_unstable();
    merged.unmatched_gts.sort_unstable();
    (per_cat, merged)
}

/// Mean AP over categories that have ground truth.
pub(crate) fn traffic_map<'a>(per_cat: impl Iterator<Item = (&'a [(f64, bool)], usize)>) -> f64 {
    let mut any_pred = false;
    let mut aps = Vec::new();
    for (hits, gt) in per_cat {
        any_pred |= !hits.is_empty();
        if gt > 0 {
            aps.push(average_precision(hits, gt));
        }
    }
    if aps.is_empty() {
        return if any_pred { 0.0 } else { 1.0 };
    }
    mean(aps.into_iter())
}

/// Traffic-element detection mAP at the configured IoU threshold.
pub fn det_traffic(preds: &[(Box2D, f64)], gts: &[Box2D], cfg: &MetricConfig) -> f64 {
    let (per_cat, _) = traffic_hits(preds, gts, cfg.iou_threshold);
    traffic_map(per_cat.values().map(|(h, g)| (h.as_slice(), *g)))
}

/// True positives, false positives and false negatives of the point-fraction
/// F1 criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct F1Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl std::ops::Add for F1Counts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl F1Counts {
    pub fn score(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            1.0
        } else {
            2.0 * self.tp as f64 / denom as f64
        }
    }
}

/// A prediction is admissible for a ground truth when at least
/// `f1_point_fraction` of its points lie within `f1_distance` of the ground
/// truth polyline. Returns the admissibility cost (mean point distance).
fn f1_pair_cost<T: Real>(pred: &Polyline<T>, gt: &Polyline<T>, cfg: &MetricConfig) -> Option<f64> {
    let limit = T::lit(cfg.f1_distance);
    let dists: Vec<T> = pred.points().iter().map(|q| gt.distance_to_point(q)).collect();
    let close = dists.iter().filter(|&&d| d <= limit).count();
    let fraction = close as f64 / dists.len() as f64;
    (fraction >= cfg.f1_point_fraction)
        .then(|| dists.iter().map(|d| d.to_f64_lossy()).sum::<f64>() / dists.len() as f64)
}

/// Maximum-cardinality one-to-one matching over admissible pairs.
pub fn f1_counts<T: Real>(
    preds: &[&Polyline<T>],
    gts: &[&Polyline<T>],
    cfg: &MetricConfig,
) -> Result<F1Counts> {
    let (n, m) = (preds.len(), gts.len());
    let costs: Vec<Option<f64>> = preds
        .iter()
        .flat_map(|p| gts.iter().map(move |g| f1_pair_cost(p, g, cfg)))
        .collect();
    // Any inadmissible pair costs more than all admissible pairs together, so
    // the optimum maximizes the number of admissible pairs first.
    let penalty = 1.0 + costs.iter().flatten().sum::<f64>();
    let matrix: Vec<f64> = costs.iter().map(|c| c.unwrap_or(penalty)).collect();
    let tp = hungarian(&matrix, n, m)?
        .into_iter()
        .filter(|&(i, j)| costs[i * m + j].is_some())
        .count();
    Ok(F1Counts {
        tp,
        fp: n - tp,
        fn_: m - tp,
    })
}

pub fn f1_score<T: Real>(
    preds: &[(Polyline<T>, f64)],
    gts: &[Polyline<T>],
    cfg: &MetricConfig,
) -> Result<f64> {
    let p: Vec<&Polyline<T>> = preds.iter().map(|p| &p.0).collect();
    let g: Vec<&Polyline<T>> = gts.iter().collect();
    Ok(f1_counts(&p, &g, cfg)?.score())
}
