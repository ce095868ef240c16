use std::collections::BTreeSet;

use crate::metrics::{average_precision, Matching};
use crate::scalar::Real;

/// A predicted directed edge between two prediction indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredEdge {
    pub from: usize,
    pub to: usize,
    pub score: f64,
}

/// Per-vertex edge APs for one frame.
///
/// Every ground-truth vertex with an outgoing edge contributes the AP of the
/// predicted edges leaving its matched prediction; every vertex with an
/// incoming edge contributes the AP of the edges entering it. A predicted edge
/// counts only when both endpoints are matched and the corresponding ground
/// truth edge exists. Unmatched vertices contribute 0.
pub fn top_vertex_aps<A: Real, B: Real>(
    pred_edges: &[ScoredEdge],
    gt_edges: &[(usize, usize)],
    from_match: &Matching<A>,
    to_match: &Matching<B>,
) -> Vec<f64> {
    let n_pred_from = matching_pred_count(from_match);
    let n_pred_to = matching_pred_count(to_match);
    let n_gt_from = matching_gt_count(from_match);
    let n_gt_to = matching_gt_count(to_match);
    let (from_p2g, from_g2p) = from_match.index_maps(n_pred_from, n_gt_from);
    let (to_p2g, to_g2p) = to_match.index_maps(n_pred_to, n_gt_to);
    let gt_set: BTreeSet<(usize, usize)> = gt_edges.iter().copied().collect();
    let lookup = |map: &[Option<usize>], i: usize| map.get(i).copied().flatten();

    let mut aps = Vec::new();
    // Outgoing view.
    let sources: BTreeSet<usize> = gt_set.iter().map(|e| e.0).collect();
    for &v in &sources {
        let gt_count = gt_set.iter().filter(|e| e.0 == v).count();
        let Some(pv) = lookup(&from_g2p, v) else {
            aps.push(0.0);
            continue;
        };
        let mut claimed = BTreeSet::new();
        let hits: Vec<(f64, bool)> = ranked(pred_edges.iter().filter(|e| e.from == pv))
            .map(|e| {
                let hit = lookup(&to_p2g, e.to)
                    .filter(|&w| gt_set.contains(&(v, w)) && claimed.insert(w))
                    .is_some();
                (e.score, hit)
            })
            .collect();
        aps.push(average_precision(&hits, gt_count));
    }
    // Incoming view.
    let targets: BTreeSet<usize> = gt_set.iter().map(|e| e.1).collect();
    for &w in &targets {
        let gt_count = gt_set.iter().filter(|e| e.1 == w).count();
        let Some(pw) = lookup(&to_g2p, w) else {
            aps.push(0.0);
            continue;
        };
        let mut claimed = BTreeSet::new();
        let hits: Vec<(f64, bool)> = ranked(pred_edges.iter().filter(|e| e.to == pw))
            .map(|e| {
                let hit = lookup(&from_p2g, e.from)
                    .filter(|&v| gt_set.contains(&(v, w)) && claimed.insert(v))
                    .is_some();
                (e.score, hit)
            })
            .collect();
        aps.push(average_precision(&hits, gt_count));
    }
    aps
}

fn ranked<'a>(edges: impl Iterator<Item = &'a ScoredEdge>) -> impl Iterator<Item = &'a ScoredEdge> {
    let mut v: Vec<&ScoredEdge> = edges.collect();
    v.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(std::cmp::Ordering::Equal));
    v.into_iter()
}

fn matching_pred_count<T>(m: &Matching<T>) -> usize {
    m.pairs
        .iter()
        .map(|p| p.0 + 1)
        .chain(m.unmatched_preds.iter().map(|&i| i + 1))
        .max()
        .unwrap_or(0)
}

fn matching_gt_count<T>(m: &Matching<T>) -> usize {
    m.pairs
        .iter()
        .map(|p| p.1 + 1)
        .chain(m.unmatched_gts.iter().map(|&j| j + 1))
        .max()
        .unwrap_or(0)
}

/// Reduces per-vertex APs to a TOP score.
///
/// With no ground-truth edges at all the score is 1 when nothing was
/// predicted either, 0 otherwise.
pub fn top_from_vertex_aps(aps: &[f64], gt_edge_count: usize, pred_edge_count: usize) -> f64 {
    if gt_edge_count == 0 {
        return if pred_edge_count == 0 { 1.0 } else { 0.0 };
    }
    aps.iter().sum::<f64>() / aps.len() as f64
}

/// Graph mAP over one frame's edges.
pub fn top_score<A: Real, B: Real>(
    pred_edges: &[ScoredEdge],
    gt_edges: &[(usize, usize)],
    from_match: &Matching<A>,
    to_match: &Matching<B>,
) -> f64 {
    let aps = top_vertex_aps(pred_edges, gt_edges, from_match, to_match);
    top_from_vertex_aps(&aps, gt_edges.len(), pred_edges.len())
}
