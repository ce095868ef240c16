use crate::scalar::Real;

/// Whether a pair matches when its score is at most or at least the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    /// Distances: smaller is better, `score <= threshold` matches.
    LowerIsMatch,
    /// Overlaps: larger is better, `score >= threshold` matches.
    HigherIsMatch,
}

/// One-to-one assignment of predictions to ground truth.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matching<T> {
    /// `(prediction, ground truth, score)`.
    pub pairs: Vec<(usize, usize, T)>,
    pub unmatched_preds: Vec<usize>,
    pub unmatched_gts: Vec<usize>,
}

impl<T: Real> Matching<T> {
    pub fn gt_of_pred(&self, pred: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == pred).map(|p| p.1)
    }

    pub fn pred_of_gt(&self, gt: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.1 == gt).map(|p| p.0)
    }

    /// Per-prediction true-positive flag, indexed by prediction.
    pub fn tp_flags(&self, n_preds: usize) -> Vec<bool> {
        let mut flags = vec![false; n_preds];
        for &(p, _, _) in &self.pairs {
            flags[p] = true;
        }
        flags
    }

    /// Lookup tables `pred -> gt` and `gt -> pred`.
    pub fn index_maps(&self, n_preds: usize, n_gts: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
        let mut p2g = vec![None; n_preds];
        let mut g2p = vec![None; n_gts];
        for &(p, g, _) in &self.pairs {
            p2g[p] = Some(g);
            g2p[g] = Some(p);
        }
        (p2g, g2p)
    }
}

/// Greedy matching in descending confidence order.
///
/// Each prediction claims its best-scoring unclaimed ground truth that passes
/// `threshold`. Equal confidences keep input order. `score(i, j)` is only
/// queried for `i < confidences.len()` and `j < n_gts`.
pub fn match_instances<T: Real>(
    confidences: &[f64],
    n_gts: usize,
    score: impl Fn(usize, usize) -> T,
    threshold: T,
    mode: MatchMode,
) -> Matching<T> {
    let mut order: Vec<usize> = (0..confidences.len()).collect();
    order.sort_by(|&a, &b| {
        confidences[b]
            .partial_cmp(&confidences[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut claimed = vec![false; n_gts];
    let mut out = Matching::default();
    for &i in &order {
        let mut best: Option<(usize, T)> = None;
        for (j, taken) in claimed.iter().enumerate() {
            if *taken {
                continue;
            }
            let s = score(i, j);
            let passes = match mode {
                MatchMode::LowerIsMatch => s <= threshold,
                MatchMode::HigherIsMatch => s >= threshold,
            };
            if !passes {
                continue;
            }
            let better = match (best, mode) {
                (None, _) => true,
                (Some((_, b)), MatchMode::LowerIsMatch) => s < b,
                (Some((_, b)), MatchMode::HigherIsMatch) => s > b,
            };
            if better {
                best = Some((j, s));
            }
        }
        match best {
            Some((j, s)) => {
                claimed[j] = true;
                out.pairs.push((i, j, s));
            }
            None => out.unmatched_preds.push(i),
        }
    }
    out.unmatched_preds.sort_unstable();
    out.unmatched_gts = (0..n_gts).filter(|&j| !claimed[j]).collect();
    out
}
