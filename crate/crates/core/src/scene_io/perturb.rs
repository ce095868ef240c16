use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{resample_polyline, Point3, Polyline, DEFAULT_SAMPLE_COUNT};
use crate::scene_io::{CenterlineGeometry, CenterlinePred, PredictionSet, Scene, TrafficPred};
use crate::topology::ScoreMatrix;

const TRAFFIC_STREAM: u64 = 1 << 32;
const CONFIDENCE_FLOOR: f64 = 0.05;

/// Turns ground truth into a noisy prediction set.
///
/// Each kept lane is resampled to 11 points and jittered in xy by
/// `N(0, sigma²)`. Lanes and traffic elements are dropped independently
/// with probability `drop_rate`. Lane confidence is a heuristic:
/// `1 − mean displacement / (3σ)`, clamped to `[0.05, 1]`. Score matrices
/// reproduce the ground-truth adjacency among kept instances.
pub fn perturb_scene(scene: &Scene, sigma: f64, drop_rate: f64, seed: u64) -> Result<PredictionSet> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!("noise sigma {sigma} must be >= 0")));
    }
    if !(0.0..=1.0).contains(&drop_rate) {
        return Err(Error::InvalidConfig(format!(
            "drop rate {drop_rate} outside [0, 1]"
        )));
    }
    let noise = Normal::new(0.0, sigma).expect("sigma validated");
    let rng_for = |stream: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng
    };

    let mut lane_map = vec![None; scene.centerlines.len()];
    let mut centerline_preds = Vec::new();
    for (i, c) in scene.centerlines.iter().enumerate() {
        let mut rng = rng_for(i as u64);
        if rng.random_bool(drop_rate) {
            continue;
        }
        let base = resample_polyline(&c.polyline, DEFAULT_SAMPLE_COUNT)?;
        let mut total = 0.0;
        let points: Vec<Point3<f64>> = base
            .points()
            .iter()
            .map(|p| {
                let (dx, dy) = (noise.sample(&mut rng), noise.sample(&mut rng));
                total += dx.hypot(dy);
                Point3::new(p.x + dx, p.y + dy, p.z)
            })
            .collect();
        let confidence = if sigma == 0.0 {
            1.0
        } else {
            let mean = total / points.len() as f64;
            (1.0 - mean / (3.0 * sigma)).clamp(CONFIDENCE_FLOOR, 1.0)
        };
        // Jitter can in principle collapse neighbours; keep the unperturbed
        // geometry in that case rather than failing.
        let polyline = Polyline::from_points_dedup(points).unwrap_or(base);
        lane_map[i] = Some(centerline_preds.len());
        centerline_preds.push(CenterlinePred {
            confidence,
            geometry: CenterlineGeometry::Polyline(polyline),
        });
    }

    let mut te_map = vec![None; scene.traffic_elements.len()];
    let mut traffic_preds = Vec::new();
    for (k, t) in scene.traffic_elements.iter().enumerate() {
        let mut rng = rng_for(TRAFFIC_STREAM + k as u64);
        if rng.random_bool(drop_rate) {
            continue;
        }
        te_map[k] = Some(traffic_preds.len());
        traffic_preds.push(TrafficPred {
            confidence: 1.0,
            bbox: t.bbox,
        });
    }

    let (ll_scores, lt_scores) = gt_adjacency(scene, &lane_map, &te_map)?;
    Ok(PredictionSet {
        frame_id: scene.frame_id.clone(),
        centerline_preds,
        traffic_preds,
        ll_scores,
        lt_scores,
    })
}

/// Binary score matrices reproducing the scene's edges among the kept
/// instances. `lane_map[i]` / `te_map[k]` give the prediction index of ground
/// truth instance `i` / `k`, or `None` when it was dropped.
pub(crate) fn gt_adjacency(
    scene: &Scene,
    lane_map: &[Option<usize>],
    te_map: &[Option<usize>],
) -> Result<(ScoreMatrix<f64>, ScoreMatrix<f64>)> {
    let n_lanes = lane_map.iter().flatten().count();
    let n_tes = te_map.iter().flatten().count();
    let mut ll = vec![0.0; n_lanes * n_lanes];
    for (a, b) in scene.ll_edge_indices() {
        if let (Some(pa), Some(pb)) = (lane_map[a], lane_map[b]) {
            ll[pa * n_lanes + pb] = 1.0;
        }
    }
    let mut lt = vec![0.0; n_lanes * n_tes];
    for (a, t) in scene.lt_edge_indices() {
        if let (Some(pa), Some(pt)) = (lane_map[a], te_map[t]) {
            lt[pa * n_tes + pt] = 1.0;
        }
    }
    let ids = |n: usize| (0..n).collect::<Vec<_>>();
    Ok((
        ScoreMatrix::new(ll, ids(n_lanes), ids(n_lanes))?,
        ScoreMatrix::new(lt, ids(n_lanes), ids(n_tes))?,
    ))
}
