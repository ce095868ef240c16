//! Deterministic synthetic road scenes.
//!
//! Every instance draws from its own ChaCha stream keyed by `(seed, instance
//! index)`, so adding instances of one kind never perturbs another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{DirectionLabel, Point3, Polyline, Roi};
use crate::metrics::{Box2D, TrafficCategory};
use crate::scene_io::{Centerline, Scene, TrafficElement};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_straight: usize,
    pub n_arc: usize,
    pub n_uturn: usize,
    /// Lateral connectors (Left/Right lanes).
    pub n_lateral: usize,
    pub lane_spacing: f64,
    /// Vertex curvature of arc lanes, 1/m.
    pub arc_curvature_range: (f64, f64),
    pub n_traffic_elements: usize,
    pub split_probability: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_straight: 4,
            n_arc: 2,
            n_uturn: 1,
            n_lateral: 2,
            lane_spacing: 3.5,
            arc_curvature_range: (0.002, 0.01),
            n_traffic_elements: 3,
            split_probability: 0.3,
        }
    }
}

// Stream offsets per instance kind.
const STREAM_ARC: u64 = 1 << 20;
const STREAM_LATERAL: u64 = 2 << 20;
const STREAM_UTURN: u64 = 3 << 20;
const STREAM_TRAFFIC: u64 = 4 << 20;

const LONG_HALF_SPAN: f64 = 50.0;
const LATERAL_HALF_SPAN: f64 = 20.0;
const Y_LIMIT: f64 = 22.0;

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.arc_curvature_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "curvature range ({lo}, {hi}) must satisfy 0 < lo <= hi"
            )));
        }
        if !(0.0..=1.0).contains(&self.split_probability) {
            return Err(Error::InvalidConfig(format!(
                "split probability {} outside [0, 1]",
                self.split_probability
            )));
        }
        if !(self.lane_spacing > 0.0 && self.lane_spacing.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lane spacing {} must be positive",
                self.lane_spacing
            )));
        }
        let outer = (self.n_straight.saturating_sub(1)) as f64 / 2.0 * self.lane_spacing;
        if outer > 25.0 {
            return Err(Error::InvalidConfig(format!(
                "{} lanes at {} m spacing exceed the lateral ROI",
                self.n_straight, self.lane_spacing
            )));
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

fn polyline(points: Vec<Point3<f64>>) -> Polyline<f64> {
    Polyline::from_points_dedup(points).expect("generator emits at least two distinct points")
}

fn orient(p: Polyline<f64>, forward: bool) -> Polyline<f64> {
    if forward {
        p
    } else {
        p.reversed()
    }
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

/// Straight lane `i`, possibly split into two pieces joined by a successor edge.
fn straight(cfg: &SynthConfig, i: usize, out: &mut Vec<Centerline>, edges: &mut Vec<(String, String)>) {
    let mut rng = cfg.rng(i as u64);
    let y = (i as f64 - (cfg.n_straight as f64 - 1.0) / 2.0) * cfg.lane_spacing;
    // Right-hand traffic: lanes left of the ego vehicle flow towards it.
    let forward = y <= 0.0;
    let split = rng.random_bool(cfg.split_probability);
    let x_split: f64 = rng.random_range(-30.0..=30.0);
    let line = |a: f64, b: f64| {
        orient(
            polyline(vec![Point3::new(a, y, 0.0), Point3::new(b, y, 0.0)]),
            forward,
        )
    };
    if split {
        let (near, far) = (line(-LONG_HALF_SPAN, x_split), line(x_split, LONG_HALF_SPAN));
        let (first, second) = if forward { (near, far) } else { (far, near) };
        let (a, b) = (format!("S{i}a"), format!("S{i}b"));
        edges.push((a.clone(), b.clone()));
        out.push(Centerline {
            id: a,
            polyline: first,
        });
        out.push(Centerline {
            id: b,
            polyline: second,
        });
    } else {
        out.push(Centerline {
            id: format!("S{i}"),
            polyline: line(-LONG_HALF_SPAN, LONG_HALF_SPAN),
        });
    }
}

/// Parabolic arc `y = y0 + s·k/2·(x − x0)²`, curvature `k` at the vertex.
fn arc(cfg: &SynthConfig, j: usize) -> Centerline {
    let mut rng = cfg.rng(STREAM_ARC + j as u64);
    let (lo, hi) = cfg.arc_curvature_range;
    let k = rng.random_range(lo..=hi);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let x0: f64 = rng.random_range(-15.0..=15.0);
    let half = 30.0;
    let excursion = k / 2.0 * half * half;
    let (y_lo, y_hi) = if sign > 0.0 {
        (-Y_LIMIT, Y_LIMIT - excursion)
    } else {
        (-Y_LIMIT + excursion, Y_LIMIT)
    };
    let y0 = if y_lo < y_hi {
        rng.random_range(y_lo..=y_hi)
    } else {
        0.0
    };
    let points = linspace(x0 - half, x0 + half, 41)
        .map(|x| Point3::new(x, y0 + sign * k / 2.0 * (x - x0).powi(2), 0.0))
        .collect();
    let forward = rng.random_bool(0.5);
    Centerline {
        id: format!("A{j}"),
        polyline: orient(polyline(points), forward),
    }
}

/// Lateral connector `x = x0 + s·y` spanning y ∈ [−20, 20].
fn lateral(cfg: &SynthConfig, j: usize) -> Centerline {
    let mut rng = cfg.rng(STREAM_LATERAL + j as u64);
    let x0: f64 = rng.random_range(-40.0..=40.0);
    let slope: f64 = rng.random_range(-0.2..=0.2);
    let points = linspace(-LATERAL_HALF_SPAN, LATERAL_HALF_SPAN, 21)
        .map(|y| Point3::new(x0 + slope * y, y, 0.0))
        .collect();
    let leftward = rng.random_bool(0.5);
    Centerline {
        id: format!("X{j}"),
        polyline: orient(polyline(points), leftward),
    }
}

/// Forward leg, semicircle of diameter `lane_spacing`, return leg. Net
/// displacement is purely lateral, so the lane is labeled Left/Right while
/// its geometry doubles back along x.
fn uturn(cfg: &SynthConfig, j: usize) -> Centerline {
    let mut rng = cfg.rng(STREAM_UTURN + j as u64);
    let x_a: f64 = rng.random_range(-40.0..=0.0);
    let leg: f64 = rng.random_range(15.0..=30.0);
    let r = cfg.lane_spacing / 2.0;
    let y1: f64 = rng.random_range(-15.0..=(15.0 - 2.0 * r));
    let x_b = x_a + leg;
    let mut points: Vec<Point3<f64>> = linspace(x_a, x_b, 10).map(|x| Point3::new(x, y1, 0.0)).collect();
    let yc = y1 + r;
    for t in linspace(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, 14).skip(1) {
        points.push(Point3::new(x_b + r * t.cos(), yc + r * t.sin(), 0.0));
    }
    points.extend(
        linspace(x_b, x_a, 10)
            .skip(1)
            .map(|x| Point3::new(x, y1 + 2.0 * r, 0.0)),
    );
    Centerline {
        id: format!("U{j}"),
        polyline: polyline(points),
    }
}

fn traffic(
    cfg: &SynthConfig,
    k: usize,
    lanes: &[Centerline],
    edges: &mut Vec<(String, String)>,
) -> TrafficElement {
    let mut rng = cfg.rng(STREAM_TRAFFIC + k as u64);
    let x1: f64 = rng.random_range(0.0..1800.0);
    let y1: f64 = rng.random_range(0.0..900.0);
    let w: f64 = rng.random_range(20.0..100.0);
    let h: f64 = rng.random_range(20.0..100.0);
    let category = TrafficCategory::ALL[rng.random_range(0..TrafficCategory::ALL.len())];
    let id = format!("T{k}");
    if !lanes.is_empty() {
        let n_links = if lanes.len() > 1 {
            rng.random_range(1..=2)
        } else {
            1
        };
        let first = rng.random_range(0..lanes.len());
        edges.push((lanes[first].id.clone(), id.clone()));
        if n_links == 2 {
            let second = (first + rng.random_range(1..lanes.len())) % lanes.len();
            edges.push((lanes[second].id.clone(), id.clone()));
        }
    }
    TrafficElement {
        id,
        bbox: Box2D::new(x1, y1, x1 + w, y1 + h, category).expect("positive extent"),
    }
}

/// Builds one frame. Output is a pure function of `cfg`.
pub fn generate_synthetic_scene(cfg: &SynthConfig) -> Result<Scene> {
    cfg.validate()?;
    let mut lanes = Vec::new();
    let mut ll = Vec::new();
    for i in 0..cfg.n_straight {
        straight(cfg, i, &mut lanes, &mut ll);
    }
    lanes.extend((0..cfg.n_arc).map(|j| arc(cfg, j)));
    lanes.extend((0..cfg.n_lateral).map(|j| lateral(cfg, j)));
    lanes.extend((0..cfg.n_uturn).map(|j| uturn(cfg, j)));
    let mut lt = Vec::new();
    let tes = (0..cfg.n_traffic_elements)
        .map(|k| traffic(cfg, k, &lanes, &mut lt))
        .collect();
    Scene::new(
        format!("synth-{:06}", cfg.seed),
        Roi::default(),
        lanes,
        tes,
        ll,
        lt,
    )
}

/// Every step moves strictly in the direction of the polyline's label.
pub fn is_strictly_monotone(p: &Polyline<f64>) -> bool {
    let label = p.direction_label();
    p.points().windows(2).all(|w| {
        let d = w[1] - w[0];
        match label {
            DirectionLabel::Up => d.x > 0.0,
            DirectionLabel::Down => d.x < 0.0,
            DirectionLabel::Left => d.y > 0.0,
            DirectionLabel::Right => d.y < 0.0,
        }
    })
}
