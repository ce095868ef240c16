use proptest::prelude::*;

use super::*;
use crate::error::Error;

fn pl(coords: &[[f64; 3]]) -> Polyline<f64> {
    Polyline::from_f64(coords).unwrap()
}

fn p(x: f64, y: f64, z: f64) -> Point3<f64> {
    Point3::new(x, y, z)
}

#[test]
fn polyline_rejects_short_duplicate_and_nan() {
    assert!(matches!(
        Polyline::<f64>::new(vec![p(0.0, 0.0, 0.0)]),
        Err(Error::InvalidPolyline(_))
    ));
    assert!(Polyline::new(vec![p(1.0, 0.0, 0.0), p(1.0, 0.0, 0.0)]).is_err());
    assert!(Polyline::new(vec![p(f64::NAN, 0.0, 0.0), p(1.0, 0.0, 0.0)]).is_err());
}

#[test]
fn direction_label_examples() {
    let up = [p(0.0, 0.0, 0.0), p(5.0, 0.5, 0.0), p(10.0, 1.0, 0.0)];
    assert_eq!(assign_direction_label(&up).unwrap(), DirectionLabel::Up);
    let down: Vec<_> = up.iter().rev().copied().collect();
    assert_eq!(assign_direction_label(&down).unwrap(), DirectionLabel::Down);
    let left = [p(0.0, 0.0, 0.0), p(-1.0, 5.0, 0.0), p(-2.0, 10.0, 0.0)];
    assert_eq!(assign_direction_label(&left).unwrap(), DirectionLabel::Left);
    let right: Vec<_> = left.iter().rev().copied().collect();
    assert_eq!(assign_direction_label(&right).unwrap(), DirectionLabel::Right);
    assert!(assign_direction_label::<f64>(&[p(0.0, 0.0, 0.0)]).is_err());
}

#[test]
fn direction_label_tie_goes_to_x() {
    let diag = [p(0.0, 0.0, 0.0), p(3.0, 3.0, 0.0)];
    assert_eq!(assign_direction_label(&diag).unwrap(), DirectionLabel::Up);
    let back = [p(0.0, 0.0, 0.0), p(-3.0, 3.0, 0.0)];
    assert_eq!(assign_direction_label(&back).unwrap(), DirectionLabel::Down);
}

#[test]
fn step_counting_differs_on_serpentine() {
    // Mostly lateral wiggles with a large single forward jump.
    let pts = [
        p(0.0, 0.0, 0.0),
        p(0.1, 1.0, 0.0),
        p(0.2, 2.0, 0.0),
        p(0.1, 3.0, 0.0),
        p(0.0, 4.0, 0.0),
        p(10.0, 4.0, 0.0),
    ];
    assert_eq!(assign_direction_label(&pts).unwrap(), DirectionLabel::Up);
    assert_eq!(
        assign_direction_label_by_steps(&pts).unwrap(),
        DirectionLabel::Left
    );
}

#[test]
fn direction_label_parse_is_case_insensitive() {
    assert_eq!("UP".parse::<DirectionLabel>().unwrap(), DirectionLabel::Up);
    assert_eq!("Right".parse::<DirectionLabel>().unwrap(), DirectionLabel::Right);
    assert!("north".parse::<DirectionLabel>().is_err());
}

#[test]
fn order_points_examples() {
    let set = [p(10.0, 0.0, 0.0), p(0.0, 0.0, 0.0), p(5.0, 0.0, 0.0)];
    assert_eq!(
        order_points(&set, DirectionLabel::Up).unwrap(),
        pl(&[[0.0, 0.0, 0.0], [5.0, 0.0, 0.0], [10.0, 0.0, 0.0]])
    );
    let set = [p(0.0, 3.0, 0.0), p(0.0, 1.0, 0.0)];
    assert_eq!(
        order_points(&set, DirectionLabel::Left).unwrap(),
        pl(&[[0.0, 1.0, 0.0], [0.0, 3.0, 0.0]])
    );
    let set = [p(0.0, 0.0, 0.0), p(5.0, 0.0, 0.0)];
    assert_eq!(
        order_points(&set, DirectionLabel::Down).unwrap(),
        pl(&[[5.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    );
    assert!(order_points(&[p(0.0, 0.0, 0.0)], DirectionLabel::Up).is_err());
}

#[test]
fn order_points_ties_break_on_other_axis() {
    let set = [p(1.0, 2.0, 0.0), p(1.0, -2.0, 0.0), p(0.0, 0.0, 0.0)];
    let out = order_points(&set, DirectionLabel::Down).unwrap();
    assert_eq!(
        out.points(),
        &[p(1.0, -2.0, 0.0), p(1.0, 2.0, 0.0), p(0.0, 0.0, 0.0)]
    );
}

#[test]
fn bezier_examples() {
    let curve = BezierCurve::new([
        p(0.0, 0.0, 0.0),
        p(1.0, 3.0, 1.0),
        p(2.0, -1.0, 0.5),
        p(7.0, 2.0, 0.0),
        p(9.0, 9.0, 2.0),
    ]);
    let s = bezier_sample(&curve, DEFAULT_SAMPLE_COUNT).unwrap();
    assert_eq!(s.len(), 11);
    assert_eq!(s.first(), curve.control_points[0]);
    assert_eq!(s.last(), curve.control_points[4]);

    let flat = BezierCurve::new([p(3.0, 3.0, 0.0); 5]);
    let pts = bezier_sample_points(&flat, 11).unwrap();
    assert!(pts.iter().all(|q| *q == p(3.0, 3.0, 0.0)));
    assert!(bezier_sample(&flat, 11).is_err());

    assert!(matches!(
        bezier_sample(&curve, 1),
        Err(Error::InvalidSampleCount(1))
    ));
}

#[test]
fn bezier_midpoint_of_equally_spaced_line() {
    // Hand oracle: sum_i C(4,i) 0.5^4 * i = (0 + 4 + 12 + 12 + 4) / 16 = 2.
    let curve = BezierCurve::new([
        p(0.0, 0.0, 0.0),
        p(1.0, 0.0, 0.0),
        p(2.0, 0.0, 0.0),
        p(3.0, 0.0, 0.0),
        p(4.0, 0.0, 0.0),
    ]);
    let mid = curve.eval(0.5);
    assert!((mid.x - 2.0).abs() < 1e-12 && mid.y == 0.0 && mid.z == 0.0);
    let pts = bezier_sample(&curve, 3).unwrap();
    assert!((pts.points()[1].x - 2.0).abs() < 1e-12);
}

#[test]
fn fix_endpoints_examples() {
    let inner = [
        p(0.0, 0.0, 0.0),
        p(2.5, 0.0, 0.0),
        p(5.0, 0.0, 0.0),
        p(7.5, 0.0, 0.0),
        p(10.0, 0.0, 0.0),
    ];
    let same = fix_bezier_endpoints(inner, inner[0], inner[4]);
    assert_eq!(same.control_points, inner);

    let wild = [
        p(-3.0, 4.0, 1.0),
        p(1.0, 5.0, 0.0),
        p(4.0, -2.0, 0.0),
        p(6.0, 1.0, 0.0),
        p(30.0, 30.0, 0.0),
    ];
    let fixed = fix_bezier_endpoints(wild, p(0.0, 0.0, 0.0), p(10.0, 0.0, 0.0));
    assert_eq!(fixed.eval(0.0), p(0.0, 0.0, 0.0));
    assert_eq!(fixed.eval(1.0), p(10.0, 0.0, 0.0));
    assert_eq!(fixed.control_points[1..4], wild[1..4]);

    // Collinear inner points on the segment: every sample on the segment.
    let line = fix_bezier_endpoints(
        [p(9.0, 9.0, 9.0), inner[1], inner[2], inner[3], p(9.0, 9.0, 9.0)],
        p(0.0, 0.0, 0.0),
        p(10.0, 0.0, 0.0),
    );
    for q in bezier_sample(&line, 21).unwrap().points() {
        assert!(q.y.abs() < 1e-12 && q.z.abs() < 1e-12);
        assert!(q.x >= -1e-12 && q.x <= 10.0 + 1e-12);
    }
}

#[test]
fn fit_quadratic_examples() {
    let parabola: Vec<(f64, f64)> = (-3..=3).map(|i| (i as f64, (i * i) as f64)).collect();
    let f = fit_quadratic(&parabola, Axis::X).unwrap();
    assert!((f.a - 1.0).abs() < 1e-12 && f.b.abs() < 1e-12 && f.c.abs() < 1e-12);
    assert!(f.residual(&parabola) < 1e-20);

    let line: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
    let f = fit_quadratic(&line, Axis::X).unwrap();
    assert!(f.a.abs() < 1e-12 && (f.b - 2.0).abs() < 1e-12 && (f.c - 1.0).abs() < 1e-12);
}

#[test]
fn fit_quadratic_degenerate_cases() {
    let two: [(f64, f64); 3] = [(1.0, 3.0), (1.0, 5.0), (3.0, 7.0)];
    let f = fit_quadratic(&two, Axis::Y).unwrap();
    assert_eq!(f.a, 0.0);
    assert_eq!(f.axis, Axis::Y);
    // Least-squares line through (1,4) and (3,7) weighted as 2:1.
    assert!((f.eval(1.0) - 4.0).abs() < 1e-12);
    assert!((f.eval(3.0) - 7.0).abs() < 1e-12);

    let one: [(f64, f64); 2] = [(2.0, 1.0), (2.0, 3.0)];
    let f = fit_quadratic(&one, Axis::X).unwrap();
    assert!((f.c - 2.0).abs() < 1e-12 && f.a == 0.0 && f.b == 0.0);

    assert!(matches!(
        fit_quadratic(&[(0.0, 0.0)], Axis::X),
        Err(Error::InsufficientSamples(1))
    ));
}

#[test]
fn fit_quadratic_noisy_parabola_matches_independent_solver() {
    use rand::{Rng, SeedableRng};
    use rand_distr::{Distribution, Normal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let (a, b, c) = (0.03, -0.7, 2.0);
    let samples: Vec<(f64, f64)> = (0..50)
        .map(|_| {
            let t: f64 = rng.random_range(-20.0..20.0);
            (t, a * t * t + b * t + c + noise.sample(&mut rng))
        })
        .collect();
    let fit = fit_quadratic(&samples, Axis::X).unwrap();

    // Oracle: SVD least squares on the raw Vandermonde system.
    let design = nalgebra::DMatrix::from_fn(50, 3, |r, col| samples[r].0.powi(col as i32));
    let rhs = nalgebra::DVector::from_iterator(50, samples.iter().map(|s| s.1));
    let oracle = design.svd(true, true).solve(&rhs, 1e-14).unwrap();
    assert!((fit.c - oracle[0]).abs() < 1e-8);
    assert!((fit.b - oracle[1]).abs() < 1e-9);
    assert!((fit.a - oracle[2]).abs() < 1e-10);

    // Recovered within 3-sigma-scaled standard errors of the true curve.
    let sigma: f64 = 0.1;
    let n: f64 = 50.0;
    let spread: f64 = 20.0;
    assert!((fit.c - c).abs() < 3.0 * sigma * 3.0 / n.sqrt());
    assert!((fit.b - b).abs() < 3.0 * sigma * 3.0 / (n.sqrt() * spread / 2.0));
    assert!((fit.a - a).abs() < 3.0 * sigma * 6.0 / (n.sqrt() * spread * spread / 4.0));
}

#[test]
fn resample_examples() {
    let seg = pl(&[[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]]);
    assert_eq!(
        resample_polyline(&seg, 3).unwrap(),
        pl(&[[0.0, 0.0, 0.0], [5.0, 0.0, 0.0], [10.0, 0.0, 0.0]])
    );
    let uniform = pl(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [4.0, 0.0, 0.0], [6.0, 0.0, 0.0]]);
    assert_eq!(resample_polyline(&uniform, 4).unwrap(), uniform);

    // Cumulative-length walk: arc lengths {0,5,10,15,20} on the L.
    let l_shape = pl(&[[0.0, 0.0, 0.0], [10.0, 0.0, 0.0], [10.0, 10.0, 0.0]]);
    let out = resample_polyline(&l_shape, 5).unwrap();
    let expect = [[0.0, 0.0], [5.0, 0.0], [10.0, 0.0], [10.0, 5.0], [10.0, 10.0]];
    for (q, e) in out.points().iter().zip(expect) {
        assert!((q.x - e[0]).abs() < 1e-12 && (q.y - e[1]).abs() < 1e-12);
    }
    assert!(matches!(
        resample_polyline(&seg, 1),
        Err(Error::InvalidSampleCount(1))
    ));
}

#[test]
fn clip_examples() {
    let roi = Roi::default();
    let inside = pl(&[[-10.0, 0.0, 0.0], [10.0, 5.0, 1.0]]);
    assert_eq!(clip_to_roi(&inside, &roi), vec![inside.clone()]);

    let outside = pl(&[[60.0, 0.0, 0.0], [70.0, 5.0, 0.0]]);
    assert!(clip_to_roi(&outside, &roi).is_empty());

    let through = pl(&[[-60.0, 0.0, 0.0], [60.0, 0.0, 0.0]]);
    assert_eq!(
        clip_to_roi(&through, &roi),
        vec![pl(&[[-50.0, 0.0, 0.0], [50.0, 0.0, 0.0]])]
    );
}

#[test]
fn clip_splits_reentrant_polyline() {
    let roi = Roi::default();
    let zig = pl(&[
        [0.0, 0.0, 0.0],
        [0.0, 40.0, 4.0],
        [10.0, 40.0, 4.0],
        [10.0, 0.0, 0.0],
    ]);
    let pieces = clip_to_roi(&zig, &roi);
    assert_eq!(pieces.len(), 2);
    assert_eq!(pieces[0].last(), p(0.0, 25.0, 2.5));
    assert_eq!(pieces[1].first(), p(10.0, 25.0, 2.5));
}

#[test]
fn roi_validation() {
    assert!(Roi::new(1.0, 0.0, -1.0, 1.0).is_err());
    assert!(Roi::new(0.0, 1.0, 1.0, 1.0).is_err());
    let r: Roi<f32> = Roi::default();
    assert_eq!((r.x_min, r.y_max), (-50.0, 25.0));
}

#[test]
fn generic_over_f32() {
    let line: Polyline<f32> = Polyline::from_f64(&[[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]]).unwrap();
    let r = resample_polyline(&line, 11).unwrap();
    assert_eq!(r.len(), 11);
    assert!((r.points()[5].x - 5.0).abs() < 1e-5);
    assert_eq!(r.direction_label(), DirectionLabel::Up);
}

fn arb_points(max: usize) -> impl Strategy<Value = Vec<Point3<f64>>> {
    prop::collection::vec(
        (-40.0..40.0f64, -20.0..20.0f64, -2.0..2.0f64).prop_map(|(x, y, z)| p(x, y, z)),
        2..max,
    )
}

fn arb_polyline(max: usize) -> impl Strategy<Value = Polyline<f64>> {
    arb_points(max).prop_filter_map("degenerate", |pts| Polyline::from_points_dedup(pts).ok())
}

/// Convex hull (Andrew's monotone chain) for the 2-D hull oracle.
fn hull_2d(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross =
        |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &q in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &q in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

proptest! {
    #[test]
    fn reversal_flips_label(pl in arb_polyline(8)) {
        let a = pl.first();
        let b = pl.last();
        let (dx, dy) = ((b.x - a.x).abs(), (b.y - a.y).abs());
        prop_assume!(dx != dy && dx.max(dy) > 0.0);
        prop_assert_eq!(pl.reversed().direction_label(), pl.direction_label().opposite());
    }

    #[test]
    fn order_points_is_idempotent(pts in arb_points(12), idx in 0usize..4) {
        let label = DirectionLabel::ALL[idx];
        if let Ok(once) = order_points(&pts, label) {
            let twice = order_points(once.points(), label).unwrap();
            prop_assert_eq!(once, twice);
        }
    }

    #[test]
    fn bezier_endpoints_exact_and_inside_hull(
        cps in prop::collection::vec((-30.0..30.0f64, -30.0..30.0f64), 5),
        n in 2usize..40,
    ) {
        let arr: [Point3<f64>; 5] = std::array::from_fn(|i| p(cps[i].0, cps[i].1, 0.0));
        let curve = BezierCurve::new(arr);
        let samples = bezier_sample_points(&curve, n).unwrap();
        prop_assert_eq!(samples[0], arr[0]);
        prop_assert_eq!(samples[n - 1], arr[4]);
        let hull = hull_2d(cps.clone());
        for q in &samples {
            if hull.len() >= 3 {
                for i in 0..hull.len() {
                    let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
                    let cross = (b.0 - a.0) * (q.y - a.1) - (b.1 - a.1) * (q.x - a.0);
                    let edge = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
                    prop_assert!(cross / edge >= -1e-9);
                }
            }
        }
    }

    #[test]
    fn fit_beats_perturbed_coefficients(
        coeffs in (-1.0..1.0f64, -5.0..5.0f64, -10.0..10.0f64),
        noise in prop::collection::vec(-0.5..0.5f64, 12),
        perturb in prop::collection::vec((-0.1..0.1f64, -0.1..0.1f64, -0.1..0.1f64), 100),
    ) {
        let samples: Vec<(f64, f64)> = noise
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let t = i as f64 - 5.5;
                (t, coeffs.0 * t * t + coeffs.1 * t + coeffs.2 + e)
            })
            .collect();
        let fit = fit_quadratic(&samples, Axis::X).unwrap();
        let best = fit.residual(&samples);
        for (da, db, dc) in perturb {
            let other = QuadraticFit { a: fit.a + da, b: fit.b + db, c: fit.c + dc, axis: Axis::X };
            prop_assert!(best <= other.residual(&samples) + 1e-9);
        }
    }

    #[test]
    fn resample_keeps_endpoints_and_arc_positions(pl in arb_polyline(8), n in 2usize..30) {
        let out = resample_polyline(&pl, n).unwrap();
        prop_assert_eq!(out.first(), pl.first());
        prop_assert_eq!(out.last(), pl.last());
        prop_assert!(out.length() <= pl.length() + 1e-9);
        // Each output point lies on the input at arc length k * L / (n - 1).
        let total = pl.length();
        let cum = pl.cumulative_lengths();
        let pts = pl.points();
        if out.len() == n {
            for (k, q) in out.points().iter().enumerate() {
                let target = total * k as f64 / (n - 1) as f64;
                let seg = (0..pts.len() - 1)
                    .find(|&s| cum[s + 1] >= target - 1e-12)
                    .unwrap_or(pts.len() - 2);
                let along = cum[seg] + pts[seg].distance(q);
                prop_assert!((along - target).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn resample_of_straight_line_preserves_length(
        start in (-40.0..40.0f64, -20.0..20.0f64),
        dir in (-1.0..1.0f64, -1.0..1.0f64),
        n in 2usize..30,
    ) {
        prop_assume!(dir.0.abs() + dir.1.abs() > 0.1);
        let a = p(start.0, start.1, 0.0);
        let line = Polyline::new(vec![a, a + p(dir.0 * 5.0, dir.1 * 5.0, 0.0), a + p(dir.0 * 20.0, dir.1 * 20.0, 0.0)]).unwrap();
        let out = resample_polyline(&line, n).unwrap();
        prop_assert!((out.length() - line.length()).abs() < 1e-9);
    }

    #[test]
    fn clip_stays_inside_and_never_grows(
        pts in prop::collection::vec(
            (-90.0..90.0f64, -50.0..50.0f64).prop_map(|(x, y)| p(x, y, 0.0)), 2..10)
    ) {
        let Ok(pl) = Polyline::from_points_dedup(pts) else { return Ok(()); };
        let roi = Roi::default();
        let pieces = clip_to_roi(&pl, &roi);
        let mut total = 0.0;
        for piece in &pieces {
            for q in piece.points() {
                prop_assert!(q.x >= roi.x_min - 1e-9 && q.x <= roi.x_max + 1e-9);
                prop_assert!(q.y >= roi.y_min - 1e-9 && q.y <= roi.y_max + 1e-9);
            }
            total += piece.length();
        }
        prop_assert!(total <= pl.length() + 1e-9);
    }
}
