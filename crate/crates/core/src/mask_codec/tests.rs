use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::geometry::{bezier_sample, BezierCurve, Point3, Polyline};
use crate::geometry::{DirectionLabel, Roi};

fn pl(coords: &[[f64; 3]]) -> Polyline<f64> {
    Polyline::from_f64(coords).unwrap()
}

fn grid() -> GridSpec<f64> {
    GridSpec::default()
}

#[test]
fn default_grid_geometry() {
    let g = grid();
    assert_eq!((g.rows, g.cols), (200, 104));
    assert_eq!(g.cell_size_x(), 0.5);
    assert!((g.cell_size_y() - 50.0 / 104.0).abs() < 1e-15);
    assert_eq!(g.row_center(0), -49.75);
    assert_eq!(g.row_center(199), 49.75);
    assert!((g.col_center(52) - 25.0 / 104.0).abs() < 1e-12);
    assert!(GridSpec::<f64>::new(1, 5, Roi::default()).is_err());
}

#[test]
fn thin_raster_marks_one_cell_per_row() {
    let line = pl(&[[-49.75, 0.0, 0.0], [49.75, 0.0, 0.0]]);
    let mask = rasterize_centerline(&line, &grid(), 0.0).unwrap();
    assert_eq!(mask.marked_cells(), 200);
    assert_eq!(mask.direction, DirectionLabel::Up);
    assert_eq!(mask.confidence, 1.0);
    assert!(mask.is_binary());
    // y = 0 sits on the lower edge of column 52.
    for r in 0..200 {
        assert_eq!(mask.get(r, 52), 1.0, "row {r}");
    }
}

#[test]
fn thick_raster_marks_band() {
    let line = pl(&[[-49.75, 0.0, 0.0], [49.75, 0.0, 0.0]]);
    let g = grid();
    let mask = rasterize_centerline(&line, &g, 1.0).unwrap();
    for r in 0..200 {
        let marked: Vec<usize> = (0..104).filter(|&c| mask.get(r, c) > 0.0).collect();
        assert!((2..=3).contains(&marked.len()), "row {r}: {marked:?}");
        for c in marked {
            assert!(g.col_center(c).abs() <= 0.5);
        }
    }
}

#[test]
fn raster_outside_roi_is_empty() {
    let far = pl(&[[60.0, 0.0, 0.0], [80.0, 1.0, 0.0]]);
    assert_eq!(
        rasterize_centerline(&far, &grid(), 1.0),
        Err(Error::EmptyRasterization)
    );
    assert!(rasterize_centerline(&far, &grid(), -1.0).is_err());
}

#[test]
fn raster_diagonal_is_connected() {
    let diag = pl(&[[-20.0, -20.0, 0.0], [20.0, 20.0, 0.0]]);
    let g = grid();
    let mask = rasterize_centerline(&diag, &g, 0.0).unwrap();
    // Every row the segment spans holds at least one cell.
    let r0 = (g.row_coord(-20.0)).floor() as usize;
    let r1 = (g.row_coord(20.0)).floor() as usize;
    for r in r0..=r1 {
        assert!((0..g.cols).any(|c| mask.get(r, c) > 0.0), "row {r}");
    }
}

#[test]
fn symmetric_expectation_lands_between_columns() {
    let g = grid();
    let mut mask = InstanceMask::zeros(&g, DirectionLabel::Up);
    mask.set(40, 10, 0.5);
    mask.set(40, 12, 0.5);
    mask.set(40, 30, 0.01);
    let lines = line_points(&mask, &g, &DecodeConfig::default()).unwrap();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0].0, g.row_center(40));
    assert!((lines[0].1 - g.col_center(11)).abs() < 1e-12);
}

#[test]
fn all_zero_mask_fails() {
    let g = grid();
    let mask = InstanceMask::zeros(&g, DirectionLabel::Left);
    assert_eq!(
        decode_mask(&mask, &g, &DecodeConfig::default()),
        Err(Error::DecodeFailed {
            valid: 0,
            required: 3
        })
    );
}

#[test]
fn decode_rejects_shape_mismatch_and_bad_config() {
    let g = grid();
    let small = GridSpec::new(10, 10, Roi::default()).unwrap();
    let mask = InstanceMask::zeros(&small, DirectionLabel::Up);
    assert!(matches!(
        decode_mask(&mask, &g, &DecodeConfig::default()),
        Err(Error::InvalidGrid(_))
    ));
    let bad = DecodeConfig {
        cell_mass_floor: 0.9,
        ..DecodeConfig::default()
    };
    assert!(bad.validate().is_err());
    assert!(InstanceMask::new(2, 2, vec![0.0, 1.5, 0.0, 0.0], DirectionLabel::Up, 1.0).is_err());
    assert!(InstanceMask::new(2, 2, vec![0.0; 3], DirectionLabel::Up, 1.0).is_err());
}

#[test]
fn straight_line_roundtrip_within_half_cell_diagonal() {
    let g = grid();
    let src = pl(&[[-40.0, -10.0, 0.0], [45.0, 12.0, 0.0]]);
    let mask = rasterize_centerline(&src, &g, 1.0).unwrap();
    let out = decode_mask(&mask, &g, &DecodeConfig::default()).unwrap();
    assert_eq!(out.len(), 11);
    let bound = g.half_cell_diagonal();
    assert!(bound <= 0.35);
    for q in out.points() {
        assert_eq!(q.z, 0.0);
        assert!(src.distance_to_point(q) <= bound, "{q:?}");
    }
}

#[test]
fn down_and_right_are_reversed() {
    let g = grid();
    let cfg = DecodeConfig::default();
    let down = pl(&[[30.0, 2.0, 0.0], [-30.0, 2.0, 0.0]]);
    let out = decode_mask(&rasterize_centerline(&down, &g, 0.0).unwrap(), &g, &cfg).unwrap();
    assert!(out.points().windows(2).all(|w| w[1].x < w[0].x));
    let right = pl(&[[5.0, 20.0, 0.0], [8.0, -20.0, 0.0]]);
    let out = decode_mask(&rasterize_centerline(&right, &g, 0.0).unwrap(), &g, &cfg).unwrap();
    assert!(out.points().windows(2).all(|w| w[1].y < w[0].y));
}

#[test]
fn arc_length_spacing_toggle() {
    let g = grid();
    let src: Polyline<f64> = Polyline::new(
        (0..41)
            .map(|i| {
                let x = -40.0 + 2.0 * i as f64;
                Point3::new(x, 0.01 * x * x - 8.0, 0.0)
            })
            .collect(),
    )
    .unwrap();
    let mask = rasterize_centerline(&src, &g, 1.0).unwrap();
    let cfg = DecodeConfig {
        spacing: SampleSpacing::ArcLength,
        ..DecodeConfig::default()
    };
    let out = decode_mask(&mask, &g, &cfg).unwrap();
    assert_eq!(out.len(), 11);
    let steps: Vec<f64> = out.points().windows(2).map(|w| w[0].distance(&w[1])).collect();
    let mean = steps.iter().sum::<f64>() / steps.len() as f64;
    assert!(steps.iter().all(|s| (s - mean).abs() < 0.01 * mean));
}

#[test]
fn two_valid_lines_fall_back_to_linear() {
    let g = grid();
    let mut mask = InstanceMask::zeros(&g, DirectionLabel::Up);
    mask.set(10, 50, 1.0);
    mask.set(20, 60, 1.0);
    let cfg = DecodeConfig {
        min_valid_lines: 2,
        ..DecodeConfig::default()
    };
    let out = decode_mask(&mask, &g, &cfg).unwrap();
    let first = out.first();
    assert_eq!(first.x, g.row_center(10));
    assert!((first.y - g.col_center(50)).abs() < 1e-9);
    let last = out.last();
    assert_eq!(last.x, g.row_center(20));
    assert!((last.y - g.col_center(60)).abs() < 1e-9);
}

#[test]
fn fusion_policy_table() {
    let mask_poly = pl(&[[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]]);
    let bez_poly = pl(&[[0.0, 1.0, 0.0], [10.0, 1.0, 0.0]]);
    let fuse =
        |label, policy| fuse_predictions(Ok(mask_poly.clone()), bez_poly.clone(), label, policy).unwrap();
    assert_eq!(
        fuse(DirectionLabel::Up, FusionPolicy::DirectionalFusion),
        mask_poly
    );
    assert_eq!(
        fuse(DirectionLabel::Left, FusionPolicy::DirectionalFusion),
        bez_poly
    );
    assert_eq!(fuse(DirectionLabel::Right, FusionPolicy::MaskOnly), mask_poly);
    assert_eq!(fuse(DirectionLabel::Down, FusionPolicy::BezierOnly), bez_poly);

    let failed = Err(Error::DecodeFailed {
        valid: 0,
        required: 3,
    });
    assert!(fuse_predictions(
        failed.clone(),
        bez_poly.clone(),
        DirectionLabel::Up,
        FusionPolicy::MaskOnly
    )
    .is_err());
    assert!(fuse_predictions(
        failed.clone(),
        bez_poly.clone(),
        DirectionLabel::Down,
        FusionPolicy::DirectionalFusion
    )
    .is_err());
    assert_eq!(
        fuse_predictions(
            failed,
            bez_poly.clone(),
            DirectionLabel::Right,
            FusionPolicy::DirectionalFusion
        )
        .unwrap(),
        bez_poly
    );
    assert_eq!(
        "FUSION".parse::<FusionPolicy>().unwrap(),
        FusionPolicy::DirectionalFusion
    );
}

#[test]
fn resolve_pins_bezier_to_mask_endpoints() {
    let g = grid();
    let cfg = DecodeConfig::default();
    let src = pl(&[[2.0, -20.0, 0.0], [2.0, 20.0, 0.0]]);
    let mask = rasterize_centerline(&src, &g, 1.0).unwrap();
    let decoded = decode_mask(&mask, &g, &cfg).unwrap();
    let curve = BezierCurve::new([
        Point3::new(9.0, -30.0, 0.0),
        Point3::new(2.0, -10.0, 0.0),
        Point3::new(2.0, 0.0, 0.0),
        Point3::new(2.0, 10.0, 0.0),
        Point3::new(9.0, 30.0, 0.0),
    ]);
    let out = resolve_mask_bezier(
        &mask,
        &curve,
        DirectionLabel::Left,
        &g,
        &cfg,
        FusionPolicy::BezierOnly,
    )
    .unwrap();
    assert_eq!(out.first(), decoded.first());
    assert_eq!(out.last(), decoded.last());

    // A failed mask leaves the curve as predicted.
    let empty = InstanceMask::zeros(&g, DirectionLabel::Left);
    let out = resolve_mask_bezier(
        &empty,
        &curve,
        DirectionLabel::Left,
        &g,
        &cfg,
        FusionPolicy::DirectionalFusion,
    )
    .unwrap();
    assert_eq!(out, bezier_sample(&curve, 11).unwrap());
}

fn arb_quadratic_lane() -> impl Strategy<Value = (Polyline<f64>, DirectionLabel)> {
    (
        0usize..4,
        -0.01..0.01f64,
        -0.3..0.3f64,
        -8.0..8.0f64,
        30.0..80.0f64,
        -10.0..10.0f64,
    )
        .prop_map(|(dir, a, b, c, len, start)| {
            let label = DirectionLabel::ALL[dir];
            let (lo, hi, limit) = if label.is_longitudinal() {
                (start - len / 2.0, start + len / 2.0, 48.0)
            } else {
                (start / 2.0 - len / 4.0, start / 2.0 + len / 4.0, 23.0)
            };
            let (lo, hi) = (lo.max(-limit), hi.min(limit));
            let pts: Vec<Point3<f64>> = (0..=40)
                .map(|i| {
                    let t = lo + (hi - lo) * i as f64 / 40.0;
                    let u = a * t * t + b * t + c;
                    if label.is_longitudinal() {
                        Point3::new(t, u / 2.0, 0.0)
                    } else {
                        Point3::new(u * 2.0, t, 0.0)
                    }
                })
                .collect();
            let mut line = Polyline::new(pts).unwrap();
            if matches!(label, DirectionLabel::Down | DirectionLabel::Right) {
                line = line.reversed();
            }
            (line, label)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quadratic_roundtrip_within_cell_diagonal(
        (lane, label) in arb_quadratic_lane(),
        thickness in prop::sample::select(vec![0.0, 1.0]),
    ) {
        let g = grid();
        let mask = rasterize_centerline(&lane, &g, thickness).unwrap();
        prop_assert_eq!(mask.direction, label);
        let cfg = DecodeConfig::default();
        let out = decode_mask(&mask, &g, &cfg).unwrap();
        prop_assert_eq!(out.len(), cfg.sample_count);
        let diag = 2.0 * g.half_cell_diagonal();
        for q in out.points() {
            prop_assert_eq!(q.z, 0.0);
            prop_assert!(lane.distance_to_point(q) <= diag, "{:?} off by {}", q, lane.distance_to_point(q));
        }
        let key = |q: &Point3<f64>| if label.is_longitudinal() { q.x } else { q.y };
        let increasing = matches!(label, DirectionLabel::Up | DirectionLabel::Left);
        for w in out.points().windows(2) {
            if increasing {
                prop_assert!(key(&w[1]) > key(&w[0]));
            } else {
                prop_assert!(key(&w[1]) < key(&w[0]));
            }
        }
    }

    #[test]
    fn decode_invariant_to_probability_scaling(
        (lane, _label) in arb_quadratic_lane(),
        k in 0.05..1.0f64,
        blur in 0.0..0.4f64,
    ) {
        let g = grid();
        let mut mask = rasterize_centerline(&lane, &g, 1.0).unwrap();
        // Soften the mask so the expectation actually weights cells.
        for r in 0..g.rows {
            for c in 0..g.cols {
                let v = mask.get(r, c);
                if v > 0.0 {
                    mask.set(r, c, v - blur * ((r * 7 + c * 3) % 5) as f64 / 5.0);
                }
            }
        }
        let cfg = DecodeConfig::default();
        let base = decode_mask(&mask, &g, &cfg).unwrap();
        let scaled = decode_mask(&mask.scaled(k), &g, &cfg.scaled(k)).unwrap();
        for (a, b) in base.points().iter().zip(scaled.points()) {
            prop_assert!(a.distance(b) < 1e-9);
        }
    }

    #[test]
    fn directional_fusion_respects_branch(dir in 0usize..4) {
        let label = DirectionLabel::ALL[dir];
        let mask_poly = pl(&[[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]]);
        let bez_poly = pl(&[[0.0, 5.0, 0.0], [10.0, 5.0, 0.0]]);
        let out = fuse_predictions(Ok(mask_poly.clone()), bez_poly.clone(), label, FusionPolicy::DirectionalFusion).unwrap();
        if label.is_lateral() {
            prop_assert_eq!(out, bez_poly);
        } else {
            prop_assert_eq!(out, mask_poly);
        }
    }
}
