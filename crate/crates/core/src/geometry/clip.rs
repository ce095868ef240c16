use crate::geometry::{Point3, Polyline, Roi};
use crate::scalar::Real;

/// Splits `p` into the maximal runs lying inside `roi`.
///
/// Segments crossing the boundary are cut at the exact rectangle
/// intersection; `z` is interpolated linearly. Vertices already inside are
/// kept bit-for-bit.
pub fn clip_to_roi<T: Real>(p: &Polyline<T>, roi: &Roi<T>) -> Vec<Polyline<T>> {
    let pts = p.points();
    let mut pieces = Vec::new();
    let mut run: Vec<Point3<T>> = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        match clip_segment(&a, &b, roi) {
            None => flush(&mut run, &mut pieces),
            Some((t0, t1)) => {
                let entry = if t0 <= T::zero() { a } else { a.lerp(&b, t0) };
                let exit = if t1 >= T::one() { b } else { a.lerp(&b, t1) };
                if t0 > T::zero() {
                    flush(&mut run, &mut pieces);
                }
                if run.is_empty() {
                    run.push(entry);
                }
                run.push(exit);
                if t1 < T::one() {
                    flush(&mut run, &mut pieces);
                }
            }
        }
    }
    flush(&mut run, &mut pieces);
    pieces
}

/// Longest piece of [`clip_to_roi`], if any.
pub fn clip_to_roi_longest<T: Real>(p: &Polyline<T>, roi: &Roi<T>) -> Option<Polyline<T>> {
    clip_to_roi(p, roi)
        .into_iter()
        .fold(None, |best, piece| match best {
            Some(b) if Polyline::length(&b) >= piece.length() => Some(b),
            _ => Some(piece),
        })
}

fn flush<T: Real>(run: &mut Vec<Point3<T>>, pieces: &mut Vec<Polyline<T>>) {
    if run.is_empty() {
        return;
    }
    let pts = std::mem::take(run);
    if let Ok(pl) = Polyline::from_points_dedup(pts) {
        pieces.push(pl);
    }
}

/// Liang-Barsky parametric clip of segment `a -> b` against the rectangle.
fn clip_segment<T: Real>(a: &Point3<T>, b: &Point3<T>, roi: &Roi<T>) -> Option<(T, T)> {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let mut t0 = T::zero();
    let mut t1 = T::one();
    let checks = [
        (-dx, a.x - roi.x_min),
        (dx, roi.x_max - a.x),
        (-dy, a.y - roi.y_min),
        (dy, roi.y_max - a.y),
    ];
    for (p, q) in checks {
        if p == T::zero() {
            if q < T::zero() {
                return None;
            }
        } else {
            let r = q / p;
            if p < T::zero() {
                if r > t1 {
                    return None;
                }
                t0 = t0.max(r);
            } else {
                if r < t0 {
                    return None;
                }
                t1 = t1.min(r);
            }
        }
    }
    Some((t0, t1))
}
