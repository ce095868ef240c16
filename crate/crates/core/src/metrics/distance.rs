use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::scalar::Real;

/// Which polyline distance drives lane matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaneDistance {
    Frechet,
    Chamfer,
}

impl LaneDistance {
    pub fn eval<T: Real>(self, a: &[Point3<T>], b: &[Point3<T>]) -> Result<T> {
        match self {
            Self::Frechet => discrete_frechet(a, b),
            Self::Chamfer => chamfer(a, b),
        }
    }
}

fn check_non_empty<T>(a: &[Point3<T>], b: &[Point3<T>]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidPolyline("empty point sequence".into()));
    }
    Ok(())
}

/// Discrete Frechet distance over the monotone coupling lattice.
pub fn discrete_frechet<T: Real>(a: &[Point3<T>], b: &[Point3<T>]) -> Result<T> {
    check_non_empty(a, b)?;
    let m = b.len();
    let mut prev = vec![T::zero(); m];
    let mut cur = vec![T::zero(); m];
    for (i, pa) in a.iter().enumerate() {
        for (j, pb) in b.iter().enumerate() {
            let d = pa.distance(pb);
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1].max(d),
                (_, 0) => prev[0].max(d),
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]).max(d),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m - 1])
}

/// Symmetric mean nearest-neighbour distance between two point sets.
///
/// Nearest-neighbour distances are summed in sorted order, so the result is
/// bit-identical under any reordering of either input.
pub fn chamfer<T: Real>(a: &[Point3<T>], b: &[Point3<T>]) -> Result<T> {
    check_non_empty(a, b)?;
    let directed = |from: &[Point3<T>], to: &[Point3<T>]| {
        let mut nn: Vec<T> = from
            .iter()
            .map(|p| to.iter().map(|q| p.distance(q)).fold(T::infinity(), T::min))
            .collect();
        nn.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        nn.into_iter().fold(T::zero(), |acc, d| acc + d) / T::from_count(from.len())
    };
    Ok((directed(a, b) + directed(b, a)) / T::lit(2.0))
}
