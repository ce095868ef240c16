use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which horizontal axis is the independent variable of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// `dependent = a * t^2 + b * t + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFit<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub axis: Axis,
}

impl<T: Real> QuadraticFit<T> {
    #[inline]
    pub fn eval(&self, t: T) -> T {
        (self.a * t + self.b) * t + self.c
    }

    /// Sum of squared residuals over `samples`.
    pub fn residual(&self, samples: &[(T, T)]) -> T {
        samples
            .iter()
            .map(|&(t, u)| {
                let r = u - self.eval(t);
                r * r
            })
            .fold(T::zero(), |a, b| a + b)
    }
}

/// Least-squares quadratic through `(independent, dependent)` samples.
///
/// Falls back to a line when only two distinct independent values exist and
/// to a constant when only one does.
pub fn fit_quadratic<T: Real>(samples: &[(T, T)], axis: Axis) -> Result<QuadraticFit<T>> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples(samples.len()));
    }
    if samples.iter().any(|(t, u)| !t.is_finite() || !u.is_finite()) {
        return Err(Error::InvalidConfig("non-finite fit sample".into()));
    }
    let distinct = count_distinct(samples.iter().map(|s| s.0));
    let n = T::from_count(samples.len());
    let mean = samples.iter().map(|s| s.0).fold(T::zero(), |a, b| a + b) / n;
    let scale = samples.iter().map(|s| (s.0 - mean).abs()).fold(T::zero(), T::max);
    let scale = if scale > T::zero() { scale } else { T::one() };

    // Fit in the normalized variable tau = (t - mean) / scale, then expand.
    let degree = distinct.min(3) - 1;
    let size = degree + 1;
    let mut ata = [[T::zero(); 3]; 3];
    let mut atb = [T::zero(); 3];
    for &(t, u) in samples {
        let tau = (t - mean) / scale;
        let basis = [T::one(), tau, tau * tau];
        for r in 0..size {
            atb[r] = atb[r] + basis[r] * u;
            for c in 0..size {
                ata[r][c] = ata[r][c] + basis[r] * basis[c];
            }
        }
    }
    let coef = solve_small(&mut ata, &mut atb, size)
        .ok_or_else(|| Error::InvalidConfig("singular fit system".into()))?;
    let (gamma, beta, alpha) = (coef[0], coef[1], coef[2]);

    let s2 = scale * scale;
    let a = alpha / s2;
    let b = beta / scale - T::lit(2.0) * alpha * mean / s2;
    let c = alpha * mean * mean / s2 - beta * mean / scale + gamma;
    Ok(QuadraticFit { a, b, c, axis })
}

fn count_distinct<T: Real>(values: impl Iterator<Item = T>) -> usize {
    let mut v: Vec<T> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v.dedup();
    v.len()
}

/// Gaussian elimination with partial pivoting on the leading `size` block.
fn solve_small<T: Real>(m: &mut [[T; 3]; 3], rhs: &mut [T; 3], size: usize) -> Option<[T; 3]> {
    for col in 0..size {
        let pivot = (col..size).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[pivot][col].abs() <= T::epsilon() {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..size {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (a, &b) in m[row][col..size].iter_mut().zip(&pivot_row[col..size]) {
                *a = *a - f * b;
            }
            rhs[row] = rhs[row] - f * rhs[col];
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..size).rev() {
        let mut acc = rhs[row];
        for k in row + 1..size {
            acc = acc - m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}
