//! Small dense numerical helpers shared by the solvers.

use nalgebra::{DMatrix, DVector};

/// Least-squares polynomial fit; returns coefficients `c_0..=c_degree` of `Σ c_k x^k`.
///
/// Columns are scaled by the largest `|x|` before the QR solve to keep the
/// Vandermonde system well conditioned on short intervals near 0.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Option<Vec<f64>> {
    polyfit_powers(xs, ys, &(0..=degree as u32).collect::<Vec<_>>())
}

/// Least-squares fit of `Σ c_j x^{p_j}` for the given exponents.
pub fn polyfit_powers(xs: &[f64], ys: &[f64], powers: &[u32]) -> Option<Vec<f64>> {
    if xs.len() != ys.len() || xs.len() < powers.len() || powers.is_empty() {
        return None;
    }
    let scale = xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    let a = DMatrix::from_fn(xs.len(), powers.len(), |i, j| (xs[i] / scale).powi(powers[j] as i32));
    let b = DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= smax * 1e-13 {
        return None;
    }
    let sol = svd.solve(&b, 0.0).ok()?;
    Some(
        powers
            .iter()
            .enumerate()
            .map(|(j, &p)| sol[j] / scale.powi(p as i32))
            .collect(),
    )
}

/// Slope of the least-squares line through `(ln x, ln y)`; points with `y ≤ 0`
/// are ignored. Returns `None` with fewer than two usable points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Observed order from two errors at refinement ratio `ratio`.
pub fn observed_order(coarse: f64, fine: f64, ratio: f64) -> f64 {
    (coarse / fine).ln() / ratio.ln()
}

/// Thomas algorithm for a tridiagonal system. `lower[i]` couples row `i+1` to
/// column `i`, `upper[i]` couples row `i` to column `i+1`. Returns `None` on a
/// zero pivot.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    if n == 0 || lower.len() + 1 != n || upper.len() + 1 != n || rhs.len() != n {
        return None;
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return None;
    }
    if n > 1 {
        c[0] = upper[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i - 1] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return None;
        }
        if i < n - 1 {
            c[i] = upper[i] / pivot;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / pivot;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Some(x)
}

/// Trapezoidal rule on a uniform grid.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}
