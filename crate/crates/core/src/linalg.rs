//! Small dense least-squares helpers shared by the estimators.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Condition estimate above which a 2×2 normal system counts as singular.
pub(crate) const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Solve2 {
    pub x: [f64; 2],
    pub condition: f64,
}

/// Ratio of the eigenvalues of a symmetric positive semi-definite 2×2 matrix.
pub(crate) fn condition_sym2(m: [[f64; 2]; 2]) -> f64 {
    let (a, b, d) = (m[0][0], m[0][1], m[1][1]);
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    let lmax = 0.5 * (tr + disc);
    if !(lmax > 0.0) {
        return f64::INFINITY;
    }
    let lmin = (a * d - b * b) / lmax;
    if lmin <= 0.0 {
        f64::INFINITY
    } else {
        lmax / lmin
    }
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
pub(crate) fn solve_sym2(m: [[f64; 2]; 2], rhs: [f64; 2]) -> Solve2 {
    let condition = condition_sym2(m);
    let (mut r0, mut r1) = ([m[0][0], m[0][1], rhs[0]], [m[1][0], m[1][1], rhs[1]]);
    if r1[0].abs() > r0[0].abs() {
        std::mem::swap(&mut r0, &mut r1);
    }
    if r0[0] == 0.0 {
        return Solve2 {
            x: [f64::NAN; 2],
            condition: f64::INFINITY,
        };
    }
    let f = r1[0] / r0[0];
    let u11 = r1[1] - f * r0[1];
    let c1 = r1[2] - f * r0[2];
    let x1 = c1 / u11;
    let x0 = (r0[2] - r0[1] * x1) / r0[0];
    Solve2 {
        x: [x0, x1],
        condition,
    }
}

/// Least squares by SVD. `design` is row-major `rows × cols`. Returns the
/// coefficients and the residual sum of squares, or `None` when the design
/// is rank deficient.
pub(crate) fn lstsq(design: &[f64], rows: usize, cols: usize, y: &[f64]) -> Option<(Vec<f64>, f64)> {
    if rows < cols || cols == 0 {
        return None;
    }
    let x = DMatrix::from_row_slice(rows, cols, design);
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= smax * 1e-10 {
        return None;
    }
    let yv = DVector::from_column_slice(y);
    let beta = svd.solve(&yv, 0.0).ok()?;
    let resid = &yv - &x * &beta;
    Some((beta.iter().copied().collect(), resid.norm_squared()))
}

/// Least squares through the Cholesky factor of the normal equations.
/// Cheaper than [`lstsq`] and accurate enough for well-scaled designs;
/// `None` when the Gram matrix is not numerically positive definite.
pub(crate) fn lstsq_normal(design: &[f64], rows: usize, cols: usize, y: &[f64]) -> Option<(Vec<f64>, f64)> {
    if rows < cols || cols == 0 {
        return None;
    }
    let x = DMatrix::from_row_slice(rows, cols, design);
    let gram = x.transpose() * &x;
    let diag_max = gram.diagonal().max();
    let chol = gram.cholesky()?;
    let l = chol.l();
    let dmin = l.diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v * v));
    if !(dmin > diag_max * 1e-12) {
        return None;
    }
    let yv = DVector::from_column_slice(y);
    let beta = chol.solve(&(x.transpose() * &yv));
    let resid = &yv - &x * &beta;
    Some((beta.iter().copied().collect(), resid.norm_squared()))
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population standard deviation (divides by n).
pub(crate) fn population_std(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
}

/// Ordinary least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// `None` when `y` has no variance.
    pub r_squared: Option<f64>,
}

/// `None` when `x` has no variance or fewer than two points.
pub(crate) fn ols_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    debug_assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = (syy > 0.0).then(|| (sxy * sxy / (sxx * syy)).min(1.0));
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}
