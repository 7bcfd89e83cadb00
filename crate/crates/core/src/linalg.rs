//! Small dense linear algebra for `m × m` matrices with `m ≤ 3` in practice.
//!
//! Matrices are row-major `&[f64]` slices of length `n * n`.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Cholesky factor `L` (row-major, lower triangular) of a symmetric matrix.
/// Returns `None` unless the matrix is positive definite.
pub fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for p in 0..j {
                s -= l[i * n + p] * l[j * n + p];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the Cholesky factor from [`cholesky`].
pub fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for p in 0..i {
            s -= l[i * n + p] * y[p];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for p in i + 1..n {
            s -= l[p * n + i] * x[p];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

/// Solves a general square system by Gaussian elimination with partial pivoting.
pub fn solve(a: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))?;
        if m[piv * n + c] == 0.0 {
            return None;
        }
        if piv != c {
            for j in 0..n {
                m.swap(piv * n + j, c * n + j);
            }
            x.swap(piv, c);
        }
        for r in c + 1..n {
            let f = m[r * n + c] / m[c * n + c];
            for j in c..n {
                m[r * n + j] -= f * m[c * n + j];
            }
            x[r] -= f * x[c];
        }
    }
    for c in (0..n).rev() {
        let mut s = x[c];
        for j in c + 1..n {
            s -= m[c * n + j] * x[j];
        }
        x[c] = s / m[c * n + c];
    }
    Some(x)
}

/// `(sign, ln|det A|)` by LU with partial pivoting; sign is 0 for singular input.
pub fn log_abs_det(a: &[f64], n: usize) -> (f64, f64) {
    let mut m = a.to_vec();
    let mut sign = 1.0;
    let mut log_det = 0.0;
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))
            .unwrap_or(c);
        let p = m[piv * n + c];
        if p == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if piv != c {
            for j in 0..n {
                m.swap(piv * n + j, c * n + j);
            }
            sign = -sign;
        }
        if p < 0.0 {
            sign = -sign;
        }
        log_det += p.abs().ln();
        for r in c + 1..n {
            let f = m[r * n + c] / p;
            for j in c..n {
                m[r * n + j] -= f * m[c * n + j];
            }
        }
    }
    (sign, log_det)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum();
        if off <= 1e-30 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(a: &[f64], n: usize) -> f64 {
    match n {
        1 => a[0],
        2 => {
            let (p, q, r) = (a[0], a[1], a[3]);
            let mean = 0.5 * (p + r);
            let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
            // stable form of mean - rad
            let det = p * r - q * q;
            if mean > 0.0 {
                det / (mean + rad)
            } else {
                mean - rad
            }
        }
        _ => symmetric_eigenvalues(a, n)[0],
    }
}

/// Least squares `min ‖X c − y‖` by Householder QR.
///
/// `design` holds `rows × cols` entries row-major. Returns the coefficients and
/// the residual norm; fails when a column is numerically dependent on the others.
pub fn least_squares(design: &[f64], rows: usize, cols: usize, y: &[f64]) -> Result<(Vec<f64>, f64)> {
    if rows < cols {
        return Err(Error::TooFewPoints { needed: cols, found: rows });
    }
    let mut a = design.to_vec();
    let mut b = y.to_vec();
    let col_norms: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| a[i * cols + j] * a[i * cols + j]).sum::<f64>().sqrt())
        .collect();
    for j in 0..cols {
        let s: f64 = (j..rows).map(|i| a[i * cols + j] * a[i * cols + j]).sum::<f64>().sqrt();
        if !(s > 1e-12 * col_norms[j].max(f64::MIN_POSITIVE)) {
            return Err(Error::RankDeficient);
        }
        let alpha = if a[j * cols + j] > 0.0 { -s } else { s };
        let mut v: Vec<f64> = (j..rows).map(|i| a[i * cols + j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for c in j..cols {
                let proj: f64 = (j..rows).map(|i| v[i - j] * a[i * cols + c]).sum::<f64>() * 2.0 / vnorm2;
                for i in j..rows {
                    a[i * cols + c] -= proj * v[i - j];
                }
            }
            let proj: f64 = (j..rows).map(|i| v[i - j] * b[i]).sum::<f64>() * 2.0 / vnorm2;
            for i in j..rows {
                b[i] -= proj * v[i - j];
            }
        }
    }
    let mut coef = vec![0.0; cols];
    for j in (0..cols).rev() {
        let mut s = b[j];
        for c in j + 1..cols {
            s -= a[j * cols + c] * coef[c];
        }
        coef[j] = s / a[j * cols + j];
    }
    let residual = b[cols..].iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((coef, residual))
}
