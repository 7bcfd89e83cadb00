//! Not-a-knot cubic splines on uniform grids, in one and two variables.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::{Error, Result};

/// Cubic spline through `(x0 + i·h, y_i)` with not-a-knot end conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
}

impl UniformSpline {
    pub fn new(x0: f64, h: f64, y: Vec<f64>) -> Result<Self> {
        if y.len() < 4 {
            return Err(Error::TooFewPoints { needed: 4, found: y.len() });
        }
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(alloc::string::String::from("spline step must be positive")));
        }
        let m = second_derivatives(&y, h);
        Ok(UniformSpline { x0, h, y, m })
    }

    pub fn nodes(&self) -> usize {
        self.y.len()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.h * (self.y.len() - 1) as f64)
    }

    /// Evaluates the spline; outside the grid the end cubics are extended.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let t = (x - self.x0) / self.h;
        let i = (t.floor() as isize).clamp(0, n as isize - 2) as usize;
        let s = t - i as f64;
        let a = 1.0 - s;
        let h2 = self.h * self.h / 6.0;
        a * self.y[i] + s * self.y[i + 1] + h2 * ((a * a * a - a) * self.m[i] + (s * s * s - s) * self.m[i + 1])
    }
}

/// Second derivatives of the not-a-knot spline on a uniform grid.
///
/// Interior rows are `M_{i-1} + 4M_i + M_{i+1} = 6Δ²y_i/h²`; continuity of the
/// third derivative at the second and penultimate nodes gives
/// `M_0 = 2M_1 − M_2` and its mirror, which turn the end rows into `6M_1 = r_1`.
fn second_derivatives(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let rhs: Vec<f64> = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.0 } else { 6.0 * (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (h * h) })
        .collect();
    let mut m = vec![0.0; n];
    if n == 4 {
        // the single cubic through all four points
        m[1] = rhs[1] / 6.0;
        m[2] = rhs[2] / 6.0;
    } else {
        // tridiagonal system for M_1..M_{n-2}
        let k = n - 2;
        let diag = |i: usize| if i == 0 || i == k - 1 { 6.0 } else { 4.0 };
        let lower = |i: usize| if i == k - 1 { 0.0 } else { 1.0 };
        let upper = |i: usize| if i == 0 { 0.0 } else { 1.0 };
        let mut c = vec![0.0; k];
        let mut d = vec![0.0; k];
        c[0] = upper(0) / diag(0);
        d[0] = rhs[1] / diag(0);
        for i in 1..k {
            let denom = diag(i) - lower(i) * c[i - 1];
            c[i] = upper(i) / denom;
            d[i] = (rhs[i + 1] - lower(i) * d[i - 1]) / denom;
        }
        m[k] = d[k - 1];
        for i in (1..k).rev() {
            m[i] = d[i - 1] - c[i - 1] * m[i + 1];
        }
    }
    m[0] = 2.0 * m[1] - m[2];
    m[n - 1] = 2.0 * m[n - 2] - m[n - 3];
    m
}

/// Tensor-product spline on a uniform 2-d grid. Row splines along the second
/// axis are built once; the column spline along the first axis is formed per query.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSpline2 {
    x0: f64,
    h: f64,
    rows: Vec<UniformSpline>,
}

impl UniformSpline2 {
    /// `values[i][j]` is the sample at `(x0 + i·hx, y0 + j·hy)`.
    pub fn new(x0: f64, hx: f64, y0: f64, hy: f64, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() < 4 {
            return Err(Error::TooFewPoints { needed: 4, found: values.len() });
        }
        let rows = values.into_iter().map(|row| UniformSpline::new(y0, hy, row)).collect::<Result<Vec<_>>>()?;
        Ok(UniformSpline2 { x0, h: hx, rows })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let column: Vec<f64> = self.rows.iter().map(|r| r.eval(y)).collect();
        // the column spline always has at least four nodes
        UniformSpline::new(self.x0, self.h, column).map_or(f64::NAN, |s| s.eval(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x;
        for n in [4, 5, 9] {
            let s = UniformSpline::new(-1.0, 0.5, (0..n).map(|i| f(-1.0 + 0.5 * i as f64)).collect()).unwrap();
            for x in [-1.0, -0.8, 0.1, 0.77, 1.0] {
                assert!((s.eval(x) - f(x)).abs() < 1e-12, "n = {n}, x = {x}");
            }
        }
    }

    #[test]
    fn interpolates_smooth_functions() {
        let h = 0.05;
        let s = UniformSpline::new(0.0, h, (0..=40).map(|i| (i as f64 * h).sin()).collect()).unwrap();
        for i in 0..40 {
            let x = (i as f64 + 0.5) * h;
            assert!((s.eval(x) - x.sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn tensor_spline_reproduces_bicubics() {
        let f = |x: f64, y: f64| x * x * y - y * y * y + 2.0 * x;
        let values = (0..6).map(|i| (0..5).map(|j| f(i as f64 * 0.3, -1.0 + j as f64 * 0.4)).collect()).collect();
        let s = UniformSpline2::new(0.0, 0.3, -1.0, 0.4, values).unwrap();
        assert!((s.eval(0.71, 0.13) - f(0.71, 0.13)).abs() < 1e-12);
    }
}
