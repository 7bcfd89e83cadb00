//! Weighted Bergman kernels on ℂ^m for weights `e^{−λφ(x)}` with `z = x + iy`
//! and `φ` convex in `x` alone, with `C_lo·I ≤ Hess φ ≤ C_hi·I`.
//!
//! The functions `e^{⟨α, x/2 + iy⟩}` (`α ∈ ℝ^m`) play the role of monomials, with
//! norms `Q_λ(α) = ∫ exp(⟨α,x⟩ − λφ(x)) dx`, and
//!
//! ```text
//! B_λ(z, w) = ∫ exp(⟨α, (x+x')/2⟩ + i⟨α, y−y'⟩) / Q_λ(α) dα
//! ```
//!
//! `ln Q_λ` is tabulated on a uniform α-grid and interpolated by cubic splines
//! inside the α-integral; the grid is refined until the interpolation error
//! measured at cell midpoints is below tolerance. Potentials that are sums of
//! one-variable functions use one table per axis.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use num_traits::Float;

use crate::kernel::LogComplex;
use crate::linalg::{cholesky, cholesky_solve, min_eigenvalue, norm_inf, symmetric_eigenvalues};
use crate::potential::{grid, BumpPerturbation};
use crate::quadrature::{integrate_log_peak, integrate_log_peak_complex, PeakOptions};
use crate::spline::{UniformSpline, UniformSpline2};
use crate::{Error, Result};

pub trait ChristPotential: Debug + Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn hessian(&self, x: &[f64]) -> Vec<f64>;
    /// For `φ(x) = Σ_j φ_j(x_j)`: the one-variable factor of axis `j`.
    fn axis_factor(&self, _axis: usize) -> Option<Box<dyn ChristPotential>> {
        None
    }
}

/// `φ(x) = |x|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadratic {
    pub dim: usize,
}

impl ChristPotential for Quadratic {
    fn name(&self) -> String {
        format!("quadratic({})", self.dim)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| 2.0 * v).collect()
    }
    fn hessian(&self, _x: &[f64]) -> Vec<f64> {
        let m = self.dim;
        let mut h = vec![0.0; m * m];
        (0..m).for_each(|j| h[j * m + j] = 2.0);
        h
    }
    fn axis_factor(&self, _axis: usize) -> Option<Box<dyn ChristPotential>> {
        Some(Box::new(Quadratic { dim: 1 }))
    }
}

/// `φ(x) = Σ cosh x_j`; convex, not quadratic, Hessian bounded on bounded boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoshPotential {
    pub dim: usize,
}

impl ChristPotential for CoshPotential {
    fn name(&self) -> String {
        format!("cosh({})", self.dim)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v.cosh()).sum()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| v.sinh()).collect()
    }
    fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let m = self.dim;
        let mut h = vec![0.0; m * m];
        (0..m).for_each(|j| h[j * m + j] = x[j].cosh());
        h
    }
    fn axis_factor(&self, _axis: usize) -> Option<Box<dyn ChristPotential>> {
        Some(Box::new(CoshPotential { dim: 1 }))
    }
}

/// `φ(x) = |x|² + ψ(x)` with a bump `ψ`: smooth, not real analytic.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpQuadratic {
    pub bump: BumpPerturbation,
}

impl ChristPotential for BumpQuadratic {
    fn name(&self) -> String {
        format!(
            "bump_quadratic({}; center={:?}, radius={}, amplitude={})",
            self.bump.center.len(),
            self.bump.center,
            self.bump.radius,
            self.bump.amplitude
        )
    }
    fn dim(&self) -> usize {
        self.bump.center.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>() + self.bump.value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let b = self.bump.gradient(x);
        x.iter().zip(b).map(|(v, d)| 2.0 * v + d).collect()
    }
    fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let mut h = self.bump.hessian(x);
        (0..m).for_each(|j| h[j * m + j] += 2.0);
        h
    }
}

/// A point `z = x + iy` of ℂ^m.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChristPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ChristPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        ChristPoint { x, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HessianBounds {
    pub c_lo: f64,
    pub c_hi: f64,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
}

/// Extreme Hessian eigenvalues over a grid on `[lo, hi]`; fails unless `C_lo > 0`.
pub fn certify_bounds(p: &dyn ChristPotential, lo: &[f64], hi: &[f64], per_axis: usize) -> Result<HessianBounds> {
    let m = p.dim();
    let mut c_lo = f64::INFINITY;
    let mut c_hi: f64 = 0.0;
    let mut at = vec![0.0; m];
    for x in grid(lo, hi, per_axis) {
        let ev = symmetric_eigenvalues(&p.hessian(&x), m);
        if ev[0] < c_lo {
            c_lo = ev[0];
            at = x.clone();
        }
        c_hi = c_hi.max(ev[m - 1]);
    }
    if !(c_lo > 0.0) || !c_hi.is_finite() {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: c_lo, at, ratio: f64::NAN });
    }
    Ok(HessianBounds { c_lo, c_hi, box_lo: lo.to_vec(), box_hi: hi.to_vec() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristOptions {
    pub rel_tol: f64,
    /// Absolute tolerance on interpolated `ln Q_λ`.
    pub interp_tol: f64,
    /// Half-width of the α-box in units of the α-integrand's standard deviation.
    pub alpha_sd: f64,
    pub min_nodes: usize,
    pub max_nodes_1d: usize,
    pub max_nodes_2d: usize,
}

impl Default for ChristOptions {
    fn default() -> Self {
        ChristOptions {
            rel_tol: 1e-10,
            interp_tol: 1e-11,
            alpha_sd: 10.0,
            min_nodes: 33,
            max_nodes_1d: 4097,
            max_nodes_2d: 65,
        }
    }
}

/// `ln Q_λ(α)` with its relative error, by peak-centred quadrature around the
/// solution of `λ∇φ(x) = α`.
pub fn log_q_lambda(p: &dyn ChristPotential, lambda: f64, alpha: &[f64], rel_tol: f64) -> Result<(f64, f64)> {
    let m = p.dim();
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("λ must be positive, got {lambda}")));
    }
    if alpha.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: alpha.len() });
    }
    let center = peak_x(p, lambda, alpha)?;
    let h = p.hessian(&center);
    let half: Vec<f64> = (0..m).map(|j| 7.0 / (lambda * h[j * m + j]).sqrt()).collect();
    let log_f = |x: &[f64]| alpha.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - lambda * p.value(x);
    let opts = PeakOptions { rel_tol, ..PeakOptions::default() };
    let r = integrate_log_peak(log_f, &center, &half, None, &opts)?;
    Ok((r.log_value, r.rel_error))
}

/// Damped Newton for `λ∇φ(x) = α` on the strongly convex `λφ(x) − ⟨α, x⟩`.
fn peak_x(p: &dyn ChristPotential, lambda: f64, alpha: &[f64]) -> Result<Vec<f64>> {
    let m = p.dim();
    let f = |x: &[f64]| lambda * p.value(x) - alpha.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
    let mut x = vec![0.0; m];
    let mut fx = f(&x);
    let mut residual = f64::INFINITY;
    for _ in 0..200 {
        let g: Vec<f64> = p.gradient(&x).iter().zip(alpha).map(|(d, a)| lambda * d - a).collect();
        residual = norm_inf(&g);
        if residual <= 1e-12 * (1.0 + norm_inf(alpha)) {
            return Ok(x);
        }
        let h: Vec<f64> = p.hessian(&x).iter().map(|v| v * lambda).collect();
        let l = cholesky(&h, m).ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: min_eigenvalue(&h, m),
            at: x.clone(),
            ratio: f64::NAN,
        })?;
        let step = cholesky_solve(&l, m, &g);
        let len = norm_inf(&step);
        let scale = 1.0 + norm_inf(&x);
        if len <= 1e-6 * scale {
            // quadratic regime; function values no longer resolve the decrease
            x.iter_mut().zip(&step).for_each(|(a, s)| *a -= s);
            fx = f(&x);
            if len <= 1e-14 * scale {
                return Ok(x);
            }
            continue;
        }
        let mut t = if len > 2.0 { 2.0 / len } else { 1.0 };
        let mut moved = false;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            let ft = f(&trial);
            if ft < fx {
                x = trial;
                fx = ft;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Err(Error::NoConvergence { what: "peak of the norm integrand", iterations: 200, residual })
}

#[derive(Debug, Clone)]
enum LogQTable {
    /// One spline per axis; `ln Q = Σ_j ln Q_j(α_j)`.
    Separable(Vec<UniformSpline>),
    Dense1(UniformSpline),
    Dense2(UniformSpline2),
}

/// `B_λ` evaluator over a fixed α-box.
#[derive(Debug)]
pub struct ChristKernel<'a> {
    potential: &'a dyn ChristPotential,
    lambda: f64,
    table: LogQTable,
    alpha_lo: Vec<f64>,
    alpha_hi: Vec<f64>,
    /// Largest observed interpolation error in `ln Q_λ`, plus the norms' own error.
    pub interpolation_error: f64,
    pub bounds: HessianBounds,
    opts: ChristOptions,
}

impl<'a> ChristKernel<'a> {
    /// Prepares the `ln Q_λ` interpolant on an α-box covering every pair that can
    /// be formed from `points`.
    pub fn new(p: &'a dyn ChristPotential, lambda: f64, points: &[ChristPoint], opts: &ChristOptions) -> Result<Self> {
        let m = p.dim();
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("λ must be positive, got {lambda}")));
        }
        if points.is_empty() {
            return Err(Error::InvalidArgument(String::from("no evaluation points")));
        }
        if let Some(bad) = points.iter().find(|q| q.x.len() != m || q.y.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, found: bad.x.len().min(bad.y.len()) });
        }
        let x_lo: Vec<f64> = (0..m).map(|j| points.iter().map(|q| q.x[j]).fold(f64::INFINITY, f64::min)).collect();
        let x_hi: Vec<f64> = (0..m).map(|j| points.iter().map(|q| q.x[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
        // α-peaks λ∇φ(u) for u in the x-hull, widened by the α-integrand's spread √(λ C_hi)
        let (wide_lo, wide_hi) = inflate(&x_lo, &x_hi, 0.5, 0.5);
        let pre = certify_bounds(p, &wide_lo, &wide_hi, 9)?;
        let mut alpha_lo = vec![f64::INFINITY; m];
        let mut alpha_hi = vec![f64::NEG_INFINITY; m];
        for u in grid(&x_lo, &x_hi, 9) {
            let g = p.gradient(&u);
            for j in 0..m {
                alpha_lo[j] = alpha_lo[j].min(lambda * g[j]);
                alpha_hi[j] = alpha_hi[j].max(lambda * g[j]);
            }
        }
        let spread = opts.alpha_sd * (lambda * pre.c_hi).sqrt();
        alpha_lo.iter_mut().for_each(|a| *a -= spread);
        alpha_hi.iter_mut().for_each(|a| *a += spread);

        // certify on the x-excursion of the α-box, inflated by half
        let mut ex_lo = vec![f64::INFINITY; m];
        let mut ex_hi = vec![f64::NEG_INFINITY; m];
        for a in grid(&alpha_lo, &alpha_hi, 5) {
            let x = peak_x(p, lambda, &a)?;
            for j in 0..m {
                ex_lo[j] = ex_lo[j].min(x[j]);
                ex_hi[j] = ex_hi[j].max(x[j]);
            }
        }
        let (ex_lo, ex_hi) = inflate(&ex_lo, &ex_hi, 0.5, 0.0);
        let bounds = certify_bounds(p, &ex_lo, &ex_hi, 17)?;

        let (table, err) = if let Some(factors) = (0..m).map(|j| p.axis_factor(j)).collect::<Option<Vec<_>>>() {
            let mut splines = Vec::with_capacity(m);
            let mut err = 0.0;
            for (j, f) in factors.iter().enumerate() {
                let (s, e) = table_1d(f.as_ref(), lambda, alpha_lo[j], alpha_hi[j], opts)?;
                splines.push(s);
                err += e;
            }
            (LogQTable::Separable(splines), err)
        } else if m == 1 {
            let (s, e) = table_1d(p, lambda, alpha_lo[0], alpha_hi[0], opts)?;
            (LogQTable::Dense1(s), e)
        } else if m == 2 {
            let (s, e) = table_2d(p, lambda, &alpha_lo, &alpha_hi, opts)?;
            (LogQTable::Dense2(s), e)
        } else {
            return Err(Error::UnsupportedMethod("non-separable potentials in more than two variables"));
        };
        Ok(ChristKernel {
            potential: p,
            lambda,
            table,
            alpha_lo,
            alpha_hi,
            interpolation_error: err + opts.rel_tol,
            bounds,
            opts: *opts,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn potential(&self) -> &dyn ChristPotential {
        self.potential
    }

    pub fn alpha_box(&self) -> (&[f64], &[f64]) {
        (&self.alpha_lo, &self.alpha_hi)
    }

    /// Interpolated `ln Q_λ(α)`.
    pub fn log_q(&self, alpha: &[f64]) -> f64 {
        match &self.table {
            LogQTable::Separable(s) => s.iter().zip(alpha).map(|(sp, &a)| sp.eval(a)).sum(),
            LogQTable::Dense1(s) => s.eval(alpha[0]),
            LogQTable::Dense2(s) => s.eval(alpha[0], alpha[1]),
        }
    }

    /// `B_λ(z, w)` as a log-complex value, with its relative error estimate.
    pub fn bergman(&self, z: &ChristPoint, w: &ChristPoint) -> Result<(LogComplex, f64)> {
        let m = self.potential.dim();
        let u: Vec<f64> = (0..m).map(|j| 0.5 * (z.x[j] + w.x[j])).collect();
        let v: Vec<f64> = (0..m).map(|j| z.y[j] - w.y[j]).collect();
        self.alpha_integral(&u, &v)
    }

    /// `∫ exp(⟨α,u⟩ − ln Q_λ(α) + i⟨α,v⟩) dα` over the α-box.
    pub fn alpha_integral(&self, u: &[f64], v: &[f64]) -> Result<(LogComplex, f64)> {
        let m = self.potential.dim();
        let g = self.potential.gradient(u);
        let center: Vec<f64> = g.iter().map(|d| self.lambda * d).collect();
        if (0..m).any(|j| !(center[j] > self.alpha_lo[j] && center[j] < self.alpha_hi[j])) {
            return Err(Error::InvalidArgument(format!("point {u:?} lies outside the prepared α-box")));
        }
        let h = self.potential.hessian(u);
        let half: Vec<f64> = (0..m).map(|j| 3.0 * (self.lambda * h[j * m + j]).sqrt()).collect();
        let log_f = |a: &[f64]| a.iter().zip(u).map(|(x, y)| x * y).sum::<f64>() - self.log_q(a);
        let opts = PeakOptions { rel_tol: self.opts.rel_tol, ..PeakOptions::default() };
        let limits = Some((self.alpha_lo.as_slice(), self.alpha_hi.as_slice()));
        let r = if v.iter().all(|&t| t == 0.0) {
            integrate_log_peak(log_f, &center, &half, limits, &opts)?
        } else {
            let phase = |a: &[f64]| a.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
            integrate_log_peak_complex(log_f, phase, &center, &half, limits, &opts)?
        };
        Ok((LogComplex::new(r.log_value, r.phase), r.rel_error + self.interpolation_error))
    }

    /// `ln B_λ(z, z)`, a function of `x` only.
    pub fn log_diag(&self, x: &[f64]) -> Result<f64> {
        Ok(self.alpha_integral(x, &vec![0.0; x.len()])?.0.log_mag)
    }
}

fn inflate(lo: &[f64], hi: &[f64], fraction: f64, min_pad: f64) -> (Vec<f64>, Vec<f64>) {
    lo.iter()
        .zip(hi)
        .map(|(&a, &b)| {
            let pad = (0.5 * fraction * (b - a)).max(min_pad);
            (a - pad, b + pad)
        })
        .unzip()
}

fn table_1d(p: &dyn ChristPotential, lambda: f64, lo: f64, hi: f64, opts: &ChristOptions) -> Result<(UniformSpline, f64)> {
    let mut n = opts.min_nodes.max(4);
    let mut values: Vec<f64> = (0..n)
        .map(|i| log_q_lambda(p, lambda, &[lo + (hi - lo) * i as f64 / (n - 1) as f64], opts.rel_tol).map(|r| r.0))
        .collect::<Result<_>>()?;
    loop {
        let h = (hi - lo) / (n - 1) as f64;
        let spline = UniformSpline::new(lo, h, values.clone())?;
        let mids: Vec<f64> = (0..n - 1)
            .map(|i| log_q_lambda(p, lambda, &[lo + h * (i as f64 + 0.5)], opts.rel_tol).map(|r| r.0))
            .collect::<Result<_>>()?;
        let err = mids
            .iter()
            .enumerate()
            .map(|(i, &q)| (spline.eval(lo + h * (i as f64 + 0.5)) - q).abs())
            .fold(0.0, f64::max);
        if err <= opts.interp_tol || 2 * n - 1 > opts.max_nodes_1d {
            return Ok((spline, err));
        }
        let mut refined = Vec::with_capacity(2 * n - 1);
        for i in 0..n {
            refined.push(values[i]);
            if i + 1 < n {
                refined.push(mids[i]);
            }
        }
        values = refined;
        n = 2 * n - 1;
    }
}

fn table_2d(p: &dyn ChristPotential, lambda: f64, lo: &[f64], hi: &[f64], opts: &ChristOptions) -> Result<(UniformSpline2, f64)> {
    let eval = |a0: f64, a1: f64| log_q_lambda(p, lambda, &[a0, a1], opts.rel_tol).map(|r| r.0);
    let mut n = opts.min_nodes.max(4);
    let at = |j: usize, i: usize, n: usize| lo[j] + (hi[j] - lo[j]) * i as f64 / (n - 1) as f64;
    let mut values: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| eval(at(0, i, n), at(1, j, n))).collect::<Result<_>>()).collect::<Result<_>>()?;
    loop {
        let (h0, h1) = ((hi[0] - lo[0]) / (n - 1) as f64, (hi[1] - lo[1]) / (n - 1) as f64);
        let spline = UniformSpline2::new(lo[0], h0, lo[1], h1, values.clone())?;
        let fine = 2 * n - 1;
        let mut refined = vec![vec![0.0; fine]; fine];
        let mut err: f64 = 0.0;
        for i in 0..fine {
            for j in 0..fine {
                if i % 2 == 0 && j % 2 == 0 {
                    refined[i][j] = values[i / 2][j / 2];
                    continue;
                }
                let (a0, a1) = (at(0, i, fine), at(1, j, fine));
                let q = eval(a0, a1)?;
                err = err.max((spline.eval(a0, a1) - q).abs());
                refined[i][j] = q;
            }
        }
        if err <= opts.interp_tol || fine > opts.max_nodes_2d {
            return Ok((spline, err));
        }
        values = refined;
        n = fine;
    }
}

/// `P_λ(z, w) = |B_λ(z,w)| / √(B_λ(z,z) B_λ(w,w))`.
pub fn berezin_lambda(kernel: &ChristKernel<'_>, z: &ChristPoint, w: &ChristPoint) -> Result<f64> {
    Ok(log_berezin_lambda(kernel, z, w)?.exp())
}

pub fn log_berezin_lambda(kernel: &ChristKernel<'_>, z: &ChristPoint, w: &ChristPoint) -> Result<f64> {
    let (b, _) = kernel.bergman(z, w)?;
    if b.is_zero() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(b.log_mag - 0.5 * kernel.log_diag(&z.x)? - 0.5 * kernel.log_diag(&w.x)?)
}

/// The midpoint chain on a shared `y`: residual of
/// `ln Π(z,w) = ln Π(mid,mid) + λφ(mid) − λφ(x)/2 − λφ(x')/2`, and the convexity
/// deficit `φ(x)/2 + φ(x')/2 − φ(mid)` that sets the speed-λ decay.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MidpointFactorization {
    pub residual: f64,
    pub deficit: f64,
}

pub fn midpoint_factorization_check(kernel: &ChristKernel<'_>, x: &[f64], x2: &[f64], y: &[f64]) -> Result<MidpointFactorization> {
    let p = kernel.potential();
    let lambda = kernel.lambda();
    let mid: Vec<f64> = x.iter().zip(x2).map(|(a, b)| 0.5 * (a + b)).collect();
    let z = ChristPoint::new(x.to_vec(), y.to_vec());
    let w = ChristPoint::new(x2.to_vec(), y.to_vec());
    let (b, _) = kernel.bergman(&z, &w)?;
    let log_pi = b.log_mag - 0.5 * lambda * p.value(x) - 0.5 * lambda * p.value(x2);
    let log_pi_mid = kernel.log_diag(&mid)? - lambda * p.value(&mid);
    let predicted = log_pi_mid + lambda * p.value(&mid) - 0.5 * lambda * p.value(x) - 0.5 * lambda * p.value(x2);
    let deficit = if x == x2 { 0.0 } else { 0.5 * p.value(x) + 0.5 * p.value(x2) - p.value(&mid) };
    Ok(MidpointFactorization { residual: (log_pi - predicted).abs(), deficit })
}

/// `(Δy, P_λ((x, 0), (x, Δy·e₁)))` along the first `y` axis.
pub fn y_slice_profile(kernel: &ChristKernel<'_>, x: &[f64], dys: &[f64]) -> Result<Vec<(f64, f64)>> {
    let m = x.len();
    let z = ChristPoint::new(x.to_vec(), vec![0.0; m]);
    dys.iter()
        .map(|&dy| {
            let mut y = vec![0.0; m];
            y[0] = dy;
            let w = ChristPoint::new(x.to_vec(), y);
            berezin_lambda(kernel, &z, &w).map(|p| (dy, p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn gaussian_norms() {
        let q = Quadratic { dim: 1 };
        let (l, e) = log_q_lambda(&q, 1.0, &[0.0], 1e-10).unwrap();
        assert!((l - 0.5 * PI.ln()).abs() < 1e-10);
        assert!(e <= 1e-10);
        let (l, _) = log_q_lambda(&q, 3.0, &[2.5], 1e-10).unwrap();
        assert!((l - (0.5 * (PI / 3.0).ln() + 2.5 * 2.5 / 12.0)).abs() < 1e-10);
        let c = CoshPotential { dim: 1 };
        let (a, _) = log_q_lambda(&c, 2.0, &[1.3], 1e-10).unwrap();
        let (b, _) = log_q_lambda(&c, 2.0, &[-1.3], 1e-10).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn gaussian_berezin_example() {
        let q = Quadratic { dim: 1 };
        let z = ChristPoint::new(vec![0.0], vec![0.0]);
        let w = ChristPoint::new(vec![1.0], vec![0.0]);
        let k = ChristKernel::new(&q, 4.0, &[z.clone(), w.clone()], &ChristOptions::default()).unwrap();
        let p = berezin_lambda(&k, &z, &w).unwrap();
        assert!((p - (-1.0f64).exp()).abs() < 1e-8, "{p}");
        assert!((berezin_lambda(&k, &z, &z).unwrap() - 1.0).abs() < 1e-12);
        let w2 = ChristPoint::new(vec![0.0], vec![0.5]);
        let p2 = berezin_lambda(&k, &z, &w2).unwrap();
        assert!((p2 - (-1.0f64).exp()).abs() < 1e-8, "{p2}");
    }

    #[test]
    fn factorization_and_deficit() {
        let c = CoshPotential { dim: 1 };
        let pts = [ChristPoint::new(vec![0.0], vec![0.0]), ChristPoint::new(vec![1.0], vec![0.0])];
        let k = ChristKernel::new(&c, 4.0, &pts, &ChristOptions::default()).unwrap();
        let r = midpoint_factorization_check(&k, &[0.0], &[1.0], &[0.3]).unwrap();
        assert!(r.residual <= 1e-10);
        assert!((r.deficit - (0.5 * (1.0 + 1f64.cosh()) - 0.5f64.cosh())).abs() < 1e-15);
    }

    #[test]
    fn bounds_reject_concave_regions() {
        let bad = BumpQuadratic { bump: BumpPerturbation { center: vec![0.0], radius: 1.0, amplitude: 20.0 } };
        assert!(certify_bounds(&bad, &[-2.0], &[2.0], 101).is_err());
        let ok = BumpQuadratic { bump: BumpPerturbation { center: vec![0.0], radius: 1.0, amplitude: 0.2 } };
        let b = certify_bounds(&ok, &[-2.0], &[2.0], 101).unwrap();
        assert!(b.c_lo > 0.0 && b.c_hi >= b.c_lo);
    }
}
