//! Toric Kähler potentials on the open orbit, the moment map and its inverse,
//! and convexity diagnostics.
//!
//! A potential is a strictly convex `φ̃(ρ)` on ℝ^m whose gradient maps onto the
//! interior of a Delzant polytope. Built-ins:
//!
//! * `fubini_study(m)`: `φ̃ = log(1 + Σ e^{ρ_j})` over the standard simplex;
//! * `product_of_1d`: sums of `a·ρ + (b−a)·log(1 + e^ρ)` over segments `[a, b]`;
//! * `perturbed_fs`: Fubini–Study plus a smooth compactly supported bump,
//!   which is `C^∞` but not real analytic on the sphere bounding its support.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use num_complex::Complex64;
use num_traits::Float;

use crate::linalg::{cholesky, cholesky_solve, log_abs_det, min_eigenvalue, norm_inf};
use crate::numerics::{log_sum_exp, Sampler};
use crate::polytope::DelzantPolytope;
use crate::{Error, Result};

/// Holomorphic extension `F_C(u₁, …, u_m)` of `F(|z₁|², …, |z_m|²) = φ(z)`.
pub trait HolomorphicContinuation: Debug + Send + Sync {
    fn dim(&self) -> usize;
    /// `F_C(u)`, or `None` at a logarithmic singularity.
    fn eval(&self, u: &[Complex64]) -> Option<Complex64>;
}

pub trait ToricPotential: Debug + Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn value(&self, rho: &[f64]) -> f64;
    fn gradient(&self, rho: &[f64]) -> Vec<f64>;
    /// Row-major `m × m` Hessian.
    fn hessian(&self, rho: &[f64]) -> Vec<f64>;
    fn log_det_hessian(&self, rho: &[f64]) -> f64 {
        let (sign, l) = log_abs_det(&self.hessian(rho), self.dim());
        if sign > 0.0 {
            l
        } else {
            f64::NAN
        }
    }
    /// `∇ ln det Hess φ̃`, by central differences unless overridden.
    fn gradient_log_det_hessian(&self, rho: &[f64]) -> Vec<f64> {
        let h = 1e-5;
        (0..self.dim())
            .map(|j| {
                let mut a = rho.to_vec();
                let mut b = rho.to_vec();
                a[j] += h;
                b[j] -= h;
                (self.log_det_hessian(&a) - self.log_det_hessian(&b)) / (2.0 * h)
            })
            .collect()
    }
    fn polytope(&self) -> &DelzantPolytope;
    fn continuation(&self) -> Option<&dyn HolomorphicContinuation> {
        None
    }
}

/// `φ̃(ρ) = log(1 + Σ e^{ρ_j})`.
#[derive(Debug, Clone, PartialEq)]
pub struct FubiniStudy {
    dim: usize,
    polytope: DelzantPolytope,
}

impl FubiniStudy {
    pub fn new(dim: usize) -> Self {
        FubiniStudy { dim, polytope: DelzantPolytope::simplex(dim) }
    }

    /// `(x₀, x)` with `x_j = e^{ρ_j}/s`, `x₀ = 1/s`, `s = 1 + Σ e^{ρ_j}`.
    fn weights(&self, rho: &[f64]) -> (f64, Vec<f64>) {
        let phi = self.value(rho);
        ((-phi).exp(), rho.iter().map(|r| (r - phi).exp()).collect())
    }
}

impl ToricPotential for FubiniStudy {
    fn name(&self) -> String {
        format!("fubini_study({})", self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, rho: &[f64]) -> f64 {
        if self.dim == 1 {
            let r = rho[0];
            return if r > 0.0 { r + (-r).exp().ln_1p() } else { r.exp().ln_1p() };
        }
        let mut terms = Vec::with_capacity(self.dim + 1);
        terms.push(0.0);
        terms.extend_from_slice(rho);
        log_sum_exp(&terms)
    }

    fn gradient(&self, rho: &[f64]) -> Vec<f64> {
        self.weights(rho).1
    }

    fn hessian(&self, rho: &[f64]) -> Vec<f64> {
        let m = self.dim;
        let (x0, x) = self.weights(rho);
        let mut h = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                h[i * m + j] = if i == j {
                    // 1 − x_i summed from the positive parts
                    let rest: f64 = x0 + (0..m).filter(|&l| l != i).map(|l| x[l]).sum::<f64>();
                    x[i] * rest
                } else {
                    -x[i] * x[j]
                };
            }
        }
        h
    }

    fn log_det_hessian(&self, rho: &[f64]) -> f64 {
        rho.iter().sum::<f64>() - (self.dim as f64 + 1.0) * self.value(rho)
    }

    fn gradient_log_det_hessian(&self, rho: &[f64]) -> Vec<f64> {
        let c = self.dim as f64 + 1.0;
        self.gradient(rho).iter().map(|x| 1.0 - c * x).collect()
    }

    fn polytope(&self) -> &DelzantPolytope {
        &self.polytope
    }

    fn continuation(&self) -> Option<&dyn HolomorphicContinuation> {
        Some(self)
    }
}

impl HolomorphicContinuation for FubiniStudy {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, u: &[Complex64]) -> Option<Complex64> {
        let s = u.iter().fold(Complex64::new(1.0, 0.0), |a, b| a + b);
        let scale = 1.0 + u.iter().map(|v| v.norm()).sum::<f64>();
        if s.norm() <= 64.0 * f64::EPSILON * scale {
            return None;
        }
        Some(s.ln())
    }
}

/// The flat potential `|z|²` on ℂ^m, available only through its continuation
/// `F_C(u) = Σ u_j` (it has no compact polytope).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BargmannFock {
    pub dim: usize,
}

impl HolomorphicContinuation for BargmannFock {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, u: &[Complex64]) -> Option<Complex64> {
        Some(u.iter().sum())
    }
}

/// One factor `a·ρ + (b − a)·log(1 + e^ρ)` with moment image `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SegmentFactor {
    pub lo: i64,
    pub hi: i64,
}

impl SegmentFactor {
    fn width(&self) -> f64 {
        (self.hi - self.lo) as f64
    }

    fn value(&self, r: f64) -> f64 {
        let softplus = if r > 0.0 { r + (-r).exp().ln_1p() } else { r.exp().ln_1p() };
        self.lo as f64 * r + self.width() * softplus
    }

    fn sigmoid(r: f64) -> f64 {
        if r > 0.0 {
            1.0 / (1.0 + (-r).exp())
        } else {
            let e = r.exp();
            e / (1.0 + e)
        }
    }

    fn gradient(&self, r: f64) -> f64 {
        self.lo as f64 + self.width() * Self::sigmoid(r)
    }

    fn second(&self, r: f64) -> f64 {
        self.width() * Self::sigmoid(r) * Self::sigmoid(-r)
    }

    fn log_second(&self, r: f64) -> f64 {
        // ln(n e^r / (1 + e^r)²) = ln n + r − 2·softplus(r)
        let softplus = if r > 0.0 { r + (-r).exp().ln_1p() } else { r.exp().ln_1p() };
        self.width().ln() + r - 2.0 * softplus
    }
}

/// Sum of one-dimensional factors over the product of segments.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPotential {
    factors: Vec<SegmentFactor>,
    polytope: DelzantPolytope,
}

impl ProductPotential {
    pub fn new(factors: Vec<SegmentFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument(String::from("product needs at least one factor")));
        }
        if let Some(f) = factors.iter().find(|f| f.hi <= f.lo) {
            return Err(Error::InvalidArgument(format!("empty segment [{}, {}]", f.lo, f.hi)));
        }
        let segments: Vec<DelzantPolytope> = factors.iter().map(|f| DelzantPolytope::segment(f.lo, f.hi)).collect();
        let refs: Vec<&DelzantPolytope> = segments.iter().collect();
        Ok(ProductPotential { polytope: DelzantPolytope::product(&refs), factors })
    }

    pub fn factors(&self) -> &[SegmentFactor] {
        &self.factors
    }
}

impl ToricPotential for ProductPotential {
    fn name(&self) -> String {
        let parts: Vec<String> = self.factors.iter().map(|f| format!("[{},{}]", f.lo, f.hi)).collect();
        format!("product_of_1d({})", parts.join("x"))
    }

    fn dim(&self) -> usize {
        self.factors.len()
    }

    fn value(&self, rho: &[f64]) -> f64 {
        self.factors.iter().zip(rho).map(|(f, &r)| f.value(r)).sum()
    }

    fn gradient(&self, rho: &[f64]) -> Vec<f64> {
        self.factors.iter().zip(rho).map(|(f, &r)| f.gradient(r)).collect()
    }

    fn hessian(&self, rho: &[f64]) -> Vec<f64> {
        let m = self.factors.len();
        let mut h = vec![0.0; m * m];
        for (j, (f, &r)) in self.factors.iter().zip(rho).enumerate() {
            h[j * m + j] = f.second(r);
        }
        h
    }

    fn log_det_hessian(&self, rho: &[f64]) -> f64 {
        self.factors.iter().zip(rho).map(|(f, &r)| f.log_second(r)).sum()
    }

    fn gradient_log_det_hessian(&self, rho: &[f64]) -> Vec<f64> {
        rho.iter().map(|&r| 1.0 - 2.0 * SegmentFactor::sigmoid(r)).collect()
    }

    fn polytope(&self) -> &DelzantPolytope {
        &self.polytope
    }

    fn continuation(&self) -> Option<&dyn HolomorphicContinuation> {
        Some(self)
    }
}

impl HolomorphicContinuation for ProductPotential {
    fn dim(&self) -> usize {
        self.factors.len()
    }

    fn eval(&self, u: &[Complex64]) -> Option<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (f, &v) in self.factors.iter().zip(u) {
            let s = v + 1.0;
            if s.norm() <= 64.0 * f64::EPSILON * (1.0 + v.norm()) || v.norm() == 0.0 {
                return None;
            }
            total += v.ln() * f.lo as f64 + s.ln() * f.width();
        }
        Some(total)
    }
}

/// `ψ(ρ) = ε·exp(−1/(1 − |ρ−c|²/r²))` inside the ball of radius `r`, zero outside.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BumpPerturbation {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
}

impl BumpPerturbation {
    fn s(&self, rho: &[f64]) -> f64 {
        let d2: f64 = rho.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        d2 / (self.radius * self.radius)
    }

    pub fn value(&self, rho: &[f64]) -> f64 {
        let s = self.s(rho);
        if s >= 1.0 {
            0.0
        } else {
            self.amplitude * (-1.0 / (1.0 - s)).exp()
        }
    }

    pub fn gradient(&self, rho: &[f64]) -> Vec<f64> {
        let s = self.s(rho);
        if s >= 1.0 {
            return vec![0.0; rho.len()];
        }
        let psi = self.amplitude * (-1.0 / (1.0 - s)).exp();
        let psi_s = -psi / ((1.0 - s) * (1.0 - s));
        let r2 = self.radius * self.radius;
        rho.iter().zip(&self.center).map(|(a, c)| psi_s * 2.0 * (a - c) / r2).collect()
    }

    pub fn hessian(&self, rho: &[f64]) -> Vec<f64> {
        let m = rho.len();
        let s = self.s(rho);
        if s >= 1.0 {
            return vec![0.0; m * m];
        }
        let psi = self.amplitude * (-1.0 / (1.0 - s)).exp();
        let q = 1.0 - s;
        let psi_s = -psi / (q * q);
        let psi_ss = psi * (2.0 * s - 1.0) / (q * q * q * q);
        let r2 = self.radius * self.radius;
        let ds: Vec<f64> = rho.iter().zip(&self.center).map(|(a, c)| 2.0 * (a - c) / r2).collect();
        let mut h = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                h[i * m + j] = psi_ss * ds[i] * ds[j] + if i == j { 2.0 * psi_s / r2 } else { 0.0 };
            }
        }
        h
    }

    pub fn contains(&self, rho: &[f64]) -> bool {
        self.s(rho) < 1.0
    }
}

/// Fubini–Study plus a bump.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedPotential {
    base: FubiniStudy,
    bump: BumpPerturbation,
}

impl PerturbedPotential {
    /// Builds the potential without validating convexity; see [`builtin`].
    pub fn new_unchecked(dim: usize, bump: BumpPerturbation) -> Result<Self> {
        if bump.center.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: bump.center.len() });
        }
        if !(bump.radius > 0.0) || !bump.amplitude.is_finite() {
            return Err(Error::InvalidArgument(String::from("bump needs a positive radius and finite amplitude")));
        }
        Ok(PerturbedPotential { base: FubiniStudy::new(dim), bump })
    }

    pub fn bump(&self) -> &BumpPerturbation {
        &self.bump
    }

    pub fn base(&self) -> &FubiniStudy {
        &self.base
    }
}

impl ToricPotential for PerturbedPotential {
    fn name(&self) -> String {
        format!(
            "perturbed_fs({}; center={:?}, radius={}, amplitude={})",
            self.base.dim, self.bump.center, self.bump.radius, self.bump.amplitude
        )
    }

    fn dim(&self) -> usize {
        self.base.dim
    }

    fn value(&self, rho: &[f64]) -> f64 {
        self.base.value(rho) + self.bump.value(rho)
    }

    fn gradient(&self, rho: &[f64]) -> Vec<f64> {
        let mut g = self.base.gradient(rho);
        if self.bump.contains(rho) {
            for (a, b) in g.iter_mut().zip(self.bump.gradient(rho)) {
                *a += b;
            }
        }
        g
    }

    fn hessian(&self, rho: &[f64]) -> Vec<f64> {
        let mut h = self.base.hessian(rho);
        if self.bump.contains(rho) {
            for (a, b) in h.iter_mut().zip(self.bump.hessian(rho)) {
                *a += b;
            }
        }
        h
    }

    fn log_det_hessian(&self, rho: &[f64]) -> f64 {
        if !self.bump.contains(rho) {
            return self.base.log_det_hessian(rho);
        }
        let (sign, l) = log_abs_det(&self.hessian(rho), self.dim());
        if sign > 0.0 {
            l
        } else {
            f64::NAN
        }
    }

    fn gradient_log_det_hessian(&self, rho: &[f64]) -> Vec<f64> {
        let h = 1e-5;
        let r2 = (self.bump.radius + 2.0 * h) * (self.bump.radius + 2.0 * h);
        let d2: f64 = rho.iter().zip(&self.bump.center).map(|(a, c)| (a - c) * (a - c)).sum();
        if d2 >= r2 {
            return self.base.gradient_log_det_hessian(rho);
        }
        (0..self.dim())
            .map(|j| {
                let mut a = rho.to_vec();
                let mut b = rho.to_vec();
                a[j] += h;
                b[j] -= h;
                (self.log_det_hessian(&a) - self.log_det_hessian(&b)) / (2.0 * h)
            })
            .collect()
    }

    fn polytope(&self) -> &DelzantPolytope {
        self.base.polytope()
    }
}

/// Registry of built-in potentials.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "name", rename_all = "snake_case"))]
pub enum PotentialSpec {
    FubiniStudy { dim: usize },
    #[cfg_attr(feature = "serde", serde(rename = "product_of_1d"))]
    ProductOf1d { factors: Vec<SegmentFactor> },
    PerturbedFs { dim: usize, bump: BumpPerturbation },
}

impl PotentialSpec {
    pub fn dim(&self) -> usize {
        match self {
            PotentialSpec::FubiniStudy { dim } | PotentialSpec::PerturbedFs { dim, .. } => *dim,
            PotentialSpec::ProductOf1d { factors } => factors.len(),
        }
    }
}

/// Default pointwise floor on `λ_min(perturbed) / λ_min(unperturbed)`.
pub const DEFAULT_EIGENVALUE_FLOOR: f64 = 0.5;

/// Instantiates a potential; perturbed potentials are checked against
/// [`DEFAULT_EIGENVALUE_FLOOR`] on their validation grid.
pub fn builtin(spec: &PotentialSpec) -> Result<Box<dyn ToricPotential>> {
    match spec {
        PotentialSpec::FubiniStudy { dim } => {
            if *dim == 0 {
                return Err(Error::InvalidArgument(String::from("dimension must be positive")));
            }
            Ok(Box::new(FubiniStudy::new(*dim)))
        }
        PotentialSpec::ProductOf1d { factors } => Ok(Box::new(ProductPotential::new(factors.clone())?)),
        PotentialSpec::PerturbedFs { dim, bump } => {
            if *dim == 0 {
                return Err(Error::InvalidArgument(String::from("dimension must be positive")));
            }
            let p = PerturbedPotential::new_unchecked(*dim, bump.clone())?;
            validate_perturbation(&p, DEFAULT_EIGENVALUE_FLOOR)?;
            Ok(Box::new(p))
        }
    }
}

/// Checks `λ_min(Hess(φ̃ + ψ)) ≥ floor · λ_min(Hess φ̃)` on the validation box
/// grid and on a dense grid over the bump support; reports the worst point.
pub fn validate_perturbation(p: &PerturbedPotential, floor: f64) -> Result<()> {
    let m = p.dim();
    let (lo, hi) = default_validation_box(&p.base)?;
    let per_axis = if m == 1 { 201 } else { 41 };
    let mut points = grid(&lo, &hi, per_axis);
    let blo: Vec<f64> = p.bump.center.iter().map(|c| c - p.bump.radius).collect();
    let bhi: Vec<f64> = p.bump.center.iter().map(|c| c + p.bump.radius).collect();
    points.extend(grid(&blo, &bhi, if m == 1 { 401 } else { 61 }));
    let mut worst: Option<(f64, f64, Vec<f64>)> = None;
    for rho in points {
        let base = min_eigenvalue(&p.base.hessian(&rho), m);
        let pert = min_eigenvalue(&p.hessian(&rho), m);
        let ratio = pert / base;
        if worst.as_ref().map_or(true, |w| ratio < w.0) {
            worst = Some((ratio, pert, rho));
        }
    }
    match worst {
        Some((ratio, ev, at)) if !(ratio >= floor) => Err(Error::NotPositiveDefinite { min_eigenvalue: ev, at, ratio }),
        _ => Ok(()),
    }
}

/// Uniform grid with `per_axis` points per axis, endpoints included.
pub fn grid(lo: &[f64], hi: &[f64], per_axis: usize) -> Vec<Vec<f64>> {
    let m = lo.len();
    let n = per_axis.max(2);
    let total = n.pow(m as u32);
    (0..total)
        .map(|mut idx| {
            (0..m)
                .map(|j| {
                    let t = idx % n;
                    idx /= n;
                    lo[j] + (hi[j] - lo[j]) * t as f64 / (n - 1) as f64
                })
                .collect()
        })
        .collect()
}

/// The moment map `x = ∇φ̃(ρ)`.
pub fn moment_map(p: &dyn ToricPotential, rho: &[f64]) -> Vec<f64> {
    p.gradient(rho)
}

/// Default interior margin required by [`legendre_point`].
pub const DEFAULT_LEGENDRE_MARGIN: f64 = 1e-9;

/// Solves `∇φ̃(ρ) = x` by damped Newton on `φ̃(ρ) − ⟨x, ρ⟩`, to `‖∇φ̃(ρ) − x‖_∞ ≤ 1e−10`.
pub fn legendre_point(p: &dyn ToricPotential, x: &[f64], margin: f64) -> Result<Vec<f64>> {
    legendre_point_from(p, x, margin, &vec![0.0; p.dim()])
}

/// As [`legendre_point`] from a given starting point.
pub fn legendre_point_from(p: &dyn ToricPotential, x: &[f64], margin: f64, start: &[f64]) -> Result<Vec<f64>> {
    let m = p.dim();
    if x.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: x.len() });
    }
    let interior = p.polytope().interior_margin(x);
    if !(interior > margin) {
        return Err(Error::NotInterior { margin: interior });
    }
    let objective = |r: &[f64]| p.value(r) - r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    let mut rho = start.to_vec();
    let mut f = objective(&rho);
    let mut residual = f64::INFINITY;
    const MAX_ITER: usize = 300;
    for _ in 0..MAX_ITER {
        let g: Vec<f64> = p.gradient(&rho).iter().zip(x).map(|(a, b)| a - b).collect();
        residual = norm_inf(&g);
        if residual <= 1e-10 {
            return Ok(rho);
        }
        let h = p.hessian(&rho);
        let step = match cholesky(&h, m) {
            Some(l) => cholesky_solve(&l, m, &g),
            None => g.clone(),
        };
        // cap steps so the first iterations far from the target stay sane
        let len = norm_inf(&step);
        let cap = if len > 4.0 { 4.0 / len } else { 1.0 };
        let slope: f64 = g.iter().zip(&step).map(|(a, b)| a * b).sum::<f64>() * cap;
        let mut t = cap;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = rho.iter().zip(&step).map(|(r, s)| r - t * s).collect();
            let ft = objective(&trial);
            if ft <= f - 1e-4 * slope * (t / cap) || (ft - f).abs() <= 4.0 * f64::EPSILON * f.abs().max(1.0) {
                rho = trial;
                f = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NoConvergence { what: "Legendre inversion", iterations: MAX_ITER, residual })
}

/// Default ρ-box for validation: bounding box of the Legendre preimages of
/// the boundary of `P` pulled inward so every facet value is at least `1e−3`.
pub fn default_validation_box(p: &dyn ToricPotential) -> Result<(Vec<f64>, Vec<f64>)> {
    validation_box_with_margin(p, 1e-3)
}

pub fn validation_box_with_margin(p: &dyn ToricPotential, margin: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = p.dim();
    let poly = p.polytope();
    let verts: Vec<Vec<f64>> = poly
        .vertices()
        .iter()
        .map(|v| v.iter().map(|&q| crate::polytope::ratio_to_f64(q)).collect())
        .collect();
    if verts.is_empty() {
        return Err(Error::InvalidPolytope(String::from("polytope has no vertices")));
    }
    let centroid: Vec<f64> = (0..m).map(|j| verts.iter().map(|v| v[j]).sum::<f64>() / verts.len() as f64).collect();
    let depth = poly.interior_margin(&centroid);
    let t = 1.0 - margin / depth;
    // boundary samples: vertices and points along segments between them
    let mut samples = Vec::new();
    for a in 0..verts.len() {
        for b in a..verts.len() {
            for s in 0..=8 {
                let w = s as f64 / 8.0;
                let x: Vec<f64> = (0..m).map(|j| (1.0 - w) * verts[a][j] + w * verts[b][j]).collect();
                samples.push(x);
            }
        }
    }
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for x in samples {
        let pulled: Vec<f64> = x.iter().zip(&centroid).map(|(xi, c)| c + t * (xi - c)).collect();
        let rho = legendre_point(p, &pulled, 0.5 * margin)?;
        for j in 0..m {
            lo[j] = lo[j].min(rho[j]);
            hi[j] = hi[j].max(rho[j]);
        }
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub grid_points: usize,
    pub min_eigenvalue: f64,
    pub min_at: Vec<f64>,
    pub midpoint_pairs: usize,
    pub midpoint_violations: usize,
    /// Smallest `½(φ̃₁+φ̃₂) − φ̃(mid)` seen over the sampled pairs.
    pub min_midpoint_gap: f64,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.min_eigenvalue > 0.0 && self.midpoint_violations == 0
    }
}

/// Scans the Hessian's smallest eigenvalue on a grid over `[lo, hi]` and tests
/// the midpoint inequality on random pairs drawn from the box.
pub fn check_convexity(
    p: &dyn ToricPotential,
    lo: &[f64],
    hi: &[f64],
    per_axis: usize,
    pairs: usize,
    seed: u64,
) -> ConvexityReport {
    let m = p.dim();
    let points = grid(lo, hi, per_axis);
    let mut min_eigenvalue = f64::INFINITY;
    let mut min_at = vec![0.0; m];
    for rho in &points {
        let ev = min_eigenvalue_or_nan(&p.hessian(rho), m);
        if ev < min_eigenvalue || ev.is_nan() {
            min_eigenvalue = ev;
            min_at = rho.clone();
            if ev.is_nan() {
                break;
            }
        }
    }
    let mut sampler = Sampler::new(seed);
    let mut violations = 0;
    let mut min_gap = f64::INFINITY;
    for _ in 0..pairs {
        let a = sampler.vector(lo, hi);
        let b = sampler.vector(lo, hi);
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let gap = 0.5 * (p.value(&a) + p.value(&b)) - p.value(&mid);
        min_gap = min_gap.min(gap);
        if !(gap > 0.0) {
            violations += 1;
        }
    }
    ConvexityReport {
        lo: lo.to_vec(),
        hi: hi.to_vec(),
        grid_points: points.len(),
        min_eigenvalue,
        min_at,
        midpoint_pairs: pairs,
        midpoint_violations: violations,
        min_midpoint_gap: min_gap,
    }
}

fn min_eigenvalue_or_nan(h: &[f64], m: usize) -> f64 {
    if h.iter().any(|v| !v.is_finite()) {
        f64::NAN
    } else {
        min_eigenvalue(h, m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeReport {
    pub points: usize,
    pub max_gradient_error: f64,
    pub max_hessian_error: f64,
}

impl DerivativeReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_gradient_error <= tol && self.max_hessian_error <= tol
    }
}

/// Compares analytic derivatives with fourth-order central differences.
/// Errors are relative to the largest entry of the analytic vector or matrix.
pub fn check_derivatives(p: &dyn ToricPotential, points: &[Vec<f64>]) -> DerivativeReport {
    let m = p.dim();
    let h = 1e-3;
    let stencil = |f: &dyn Fn(&[f64]) -> f64, rho: &[f64], j: usize| {
        let at = |t: f64| {
            let mut r = rho.to_vec();
            r[j] += t;
            f(&r)
        };
        (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
    };
    let mut grad_err: f64 = 0.0;
    let mut hess_err: f64 = 0.0;
    for rho in points {
        let g = p.gradient(rho);
        let scale = norm_inf(&g).max(f64::MIN_POSITIVE);
        for j in 0..m {
            let fd = stencil(&|r| p.value(r), rho, j);
            grad_err = grad_err.max((fd - g[j]).abs() / scale);
        }
        let hess = p.hessian(rho);
        let hscale = norm_inf(&hess).max(f64::MIN_POSITIVE);
        for i in 0..m {
            for j in 0..m {
                let fd = stencil(&|r| p.gradient(r)[i], rho, j);
                hess_err = hess_err.max((fd - hess[i * m + j]).abs() / hscale);
            }
        }
    }
    DerivativeReport { points: points.len(), max_gradient_error: grad_err, max_hessian_error: hess_err }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(center: Vec<f64>, amplitude: f64) -> BumpPerturbation {
        BumpPerturbation { center, radius: 1.5, amplitude }
    }

    #[test]
    fn fubini_study_values() {
        let fs = FubiniStudy::new(1);
        assert!((fs.value(&[0.0]) - 2f64.ln()).abs() < 1e-15);
        assert!((fs.gradient(&[0.0])[0] - 0.5).abs() < 1e-15);
        assert!((fs.hessian(&[0.0])[0] - 0.25).abs() < 1e-15);
        assert!((fs.gradient(&[40.0])[0] - 1.0).abs() < 1e-15);
        let fs2 = FubiniStudy::new(2);
        let x = moment_map(&fs2, &[0.0, 0.0]);
        assert!(x.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn log_det_closed_form_matches_lu() {
        let fs = FubiniStudy::new(2);
        let rho = [0.3, -1.2];
        let (_, l) = log_abs_det(&fs.hessian(&rho), 2);
        assert!((fs.log_det_hessian(&rho) - l).abs() < 1e-13);
        let prod = ProductPotential::new(vec![SegmentFactor { lo: 0, hi: 1 }, SegmentFactor { lo: -1, hi: 2 }]).unwrap();
        let (_, l) = log_abs_det(&prod.hessian(&rho), 2);
        assert!((prod.log_det_hessian(&rho) - l).abs() < 1e-13);
    }

    #[test]
    fn legendre_inversion() {
        let fs = FubiniStudy::new(1);
        let r = legendre_point(&fs, &[0.5], DEFAULT_LEGENDRE_MARGIN).unwrap();
        assert!(r[0].abs() < 1e-10);
        let r = legendre_point(&fs, &[0.9], DEFAULT_LEGENDRE_MARGIN).unwrap();
        assert!((r[0] - 9f64.ln()).abs() < 1e-9);
        let fs2 = FubiniStudy::new(2);
        let r = legendre_point(&fs2, &[1.0 / 3.0, 1.0 / 3.0], DEFAULT_LEGENDRE_MARGIN).unwrap();
        assert!(norm_inf(&r) < 1e-9);
        assert!(matches!(legendre_point(&fs, &[1.0], DEFAULT_LEGENDRE_MARGIN), Err(Error::NotInterior { .. })));
        // near a vertex
        let r = legendre_point(&fs2, &[1e-7, 1e-7], DEFAULT_LEGENDRE_MARGIN).unwrap();
        let x = fs2.gradient(&r);
        assert!((x[0] - 1e-7).abs() <= 1e-10 && (x[1] - 1e-7).abs() <= 1e-10);
    }

    #[test]
    fn bump_derivatives_match_differences() {
        let p = PerturbedPotential::new_unchecked(2, bump(vec![0.2, -0.1], 0.05)).unwrap();
        let pts: Vec<Vec<f64>> = grid(&[-1.0, -1.2], &[1.3, 1.1], 7);
        let rep = check_derivatives(&p, &pts);
        assert!(rep.passed(1e-6), "{rep:?}");
        let fs = FubiniStudy::new(2);
        assert!(check_derivatives(&fs, &grid(&[-6.0, -6.0], &[6.0, 6.0], 5)).passed(1e-6));
    }

    #[test]
    fn convexity_reports() {
        let fs = FubiniStudy::new(1);
        let rep = check_convexity(&fs, &[-5.0], &[5.0], 101, 200, 7);
        assert!(rep.passed());
        assert!((rep.min_at[0].abs() - 5.0).abs() < 1e-12);
        let huge = PerturbedPotential::new_unchecked(1, bump(vec![0.0], 50.0)).unwrap();
        let rep = check_convexity(&huge, &[-5.0], &[5.0], 101, 200, 7);
        assert!(!rep.passed());
        assert!(rep.min_eigenvalue < 0.0);
        assert!(rep.min_at[0].abs() < 1.5);
    }

    #[test]
    fn builtin_validates_bumps() {
        let ok = builtin(&PotentialSpec::PerturbedFs { dim: 1, bump: bump(vec![0.3], 0.02) });
        assert!(ok.is_ok());
        let bad = builtin(&PotentialSpec::PerturbedFs { dim: 1, bump: bump(vec![0.3], 5.0) });
        assert!(matches!(bad, Err(Error::NotPositiveDefinite { .. })), "{bad:?}");
    }

    #[test]
    fn validation_box_covers_the_shrunk_polytope() {
        let fs = FubiniStudy::new(1);
        let (lo, hi) = default_validation_box(&fs).unwrap();
        // x = 1e-3 pulled from the vertex 0 toward the centre 1/2
        let expect = (1e-3f64 / (1.0 - 1e-3)).ln();
        assert!((lo[0] - expect).abs() < 1e-8, "{lo:?}");
        assert!((hi[0] + expect).abs() < 1e-8);
    }

    #[test]
    fn continuation_agrees_on_the_diagonal() {
        let fs = FubiniStudy::new(2);
        let rho = [0.4, -0.7];
        let u: Vec<Complex64> = rho.iter().map(|r| Complex64::new(r.exp(), 0.0)).collect();
        let f = HolomorphicContinuation::eval(&fs, &u).unwrap();
        assert!((f.re - fs.value(&rho)).abs() < 1e-15);
        assert!(HolomorphicContinuation::eval(&fs, &[Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)]).is_none());
    }
}
