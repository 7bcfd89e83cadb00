//! Monomial norms `Q_k(α) = ∫ exp(⟨α,ρ⟩ − kφ̃(ρ)) det Hess φ̃(ρ) dρ`.
//!
//! The angular factor `(2π)^m` is dropped; it multiplies every norm equally and
//! cancels in all normalized kernels.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::Float;

use crate::linalg::{cholesky, cholesky_solve, norm_inf};
use crate::potential::{legendre_point, ToricPotential};
use crate::quadrature::{integrate_log_peak, PeakOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureOptions {
    /// Relative tolerance per norm.
    pub rel_tol: f64,
    pub max_half_width: f64,
    pub max_expansions: usize,
    pub max_segments: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { rel_tol: 1e-10, max_half_width: 400.0, max_expansions: 40, max_segments: 500 }
    }
}

impl QuadratureOptions {
    pub fn peak_options(&self) -> PeakOptions {
        PeakOptions {
            rel_tol: self.rel_tol,
            max_half_width: self.max_half_width,
            max_expansions: self.max_expansions,
            max_segments: self.max_segments,
            ..PeakOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormEntry {
    pub alpha: Vec<i64>,
    pub log_q: f64,
    /// Relative error estimate of `Q` (quadrature plus tails).
    pub error: f64,
}

/// Every lattice point of `kP` with its log-norm, sorted lexicographically by `α`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormTable {
    pub k: u32,
    pub potential: String,
    pub dim: usize,
    pub rel_tol: f64,
    pub entries: Vec<NormEntry>,
}

impl NormTable {
    /// Assembles a table, sorting entries and rejecting duplicates or
    /// non-finite norms.
    pub fn from_entries(k: u32, potential: String, dim: usize, rel_tol: f64, mut entries: Vec<NormEntry>) -> Result<Self> {
        entries.sort_by(|a, b| a.alpha.cmp(&b.alpha));
        for w in entries.windows(2) {
            if w[0].alpha == w[1].alpha {
                return Err(Error::InvalidArgument(alloc::format!("duplicate lattice point {:?}", w[0].alpha)));
            }
        }
        for e in &entries {
            if e.alpha.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.alpha.len() });
            }
            if !e.log_q.is_finite() {
                return Err(Error::InvalidArgument(alloc::format!("non-finite norm at {:?}", e.alpha)));
            }
        }
        Ok(NormTable { k, potential, dim, rel_tol, entries })
    }

    pub fn get(&self, alpha: &[i64]) -> Option<&NormEntry> {
        self.entries.binary_search_by(|e| e.alpha.as_slice().cmp(alpha)).ok().map(|i| &self.entries[i])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest relative error estimate over the entries.
    pub fn max_error(&self) -> f64 {
        self.entries.iter().map(|e| e.error).fold(0.0, f64::max)
    }
}

/// `ln Q_k(α)` and its relative error estimate.
pub fn compute_log_q(p: &dyn ToricPotential, k: u32, alpha: &[i64], opts: &QuadratureOptions) -> Result<NormEntry> {
    let m = p.dim();
    if alpha.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: alpha.len() });
    }
    let poly = p.polytope();
    if !poly.contains_lattice_point(alpha, k) {
        return Err(Error::AlphaOutsideDilate { alpha: alpha.to_vec(), k });
    }
    let kf = k as f64;
    let a: Vec<f64> = alpha.iter().map(|&v| v as f64).collect();
    let log_f = |rho: &[f64]| {
        let lin: f64 = a.iter().zip(rho).map(|(x, r)| x * r).sum();
        lin - kf * p.value(rho) + p.log_det_hessian(rho)
    };

    let start = if poly.lattice_point_is_interior(alpha, k) {
        let x: Vec<f64> = a.iter().map(|v| v / kf).collect();
        legendre_point(p, &x, 0.0)?
    } else {
        // pull the boundary point inward by a fraction of a lattice step
        let x = pull_inward(p, &a, kf);
        legendre_point(p, &x, 0.0)?
    };
    let center = ascend(p, &a, kf, start);
    // whiten: ρ = c + L·y with L Lᵀ = (k·Hess φ̃(c))⁻¹, so the peak is roughly isotropic
    let h: Vec<f64> = p.hessian(&center).iter().map(|v| v * kf).collect();
    let l = inverse_cholesky_transpose(&h, m).ok_or(Error::NotPositiveDefinite {
        min_eigenvalue: crate::linalg::min_eigenvalue(&h, m),
        at: center.clone(),
        ratio: f64::NAN,
    })?;
    let log_jac: f64 = (0..m).map(|j| l[j * m + j].abs().ln()).sum();
    let to_rho = |y: &[f64]| -> Vec<f64> {
        (0..m).map(|i| center[i] + (0..m).map(|j| l[i * m + j] * y[j]).sum::<f64>()).collect()
    };
    let log_f_white = |y: &[f64]| log_f(&to_rho(y));
    let origin = alloc::vec![0.0; m];
    let half_widths = alloc::vec![7.0; m];
    let r = integrate_log_peak(log_f_white, &origin, &half_widths, None, &opts.peak_options())?;
    Ok(NormEntry { alpha: alpha.to_vec(), log_q: r.log_value + log_jac, error: r.rel_error })
}

/// `L = R⁻ᵀ` for `A = R Rᵀ`, so that `L Lᵀ = A⁻¹`; `L` is upper triangular.
fn inverse_cholesky_transpose(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let r = cholesky(a, n)?;
    // solve Rᵀ L = I column by column (Rᵀ is upper triangular)
    let mut l = alloc::vec![0.0; n * n];
    for c in 0..n {
        for i in (0..n).rev() {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for p in i + 1..n {
                s -= r[p * n + i] * l[p * n + c];
            }
            l[i * n + c] = s / r[i * n + i];
        }
    }
    Some(l)
}

fn pull_inward(p: &dyn ToricPotential, a: &[f64], kf: f64) -> Vec<f64> {
    let (lo, hi) = p.polytope().bounding_box();
    let verts = p.polytope().vertices();
    let m = a.len();
    let centroid: Vec<f64> = (0..m)
        .map(|j| verts.iter().map(|v| crate::polytope::ratio_to_f64(v[j])).sum::<f64>() / verts.len() as f64)
        .collect();
    let scale = (0..m).map(|j| hi[j] - lo[j]).fold(0.0, f64::max).max(1.0);
    let t = 0.5 / (kf * scale + 1.0);
    (0..m).map(|j| (1.0 - t) * a[j] / kf + t * centroid[j]).collect()
}

/// Maximizes `g(ρ) = ⟨α,ρ⟩ − kφ̃ + ln det Hess φ̃` by Newton steps with the
/// model Hessian `k·Hess φ̃`, step length capped at 2 and backtracking on `g`.
fn ascend(p: &dyn ToricPotential, a: &[f64], kf: f64, start: Vec<f64>) -> Vec<f64> {
    let m = a.len();
    let g = |rho: &[f64]| {
        let lin: f64 = a.iter().zip(rho).map(|(x, r)| x * r).sum();
        lin - kf * p.value(rho) + p.log_det_hessian(rho)
    };
    let mut rho = start;
    let mut val = g(&rho);
    for _ in 0..200 {
        let x = p.gradient(&rho);
        let dl = p.gradient_log_det_hessian(&rho);
        let grad: Vec<f64> = (0..m).map(|j| a[j] - kf * x[j] + dl[j]).collect();
        if norm_inf(&grad) <= 1e-9 * (1.0 + kf) {
            break;
        }
        let hess: Vec<f64> = p.hessian(&rho).iter().map(|v| v * kf).collect();
        let mut step = match cholesky(&hess, m) {
            Some(l) => cholesky_solve(&l, m, &grad),
            None => grad.clone(),
        };
        let len = norm_inf(&step);
        if len > 2.0 {
            step.iter_mut().for_each(|s| *s *= 2.0 / len);
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let trial: Vec<f64> = rho.iter().zip(&step).map(|(r, s)| r + t * s).collect();
            let v = g(&trial);
            if v > val {
                rho = trial;
                val = v;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    rho
}

/// Norms of every lattice point of `kP`, in lexicographic order.
pub fn build_norm_table(p: &dyn ToricPotential, k: u32, opts: &QuadratureOptions) -> Result<NormTable> {
    let points = p.polytope().lattice_points(k)?;
    let mut entries = Vec::with_capacity(points.len());
    for alpha in points.points {
        let e = compute_log_q(p, k, &alpha, opts)
            .map_err(|source| Error::Norm { alpha: alpha.clone(), k, source: Box::new(source) })?;
        entries.push(e);
    }
    Ok(NormTable { k, potential: p.name(), dim: p.dim(), rel_tol: opts.rel_tol, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{FubiniStudy, ProductPotential, SegmentFactor};
    use libm::lgamma;

    fn log_beta(a: f64, b: f64) -> f64 {
        lgamma(a) + lgamma(b) - lgamma(a + b)
    }

    #[test]
    fn fubini_study_small_cases() {
        let fs = FubiniStudy::new(1);
        let opts = QuadratureOptions::default();
        let q1 = compute_log_q(&fs, 2, &[1], &opts).unwrap();
        assert!((q1.log_q - (1.0f64 / 6.0).ln()).abs() < 1e-9, "{q1:?}");
        let q0 = compute_log_q(&fs, 2, &[0], &opts).unwrap();
        assert!((q0.log_q - (1.0f64 / 3.0).ln()).abs() < 1e-9, "{q0:?}");
        assert!(q0.error <= 1e-10);
    }

    #[test]
    fn table_matches_beta_values() {
        let fs = FubiniStudy::new(1);
        let t = build_norm_table(&fs, 3, &QuadratureOptions::default()).unwrap();
        assert_eq!(t.len(), 4);
        for e in &t.entries {
            let a = e.alpha[0] as f64;
            assert!((e.log_q - log_beta(a + 1.0, 4.0 - a)).abs() < 1e-9);
        }
    }

    #[test]
    fn product_norms_factor() {
        let f1 = SegmentFactor { lo: 0, hi: 1 };
        let f2 = SegmentFactor { lo: -1, hi: 1 };
        let p = ProductPotential::new(alloc::vec![f1, f2]).unwrap();
        let t = build_norm_table(&p, 2, &QuadratureOptions::default()).unwrap();
        assert_eq!(t.len(), 3 * 5);
        for e in &t.entries {
            // width-n factor: n·B(β+1, kn−β+1) with β = α − k·lo
            let b1 = e.alpha[0] as f64;
            let b2 = (e.alpha[1] + 2) as f64;
            let expect = log_beta(b1 + 1.0, 2.0 - b1 + 1.0) + 2f64.ln() + log_beta(b2 + 1.0, 4.0 - b2 + 1.0);
            assert!((e.log_q - expect).abs() < 1e-9, "{e:?} vs {expect}");
        }
    }

    #[test]
    fn outside_alpha_rejected() {
        let fs = FubiniStudy::new(1);
        let r = compute_log_q(&fs, 2, &[3], &QuadratureOptions::default());
        assert!(matches!(r, Err(Error::AlphaOutsideDilate { .. })));
    }
}
