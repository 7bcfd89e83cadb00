//! Closed forms that the numerical modules are tested against.
//!
//! None of these call the quadrature or lattice-sum code.
//!
//! * Fubini–Study: `Q(α) = α₁!⋯α_m!(k−|α|)!/(k+m)!`, `Π_k(z,z) = (k+m)!/k!`,
//!   `P_k(z,w) = |1 + ⟨z,w⟩|^k / ((1+|z|²)(1+|w|²))^{k/2}`.
//! * Products of segments `[lo, hi]`: `Q = n·B(β+1, kn−β+1)` per factor with
//!   `n = hi − lo`, `β = α − k·lo`.
//! * Gaussian weight `e^{−λ|x|²}` on ℂ^m: `Q_λ(α) = (π/λ)^{m/2} e^{|α|²/4λ}` and
//!   `B_λ(z,w) = (2λ)^m exp(λ(u + iv)·(u + iv))`, `u = (x+x')/2`, `v = y − y'`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::lgamma;
use num_complex::Complex64;
use num_traits::Float;

use crate::christ::ChristPoint;
use crate::kernel::LogComplex;
use crate::norms::{NormEntry, NormTable};
use crate::polytope::DelzantPolytope;
use crate::potential::SegmentFactor;
use crate::{Error, Result};

fn ln_factorial(n: i64) -> f64 {
    lgamma(n as f64 + 1.0)
}

/// `ln Q(α)` for Fubini–Study on `k·Δ_m`.
pub fn fs_log_q(m: usize, k: u32, alpha: &[i64]) -> Result<f64> {
    if alpha.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: alpha.len() });
    }
    let rest = k as i64 - alpha.iter().sum::<i64>();
    if alpha.iter().any(|&a| a < 0) || rest < 0 {
        return Err(Error::AlphaOutsideDilate { alpha: alpha.to_vec(), k });
    }
    Ok(alpha.iter().map(|&a| ln_factorial(a)).sum::<f64>() + ln_factorial(rest) - ln_factorial(k as i64 + m as i64))
}

/// The full Fubini–Study norm table from the closed form.
pub fn fs_norm_table(m: usize, k: u32) -> Result<NormTable> {
    let points = DelzantPolytope::simplex(m).lattice_points(k)?;
    let entries = points
        .points
        .into_iter()
        .map(|alpha| {
            let log_q = fs_log_q(m, k, &alpha)?;
            Ok(NormEntry { alpha, log_q, error: 4.0 * f64::EPSILON * (1.0 + log_q.abs()) })
        })
        .collect::<Result<Vec<_>>>()?;
    NormTable::from_entries(k, format!("fubini_study({m})"), m, 0.0, entries)
}

/// `ln[(k+m)!/k!]`: the constant Szegő diagonal of Fubini–Study.
pub fn fs_log_szego_diag(m: usize, k: u32) -> f64 {
    ln_factorial(k as i64 + m as i64) - ln_factorial(k as i64)
}

/// `ln P_k(z, w)` for Fubini–Study at affine points.
pub fn fs_log_berezin(k: u32, z: &[Complex64], w: &[Complex64]) -> f64 {
    let cross = Complex64::new(1.0, 0.0) + z.iter().zip(w).map(|(a, b)| a * b.conj()).sum::<Complex64>();
    let nz = 1.0 + z.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let nw = 1.0 + w.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let c = cross.norm();
    if c == 0.0 {
        return f64::NEG_INFINITY;
    }
    k as f64 * (c.ln() - 0.5 * nz.ln() - 0.5 * nw.ln())
}

pub fn fs_berezin(k: u32, z: &[Complex64], w: &[Complex64]) -> f64 {
    fs_log_berezin(k, z, w).exp()
}

/// `ln[(1+|z|²)(1+|w|²) / |1+⟨z,w⟩|²]`, `+∞` when `⟨z,w⟩ = −1`.
pub fn fs_diastasis(z: &[Complex64], w: &[Complex64]) -> f64 {
    let cross = Complex64::new(1.0, 0.0) + z.iter().zip(w).map(|(a, b)| a * b.conj()).sum::<Complex64>();
    let nz = 1.0 + z.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let nw = 1.0 + w.iter().map(|a| a.norm_sqr()).sum::<f64>();
    if cross.norm() == 0.0 {
        return f64::INFINITY;
    }
    nz.ln() + nw.ln() - 2.0 * cross.norm().ln()
}

/// `ln Q(α)` for a product of segment factors.
pub fn product_log_q(factors: &[SegmentFactor], k: u32, alpha: &[i64]) -> Result<f64> {
    if alpha.len() != factors.len() {
        return Err(Error::DimensionMismatch { expected: factors.len(), found: alpha.len() });
    }
    let k = k as i64;
    let mut total = 0.0;
    for (f, &a) in factors.iter().zip(alpha) {
        let n = f.hi - f.lo;
        let beta = a - k * f.lo;
        if beta < 0 || beta > k * n {
            return Err(Error::AlphaOutsideDilate { alpha: alpha.to_vec(), k: k as u32 });
        }
        total += (n as f64).ln() + ln_factorial(beta) + ln_factorial(k * n - beta) - ln_factorial(k * n + 1);
    }
    Ok(total)
}

/// `ln Q_λ(α)` for `φ = |x|²`.
pub fn gaussian_log_q(lambda: f64, alpha: &[f64]) -> f64 {
    let m = alpha.len() as f64;
    0.5 * m * (PI / lambda).ln() + alpha.iter().map(|a| a * a).sum::<f64>() / (4.0 * lambda)
}

/// `B_λ(z, w)` and `P_λ(z, w)` for `φ = |x|²`.
pub fn gaussian_kernel(lambda: f64, z: &ChristPoint, w: &ChristPoint) -> (LogComplex, f64) {
    let m = z.x.len();
    let mut uu = 0.0;
    let mut vv = 0.0;
    let mut uv = 0.0;
    let mut dx = 0.0;
    for j in 0..m {
        let u = 0.5 * (z.x[j] + w.x[j]);
        let v = z.y[j] - w.y[j];
        uu += u * u;
        vv += v * v;
        uv += u * v;
        dx += (z.x[j] - w.x[j]).powi(2);
    }
    let b = LogComplex::new(m as f64 * (2.0 * lambda).ln() + lambda * (uu - vv), 2.0 * lambda * uv);
    (b, (-lambda * (0.25 * dx + vv)).exp())
}
