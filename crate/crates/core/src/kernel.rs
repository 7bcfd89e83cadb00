//! Lattice-sum Bergman kernels on the open orbit, the diagonal Szegő
//! contraction and the Berezin kernel.
//!
//! With `z = exp(ρ/2 + iθ)` the Bergman kernel of `L^k` in the toric frame is
//!
//! ```text
//! B(z, w) = Σ_α exp(⟨α, (ρ₁+ρ₂)/2⟩ + i⟨α, θ₁−θ₂⟩) / Q(α)
//! ```
//!
//! The Szegő kernel multiplies by `e^{−kφ̃(ρ₁)/2} e^{−kφ̃(ρ₂)/2}`. In the Berezin
//! ratio `|Π(z,w)| / √(Π(z,z) Π(w,w))` those weights appear once in the
//! numerator and once, through the square root, in the denominator, so
//! `P = |B(z,w)| / √(B(z,z) B(w,w))` and the potential is never evaluated.
//! [`szego_diag`] keeps the weight and is used to check diagonal asymptotics.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use num_traits::Float;

use crate::norms::NormTable;
use crate::numerics::{angle_0_2pi, angle_pm_pi};
use crate::potential::ToricPotential;

/// A point `z = exp(ρ/2 + iθ)` of the open orbit, angles in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrbitPoint {
    pub rho: Vec<f64>,
    pub theta: Vec<f64>,
}

impl OrbitPoint {
    pub fn new(rho: Vec<f64>, theta: Vec<f64>) -> Self {
        let theta = theta.into_iter().map(angle_0_2pi).collect();
        OrbitPoint { rho, theta }
    }

    /// The point on the positive real orbit, `θ = 0`.
    pub fn real(rho: Vec<f64>) -> Self {
        let m = rho.len();
        OrbitPoint { rho, theta: alloc::vec![0.0; m] }
    }

    /// From affine coordinates; every `z_j` must be nonzero.
    pub fn from_affine(z: &[Complex64]) -> Self {
        OrbitPoint::new(z.iter().map(|v| 2.0 * v.norm().ln()).collect(), z.iter().map(|v| v.arg()).collect())
    }

    pub fn affine(&self) -> Vec<Complex64> {
        self.rho.iter().zip(&self.theta).map(|(r, t)| Complex64::from_polar((0.5 * r).exp(), *t)).collect()
    }

    /// `z*`: the representative with all angles set to zero.
    pub fn star(&self) -> Self {
        OrbitPoint::real(self.rho.clone())
    }

    pub fn dim(&self) -> usize {
        self.rho.len()
    }
}

/// A complex number stored as `(ln |v|, arg v)`; zero is `log_mag = −∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogComplex {
    pub log_mag: f64,
    /// In `(−π, π]`.
    pub phase: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex { log_mag: f64::NEG_INFINITY, phase: 0.0 };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        let phase = if log_mag == f64::NEG_INFINITY { 0.0 } else { angle_pm_pi(phase) };
        LogComplex { log_mag, phase }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(self.log_mag.exp(), self.phase)
        }
    }
}

/// `B(z, w)` by a single-shift complex log-sum-exp in lexicographic `α` order.
///
/// A sum whose modulus is below the combined rounding and table-error level of
/// its terms is reported as an exact zero.
pub fn bergman(table: &NormTable, z: &OrbitPoint, w: &OrbitPoint) -> LogComplex {
    let m = table.dim;
    let mid: Vec<f64> = (0..m).map(|j| 0.5 * (z.rho[j] + w.rho[j])).collect();
    let dtheta: Vec<f64> = (0..m).map(|j| angle_pm_pi(z.theta[j] - w.theta[j])).collect();
    lattice_sum(table, &mid, &dtheta)
}

/// `Σ_α exp(⟨α, u⟩ − ln Q(α) + i⟨α, v⟩)`.
pub fn lattice_sum(table: &NormTable, u: &[f64], v: &[f64]) -> LogComplex {
    let exponents: Vec<f64> = table
        .entries
        .iter()
        .map(|e| e.alpha.iter().zip(u).map(|(&a, x)| a as f64 * x).sum::<f64>() - e.log_q)
        .collect();
    let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return LogComplex::ZERO;
    }
    let all_real = v.iter().all(|&t| t == 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for (e, x) in table.entries.iter().zip(&exponents) {
        let r = (x - top).exp();
        l1 += r;
        if all_real {
            sum.re += r;
        } else {
            let phase: f64 = e.alpha.iter().zip(v).map(|(&a, t)| a as f64 * t).sum();
            sum += Complex64::from_polar(r, phase);
        }
    }
    let n = table.entries.len() as f64;
    let floor = 8.0 * (table.max_error() + n * f64::EPSILON) * l1;
    let mag = sum.norm();
    if mag <= floor {
        return LogComplex::ZERO;
    }
    LogComplex::new(top + mag.ln(), sum.im.atan2(sum.re))
}

/// `ln B(z, z)`, which depends on `ρ` only.
pub fn log_bergman_diag(table: &NormTable, rho: &[f64]) -> f64 {
    lattice_sum(table, rho, &alloc::vec![0.0; rho.len()]).log_mag
}

/// `P(z, w) = |B(z,w)| / √(B(z,z) B(w,w))`.
pub fn berezin(table: &NormTable, z: &OrbitPoint, w: &OrbitPoint) -> f64 {
    log_berezin(table, z, w).exp()
}

/// `ln P(z, w)`, `−∞` when the kernel vanishes.
pub fn log_berezin(table: &NormTable, z: &OrbitPoint, w: &OrbitPoint) -> f64 {
    let b = bergman(table, z, w);
    if b.is_zero() {
        return f64::NEG_INFINITY;
    }
    b.log_mag - 0.5 * log_bergman_diag(table, &z.rho) - 0.5 * log_bergman_diag(table, &w.rho)
}

/// `Π_k(z, z) = B(z, z) e^{−kφ̃(ρ)}`.
pub fn szego_diag(table: &NormTable, p: &dyn ToricPotential, z: &OrbitPoint) -> f64 {
    szego_log_diag(table, p, z).exp()
}

pub fn szego_log_diag(table: &NormTable, p: &dyn ToricPotential, z: &OrbitPoint) -> f64 {
    log_bergman_diag(table, &z.rho) - table.k as f64 * p.value(&z.rho)
}

/// `| ln|B((ρ₁,θ),(ρ₂,θ))| − ln B_diag((ρ₁+ρ₂)/2) |`: the off-diagonal modulus on
/// a shared real orbit is the diagonal value at the midpoint.
pub fn midpoint_identity_check(table: &NormTable, rho1: &[f64], rho2: &[f64], theta: &[f64]) -> f64 {
    let z = OrbitPoint::new(rho1.to_vec(), theta.to_vec());
    let w = OrbitPoint::new(rho2.to_vec(), theta.to_vec());
    let off = bergman(table, &z, &w).log_mag;
    let mid: Vec<f64> = rho1.iter().zip(rho2).map(|(a, b)| 0.5 * (a + b)).collect();
    (off - log_bergman_diag(table, &mid)).abs()
}

/// `Π_k(z,z) / k^m` at each point, for checking that the leading diagonal
/// coefficient is constant.
pub fn tyz_scan(table: &NormTable, p: &dyn ToricPotential, points: &[Vec<f64>]) -> Vec<f64> {
    let scale = (table.k as f64).powi(table.dim as i32);
    points
        .iter()
        .map(|rho| (log_bergman_diag(table, rho) - table.k as f64 * p.value(rho)).exp() / scale)
        .collect()
}

/// Antipodal angle vector `(π, 0, …, 0)`.
pub fn antipodal_shift(m: usize) -> Vec<f64> {
    let mut v = alloc::vec![0.0; m];
    v[0] = PI;
    v
}
