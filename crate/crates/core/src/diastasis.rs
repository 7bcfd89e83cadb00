//! Calabi diastasis of toric potentials.
//!
//! With `F_C` the holomorphic continuation of `F(|z|²) = φ(z)`,
//! `D(z, w) = F(|z|²) + F(|w|²) − 2·Re F_C(z₁w̄₁, …, z_m w̄_m)`. On a shared
//! positive real orbit `z_j w̄_j = e^{(ρ₁+ρ₂)_j/2}`, so for any smooth potential
//! `D = φ̃(ρ₁) + φ̃(ρ₂) − 2φ̃((ρ₁+ρ₂)/2)`.
//!
//! The kernel decays like `P_k ≈ exp(−k·D/2)` on such pairs; see [`decay_rate_target`].

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::kernel::OrbitPoint;
use crate::numerics::richardson;
use crate::potential::{HolomorphicContinuation, ToricPotential};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DiastasisMethod {
    SameOrbit,
    Analytic,
    StarProjected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiastasisValue {
    /// `≥ 0`, `+∞` where the continuation is singular.
    pub value: f64,
    pub method: DiastasisMethod,
}

/// `φ̃(ρ₁) + φ̃(ρ₂) − 2φ̃((ρ₁+ρ₂)/2)`.
pub fn diastasis_same_orbit(p: &dyn ToricPotential, rho1: &[f64], rho2: &[f64]) -> DiastasisValue {
    DiastasisValue { value: same_orbit_value(p, rho1, rho2), method: DiastasisMethod::SameOrbit }
}

fn same_orbit_value(p: &dyn ToricPotential, rho1: &[f64], rho2: &[f64]) -> f64 {
    if rho1 == rho2 {
        return 0.0;
    }
    let mid: Vec<f64> = rho1.iter().zip(rho2).map(|(a, b)| 0.5 * (a + b)).collect();
    (p.value(rho1) + p.value(rho2) - 2.0 * p.value(&mid)).max(0.0)
}

/// Diastasis from the potential's holomorphic continuation.
pub fn diastasis_analytic(p: &dyn ToricPotential, z: &OrbitPoint, w: &OrbitPoint) -> Result<DiastasisValue> {
    let cont = p.continuation().ok_or(Error::UnsupportedMethod("potential has no holomorphic continuation"))?;
    Ok(diastasis_continuation(cont, &z.affine(), &w.affine()))
}

/// Diastasis between affine points `z`, `w` from a continuation `F_C`.
pub fn diastasis_continuation(cont: &dyn HolomorphicContinuation, z: &[Complex64], w: &[Complex64]) -> DiastasisValue {
    let diag = |v: &[Complex64]| -> Option<f64> {
        let u: Vec<Complex64> = v.iter().map(|x| Complex64::new(x.norm_sqr(), 0.0)).collect();
        cont.eval(&u).map(|f| f.re)
    };
    let cross: Vec<Complex64> = z.iter().zip(w).map(|(a, b)| a * b.conj()).collect();
    let value = match (diag(z), diag(w), cont.eval(&cross)) {
        (Some(fz), Some(fw), Some(fc)) => (fz + fw - 2.0 * fc.re).max(0.0),
        _ => f64::INFINITY,
    };
    DiastasisValue { value, method: DiastasisMethod::Analytic }
}

/// `D(z*, w*)`: the same-orbit diastasis between the real-orbit projections.
pub fn diastasis_star(p: &dyn ToricPotential, z: &OrbitPoint, w: &OrbitPoint) -> DiastasisValue {
    DiastasisValue { value: same_orbit_value(p, &z.rho, &w.rho), method: DiastasisMethod::StarProjected }
}

/// `½·D(z*, w*)`, the exponential rate in `k` that the Berezin kernel follows.
pub fn decay_rate_target(p: &dyn ToricPotential, z: &OrbitPoint, w: &OrbitPoint) -> f64 {
    0.5 * diastasis_star(p, z, w).value
}

/// Step sizes used by [`quadratic_germ`].
pub const GERM_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// `lim_{ε→0} D(ρ, ρ+εe)/ε²` by Richardson extrapolation over [`GERM_STEPS`],
/// returned with the exact value `¼⟨Hess φ̃(ρ) e, e⟩`.
///
/// The ratio has a full power series in `ε` (the cubic term of `φ̃` enters at
/// first order), so every power is eliminated.
pub fn quadratic_germ(p: &dyn ToricPotential, rho: &[f64], e: &[f64]) -> (f64, f64) {
    let m = rho.len();
    let samples: Vec<f64> = GERM_STEPS
        .iter()
        .map(|&eps| {
            let other: Vec<f64> = rho.iter().zip(e).map(|(r, d)| r + eps * d).collect();
            let mid: Vec<f64> = rho.iter().zip(&other).map(|(a, b)| 0.5 * (a + b)).collect();
            (p.value(rho) + p.value(&other) - 2.0 * p.value(&mid)) / (eps * eps)
        })
        .collect();
    let h = p.hessian(rho);
    let quad: f64 = (0..m).map(|i| (0..m).map(|j| e[i] * h[i * m + j] * e[j]).sum::<f64>()).sum();
    (richardson(&samples, 2.0), 0.25 * quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{BargmannFock, FubiniStudy};
    use alloc::vec;
    use core::f64::consts::PI;

    #[test]
    fn worked_pair() {
        let fs = FubiniStudy::new(1);
        let d = diastasis_same_orbit(&fs, &[0.0], &[9f64.ln()]);
        assert!((d.value - 1.25f64.ln()).abs() < 1e-15);
        let z = OrbitPoint::new(vec![0.0], vec![0.3]);
        let w = OrbitPoint::new(vec![9f64.ln()], vec![2.0]);
        assert!((diastasis_star(&fs, &z, &w).value - 1.25f64.ln()).abs() < 1e-15);
        assert_eq!(diastasis_same_orbit(&fs, &[0.4], &[0.4]).value, 0.0);
    }

    #[test]
    fn antipodal_is_infinite() {
        let fs = FubiniStudy::new(1);
        let z = OrbitPoint::new(vec![0.0], vec![0.0]);
        let w = OrbitPoint::new(vec![0.0], vec![PI]);
        assert_eq!(diastasis_analytic(&fs, &z, &w).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn flat_diastasis_is_squared_distance() {
        let bf = BargmannFock { dim: 2 };
        let z = [Complex64::new(0.3, -1.0), Complex64::new(2.0, 0.5)];
        let w = [Complex64::new(-0.7, 0.2), Complex64::new(1.0, 1.5)];
        let d = diastasis_continuation(&bf, &z, &w).value;
        let expect: f64 = z.iter().zip(&w).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!((d - expect).abs() < 1e-14);
    }

    #[test]
    fn methods_agree_on_real_orbits() {
        let fs = FubiniStudy::new(2);
        let z = OrbitPoint::real(vec![0.3, -1.2]);
        let w = OrbitPoint::real(vec![-2.0, 0.8]);
        let a = diastasis_analytic(&fs, &z, &w).unwrap().value;
        let s = diastasis_same_orbit(&fs, &z.rho, &w.rho).value;
        assert!((a - s).abs() < 1e-12);
    }

    #[test]
    fn germ_extrapolates() {
        let fs = FubiniStudy::new(2);
        let (got, want) = quadratic_germ(&fs, &[0.5, -0.3], &[0.6, 0.8]);
        assert!(((got - want) / want).abs() < 1e-6);
    }
}
