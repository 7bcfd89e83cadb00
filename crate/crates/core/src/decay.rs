//! Finite-k decay rates `r_k = −(1/k)·ln P_k(z, w)`, asymptotic rate fits and
//! upper-bound checks against half the star-projected diastasis.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::Float;

use crate::diastasis::{decay_rate_target, diastasis_star};
use crate::kernel::{log_bergman_diag, log_berezin, OrbitPoint};
use crate::linalg::least_squares;
use crate::norms::{build_norm_table, NormTable, QuadratureOptions};
use crate::potential::ToricPotential;
use crate::{Error, Result};

/// Geometric default grid.
pub const DEFAULT_K_GRID: [u32; 9] = [8, 12, 16, 24, 32, 48, 64, 96, 128];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RatePoint {
    pub k: u32,
    /// `ln P_k`, `−∞` when the kernel vanishes.
    pub log_p: f64,
    /// `r_k`, `+∞` when the kernel vanishes.
    pub rate: f64,
}

/// Fit of `ln P_k = −k·R + p·ln k + c`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FitResult {
    pub rate: f64,
    pub log_k_exponent: f64,
    pub constant: f64,
    pub residual: f64,
    pub ks_used: Vec<u32>,
}

/// One norm table per `k`, in grid order.
pub fn build_tables(p: &dyn ToricPotential, ks: &[u32], opts: &QuadratureOptions) -> Result<Vec<NormTable>> {
    check_grid(ks)?;
    ks.iter().map(|&k| build_norm_table(p, k, opts)).collect()
}

fn check_grid(ks: &[u32]) -> Result<()> {
    if ks.is_empty() || ks[0] == 0 || ks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!("k grid must be strictly increasing positive integers: {ks:?}")));
    }
    Ok(())
}

/// `r_k` for each table.
pub fn rate_sequence(tables: &[NormTable], z: &OrbitPoint, w: &OrbitPoint) -> Vec<RatePoint> {
    tables
        .iter()
        .map(|t| {
            let log_p = log_berezin(t, z, w);
            RatePoint { k: t.k, log_p, rate: -log_p / t.k as f64 }
        })
        .collect()
}

/// `r_k` through diagonal values only: `−(1/k)[ln B(mid) − ½ ln B(ρ₁) − ½ ln B(ρ₂)]`.
pub fn midpoint_route_rate(table: &NormTable, rho1: &[f64], rho2: &[f64]) -> f64 {
    let mid: Vec<f64> = rho1.iter().zip(rho2).map(|(a, b)| 0.5 * (a + b)).collect();
    let log_p =
        log_bergman_diag(table, &mid) - 0.5 * log_bergman_diag(table, rho1) - 0.5 * log_bergman_diag(table, rho2);
    -log_p / table.k as f64
}

/// Least-squares fit over the largest `max(4, ⌈n/2⌉)` finite points.
pub fn fit_rate(points: &[RatePoint]) -> Result<FitResult> {
    let samples: Vec<(f64, f64)> = points.iter().map(|p| (p.k as f64, p.log_p)).collect();
    let f = fit_scaled_decay(&samples)?;
    Ok(FitResult {
        rate: f.rate,
        log_k_exponent: f.log_exponent,
        constant: f.constant,
        residual: f.residual,
        ks_used: f.used.iter().map(|&s| s as u32).collect(),
    })
}

/// Fit of `ln P(s) = −s·R + p·ln s + c` for a generic large parameter `s`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScaledFit {
    pub rate: f64,
    pub log_exponent: f64,
    pub constant: f64,
    pub residual: f64,
    pub used: Vec<f64>,
}

/// [`fit_rate`] on `(s, ln P)` samples with positive `s`.
pub fn fit_scaled_decay(samples: &[(f64, f64)]) -> Result<ScaledFit> {
    let mut finite: Vec<(f64, f64)> = samples.iter().copied().filter(|(s, l)| l.is_finite() && *s > 0.0).collect();
    if finite.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, found: finite.len() });
    }
    finite.sort_by(|a, b| a.0.total_cmp(&b.0));
    let take = 4.max(finite.len().div_ceil(2));
    let used = &finite[finite.len() - take..];
    let mut design = Vec::with_capacity(3 * used.len());
    let mut y = Vec::with_capacity(used.len());
    for &(s, l) in used {
        design.extend_from_slice(&[-s, s.ln(), 1.0]);
        y.push(l);
    }
    let (coef, residual) = least_squares(&design, used.len(), 3, &y)?;
    Ok(ScaledFit {
        rate: coef[0],
        log_exponent: coef[1],
        constant: coef[2],
        residual,
        used: used.iter().map(|p| p.0).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundRow {
    pub k: u32,
    pub rate: f64,
    pub target: f64,
    /// `r_k − target`.
    pub margin: f64,
    pub checked: bool,
    pub p: f64,
    pub p_same_angle: f64,
    pub dominated: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct UpperBoundReport {
    pub target: f64,
    pub tol: f64,
    pub k0: u32,
    pub rows: Vec<BoundRow>,
    pub bound_holds: bool,
    pub dominance_holds: bool,
}

/// Tolerance on `P(z,w) ≤ P((ρ₁,θ),(ρ₂,θ))`.
pub const DOMINANCE_TOL: f64 = 1e-12;

/// Checks `r_k ≥ ½D(z*,w*) − tol` for `k ≥ k0` (default: the second half of the
/// grid) and `P(z, w) ≤ P` of the same pair with both angles set equal.
pub fn verify_upper_bound(
    p: &dyn ToricPotential,
    tables: &[NormTable],
    z: &OrbitPoint,
    w: &OrbitPoint,
    tol: f64,
    k0: Option<u32>,
) -> UpperBoundReport {
    let target = decay_rate_target(p, z, w);
    let k0 = k0.unwrap_or_else(|| tables.get(tables.len() / 2).map_or(0, |t| t.k));
    let z_same = z.star();
    let w_same = w.star();
    let mut rows = Vec::with_capacity(tables.len());
    for t in tables {
        let log_p = log_berezin(t, z, w);
        let log_same = log_berezin(t, &z_same, &w_same);
        let rate = -log_p / t.k as f64;
        let (pv, ps) = (log_p.exp(), log_same.exp());
        rows.push(BoundRow {
            k: t.k,
            rate,
            target,
            margin: rate - target,
            checked: t.k >= k0,
            p: pv,
            p_same_angle: ps,
            dominated: pv <= ps + DOMINANCE_TOL,
        });
    }
    let bound_holds = rows.iter().filter(|r| r.checked).all(|r| r.margin >= -tol);
    let dominance_holds = rows.iter().all(|r| r.dominated);
    UpperBoundReport { target, tol, k0, rows, bound_holds, dominance_holds }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DecayStudy {
    pub potential: String,
    pub z: OrbitPoint,
    pub w: OrbitPoint,
    pub ks: Vec<u32>,
    pub points: Vec<RatePoint>,
    /// Grid values where the kernel vanished; excluded from the fit.
    pub zeros: Vec<u32>,
    pub fit: Option<FitResult>,
    pub fit_skipped: Option<String>,
    /// `D(z*, w*)`.
    pub diastasis: f64,
    /// `½·D(z*, w*)`.
    pub target: f64,
    pub bound: UpperBoundReport,
}

/// Rates, fit and bound report for one pair on prebuilt tables.
pub fn run_study(
    p: &dyn ToricPotential,
    tables: &[NormTable],
    z: &OrbitPoint,
    w: &OrbitPoint,
    tol: f64,
) -> DecayStudy {
    let points = rate_sequence(tables, z, w);
    let zeros = points.iter().filter(|r| r.log_p == f64::NEG_INFINITY).map(|r| r.k).collect();
    let (fit, fit_skipped) = match fit_rate(&points) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(format!("{e}"))),
    };
    let d = diastasis_star(p, z, w).value;
    DecayStudy {
        potential: p.name(),
        z: z.clone(),
        w: w.clone(),
        ks: tables.iter().map(|t| t.k).collect(),
        points,
        zeros,
        fit,
        fit_skipped,
        diastasis: d,
        target: 0.5 * d,
        bound: verify_upper_bound(p, tables, z, w, tol, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn synthetic_model_is_recovered() {
        let pts: Vec<RatePoint> = DEFAULT_K_GRID
            .iter()
            .map(|&k| {
                let kf = k as f64;
                let log_p = -0.2 * kf + 1.5 * kf.ln() + 0.3;
                RatePoint { k, log_p, rate: -log_p / kf }
            })
            .collect();
        let f = fit_rate(&pts).unwrap();
        assert!((f.rate - 0.2).abs() < 1e-10);
        assert!((f.log_k_exponent - 1.5).abs() < 1e-10);
        assert!((f.constant - 0.3).abs() < 1e-10);
        assert_eq!(f.ks_used, vec![32, 48, 64, 96, 128]);
    }

    #[test]
    fn too_few_points() {
        let pts = [RatePoint { k: 8, log_p: -1.0, rate: 0.125 }, RatePoint { k: 16, log_p: f64::NEG_INFINITY, rate: f64::INFINITY }];
        assert!(matches!(fit_rate(&pts), Err(Error::TooFewPoints { needed: 4, found: 1 })));
        assert!(check_grid(&[4, 4]).is_err());
    }
}
