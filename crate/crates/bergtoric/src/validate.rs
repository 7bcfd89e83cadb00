//! `validate`: numerical sanity checks for a configured potential.

use bergtoric_core::decay::{fit_rate, rate_sequence};
use bergtoric_core::kernel::{log_berezin, midpoint_identity_check, tyz_scan};
use bergtoric_core::oracles::{fs_log_q, product_log_q};
use bergtoric_core::potential::{
    check_convexity, check_derivatives, default_validation_box, grid, legendre_point, moment_map,
    validate_perturbation, PerturbedPotential, DEFAULT_EIGENVALUE_FLOOR, DEFAULT_LEGENDRE_MARGIN,
};
use bergtoric_core::{NormTable, PotentialSpec, ToricPotential};
use serde::Serialize;

use crate::commands::{load_tables, spec_polytope, Report};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::io::write_json;

pub const DERIVATIVE_TOL: f64 = 1e-6;
pub const LEGENDRE_TOL: f64 = 1e-8;
pub const MIDPOINT_TOL: f64 = 1e-12;
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Allowed `|log Q − log Q_exact|` in units of the table's own error estimate.
pub const ORACLE_SLACK: f64 = 10.0;
/// Largest relative variation of the scaled Szegő diagonal accepted at the top of the grid.
pub const TYZ_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.to_string(), passed, skipped: false, detail }
}

fn skipped(name: &str, detail: String) -> Check {
    Check { name: name.to_string(), passed: true, skipped: true, detail }
}

/// Runs every check, writes `validate.json` and prints one line per check.
pub fn cmd_validate(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let checks = run_checks(cfg)?;
    let mut report = Report::default();
    for c in &checks {
        let tag = if c.skipped {
            "SKIP"
        } else if c.passed {
            "PASS"
        } else {
            "FAIL"
        };
        println!("{tag} {}: {}", c.name, c.detail);
        if !c.passed {
            report.failures.push(format!("{}: {}", c.name, c.detail));
        }
    }
    let path = cfg.output.dir.join("validate.json");
    write_json(&path, &checks)?;
    report.written.push(path);
    report.into_result()
}

pub fn run_checks(cfg: &ExperimentConfig) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    let poly = spec_polytope(&cfg.potential)?;
    let delzant = poly.verify_delzant();
    out.push(check("delzant", delzant.is_valid(), delzant.violations().join("; ")));
    if let Some(explicit) = cfg.explicit_polytope()? {
        let r = explicit.verify_delzant();
        out.push(check("configured polytope", r.is_valid(), r.violations().join("; ")));
    }

    let p: Box<dyn ToricPotential> = match &cfg.potential {
        PotentialSpec::PerturbedFs { dim, bump } => {
            let pert = PerturbedPotential::new_unchecked(*dim, bump.clone())?;
            match validate_perturbation(&pert, DEFAULT_EIGENVALUE_FLOOR) {
                Ok(()) => out.push(check("perturbation", true, format!("eigenvalue ratio ≥ {DEFAULT_EIGENVALUE_FLOOR}"))),
                Err(e) => {
                    out.push(check("perturbation", false, e.to_string()));
                    return Ok(out);
                }
            }
            Box::new(pert)
        }
        spec => bergtoric_core::builtin(spec)?,
    };
    let m = p.dim();
    let (lo, hi) = default_validation_box(p.as_ref())?;
    let per_axis = if m == 1 { 41 } else if m == 2 { 13 } else { 5 };

    let conv = check_convexity(p.as_ref(), &lo, &hi, per_axis, 200, 7);
    out.push(check(
        "convexity",
        conv.passed(),
        format!("min eigenvalue {:.3e}, {} midpoint violations", conv.min_eigenvalue, conv.midpoint_violations),
    ));

    let points = grid(&lo, &hi, per_axis);
    let der = check_derivatives(p.as_ref(), &points);
    out.push(check(
        "derivatives",
        der.passed(DERIVATIVE_TOL),
        format!("gradient {:.3e}, hessian {:.3e}", der.max_gradient_error, der.max_hessian_error),
    ));

    let mut legendre = 0.0f64;
    for rho in &points {
        let x = moment_map(p.as_ref(), rho);
        let back = legendre_point(p.as_ref(), &x, DEFAULT_LEGENDRE_MARGIN)?;
        let err = rho.iter().zip(&back).map(|(a, b)| (a - b).abs() / (1.0 + a.abs())).fold(0.0, f64::max);
        legendre = legendre.max(err);
    }
    out.push(check("legendre round trip", legendre <= LEGENDRE_TOL, format!("max error {legendre:.3e}")));

    let tables = load_tables(cfg, p.as_ref())?;
    out.push(oracle_check(&cfg.potential, &tables)?);
    out.extend(pair_checks(cfg, &tables));
    out.push(tyz_check(p.as_ref(), &tables, &lo, &hi));
    Ok(out)
}

fn oracle_check(spec: &PotentialSpec, tables: &[NormTable]) -> Result<Check, CliError> {
    let exact = |alpha: &[i64], k: u32| -> Result<Option<f64>, CliError> {
        Ok(match spec {
            PotentialSpec::FubiniStudy { dim } => Some(fs_log_q(*dim, k, alpha)?),
            PotentialSpec::ProductOf1d { factors } => Some(product_log_q(factors, k, alpha)?),
            PotentialSpec::PerturbedFs { .. } => None,
        })
    };
    let mut worst = 0.0f64;
    for t in tables {
        for e in &t.entries {
            let Some(v) = exact(&e.alpha, t.k)? else {
                return Ok(skipped("closed-form norms", "no closed form for this potential".into()));
            };
            let allowed = ORACLE_SLACK * e.error.max(t.rel_tol) + 1e-12 * (1.0 + v.abs());
            worst = worst.max((e.log_q - v).abs() / allowed);
        }
    }
    Ok(check("closed-form norms", worst <= 1.0, format!("worst error / allowance {worst:.3}")))
}

fn pair_checks(cfg: &ExperimentConfig, tables: &[NormTable]) -> Vec<Check> {
    let mut out = Vec::new();
    if cfg.pairs.is_empty() {
        out.push(skipped("pairs", "no pairs configured".into()));
        return out;
    }
    let mut midpoint = 0.0f64;
    let mut max_log_p = f64::NEG_INFINITY;
    let mut asym = 0.0f64;
    for pair in &cfg.pairs {
        let (z, w) = pair.points();
        for t in tables {
            midpoint = midpoint.max(midpoint_identity_check(t, &z.rho, &w.rho, &z.theta));
            let a = log_berezin(t, &z, &w);
            let b = log_berezin(t, &w, &z);
            max_log_p = max_log_p.max(a).max(b);
            if a.is_finite() || b.is_finite() {
                asym = asym.max((a.exp() - b.exp()).abs());
            }
        }
        let points = rate_sequence(tables, &z, &w);
        if let Err(e) = fit_rate(&points) {
            log::warn!("decay fit skipped for ({:?}, {:?}): {e}", z.rho, w.rho);
        }
    }
    out.push(check("midpoint identity", midpoint <= MIDPOINT_TOL, format!("max residual {midpoint:.3e}")));
    out.push(check(
        "berezin bounds",
        max_log_p.exp() <= 1.0 + SYMMETRY_TOL && asym <= SYMMETRY_TOL,
        format!("max P {:.15}, max asymmetry {asym:.3e}", max_log_p.exp()),
    ));
    out
}

fn tyz_check(p: &dyn ToricPotential, tables: &[NormTable], lo: &[f64], hi: &[f64]) -> Check {
    let n = tables.len();
    if n < 2 {
        return skipped("tyz", "needs at least two grid values".into());
    }
    let m = p.dim();
    let points = grid(lo, hi, if m == 1 { 9 } else { 5 });
    let (t1, t2) = (&tables[n - 2], &tables[n - 1]);
    let s1 = tyz_scan(t1, p, &points);
    let s2 = tyz_scan(t2, p, &points);
    let (k1, k2) = (t1.k as f64, t2.k as f64);
    let mut v1 = 0.0f64;
    let mut v2 = 0.0f64;
    for (a, b) in s1.iter().zip(&s2) {
        let a0 = (k2 * b - k1 * a) / (k2 - k1);
        v1 = v1.max((a / a0 - 1.0).abs());
        v2 = v2.max((b / a0 - 1.0).abs());
    }
    check(
        "tyz",
        v2 <= TYZ_TOL || v2 < v1,
        format!("relative variation {v1:.3e} at k={} and {v2:.3e} at k={}", t1.k, t2.k),
    )
}
