use std::path::PathBuf;

use bergtoric_core::christ::{
    log_berezin_lambda, midpoint_factorization_check, y_slice_profile, ChristKernel, ChristOptions, ChristPoint,
};
use bergtoric_core::decay::{fit_scaled_decay, run_study, verify_upper_bound, ScaledFit};
use bergtoric_core::kernel::{bergman, log_berezin};
use bergtoric_core::numerics::angle_pm_pi;
use bergtoric_core::oracles::gaussian_kernel;
use bergtoric_core::potential::PotentialSpec;
use bergtoric_core::{builtin, DelzantPolytope, NormTable, ToricPotential};
use serde::Serialize;

use crate::cache::NormCache;
use crate::config::{ChristPotentialSpec, ExperimentConfig};
use crate::error::CliError;
use crate::io::{header, num, write_csv, write_json};

/// Files written and invariant violations found by a command.
#[derive(Debug, Default)]
pub struct Report {
    pub written: Vec<PathBuf>,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn into_result(self) -> Result<Report, CliError> {
        if self.failures.is_empty() {
            Ok(self)
        } else {
            Err(CliError::Invariant(self.failures.join("; ")))
        }
    }

    fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.warnings.push(msg);
    }
}

/// The moment polytope named by a potential spec, without building the potential.
pub fn spec_polytope(spec: &PotentialSpec) -> Result<DelzantPolytope, CliError> {
    match spec {
        PotentialSpec::FubiniStudy { dim } | PotentialSpec::PerturbedFs { dim, .. } => {
            if *dim == 0 {
                return Err(CliError::config("potential dimension must be positive"));
            }
            Ok(DelzantPolytope::simplex(*dim))
        }
        PotentialSpec::ProductOf1d { factors } => {
            if factors.is_empty() || factors.iter().any(|f| f.hi <= f.lo) {
                return Err(CliError::config("product factors need lo < hi"));
            }
            let segs: Vec<DelzantPolytope> = factors.iter().map(|f| DelzantPolytope::segment(f.lo, f.hi)).collect();
            Ok(DelzantPolytope::product(&segs.iter().collect::<Vec<_>>()))
        }
    }
}

fn same_facets(a: &DelzantPolytope, b: &DelzantPolytope) -> bool {
    let key = |p: &DelzantPolytope| {
        let mut f: Vec<(Vec<i64>, (i64, i64))> =
            p.facets().iter().map(|f| (f.normal.clone(), (*f.offset.numer(), *f.offset.denom()))).collect();
        f.sort();
        f
    };
    a.dim() == b.dim() && key(a) == key(b)
}

pub fn load_potential(cfg: &ExperimentConfig) -> Result<Box<dyn ToricPotential>, CliError> {
    if let Some(explicit) = cfg.explicit_polytope()? {
        if !same_facets(&explicit, &spec_polytope(&cfg.potential)?) {
            return Err(CliError::config("configured polytope differs from the potential's moment polytope"));
        }
    }
    Ok(builtin(&cfg.potential)?)
}

pub fn load_tables(cfg: &ExperimentConfig, p: &dyn ToricPotential) -> Result<Vec<NormTable>, CliError> {
    let cache = NormCache::new(cfg.output.cache_dir());
    let q = cfg.quadrature();
    cfg.grid.k.iter().map(|&k| cache.get_or_build(&cfg.potential, p, k, &q).map(|t| t.0)).collect()
}

fn require_pairs(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.pairs.is_empty() {
        return Err(CliError::config("no [[pairs]] configured"));
    }
    Ok(())
}

/// `lattice.csv`: `k, alpha_1..alpha_m`.
pub fn cmd_lattice(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let poly = match cfg.explicit_polytope()? {
        Some(p) => p,
        None => spec_polytope(&cfg.potential)?,
    };
    let report = poly.verify_delzant();
    if !report.is_valid() {
        return Err(CliError::config(format!("invalid polytope: {}", report.violations().join("; "))));
    }
    let m = poly.dim();
    let mut cols = vec!["k".to_string()];
    cols.extend((1..=m).map(|j| format!("alpha_{j}")));
    let mut rows = Vec::new();
    for &k in &cfg.grid.k {
        let pts = poly.lattice_points(k)?;
        log::info!("k={k}: {} lattice points", pts.len());
        for a in pts.points {
            let mut r = vec![k.to_string()];
            r.extend(a.iter().map(|v| v.to_string()));
            rows.push(r);
        }
    }
    let path = cfg.output.dir.join("lattice.csv");
    write_csv(&path, &cols, &rows)?;
    Ok(Report { written: vec![path], ..Report::default() })
}

/// `norms_k<k>.json` per grid value.
pub fn cmd_qnorms(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let p = load_potential(cfg)?;
    let tables = load_tables(cfg, p.as_ref())?;
    let mut report = Report::default();
    for t in &tables {
        let path = cfg.output.dir.join(format!("norms_k{}.json", t.k));
        write_json(&path, t)?;
        report.written.push(path);
    }
    Ok(report)
}

/// `kernel.csv`: `pair, k, rho1_*, theta1_*, rho2_*, theta2_*, log_abs_b, phase, log_p, p`.
pub fn cmd_kernel(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    require_pairs(cfg)?;
    let p = load_potential(cfg)?;
    let tables = load_tables(cfg, p.as_ref())?;
    let m = p.dim();
    let mut cols = header(&["pair", "k"]);
    for name in ["rho1", "theta1", "rho2", "theta2"] {
        cols.extend((1..=m).map(|j| format!("{name}_{j}")));
    }
    cols.extend(header(&["log_abs_b", "phase", "log_p", "p"]));
    let mut rows = Vec::new();
    let mut report = Report::default();
    for (i, pair) in cfg.pairs.iter().enumerate() {
        let (z, w) = pair.points();
        let coords: Vec<String> = [&z.rho, &z.theta, &w.rho, &w.theta].into_iter().flatten().map(|v| num(*v)).collect();
        for t in &tables {
            let b = bergman(t, &z, &w);
            let lp = log_berezin(t, &z, &w);
            if lp > 1e-12 {
                report.failures.push(format!("pair {i}, k={}: P = {} exceeds 1", t.k, lp.exp()));
            }
            let mut r = vec![i.to_string(), t.k.to_string()];
            r.extend(coords.iter().cloned());
            r.extend([num(b.log_mag), num(b.phase), num(lp), num(lp.exp())]);
            rows.push(r);
        }
    }
    let path = cfg.output.dir.join("kernel.csv");
    write_csv(&path, &cols, &rows)?;
    report.written.push(path);
    report.into_result()
}

/// `decay_pair<i>.json` per pair and `decay.csv`:
/// `pair, k, r_k, target, margin, checked, dominated`.
pub fn cmd_decay(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    require_pairs(cfg)?;
    let p = load_potential(cfg)?;
    let tables = load_tables(cfg, p.as_ref())?;
    let mut rows = Vec::new();
    let mut report = Report::default();
    for (i, pair) in cfg.pairs.iter().enumerate() {
        let (z, w) = pair.points();
        let mut study = run_study(p.as_ref(), &tables, &z, &w, cfg.tolerances.bound);
        if cfg.tolerances.bound_from_k.is_some() {
            study.bound = verify_upper_bound(p.as_ref(), &tables, &z, &w, cfg.tolerances.bound, cfg.tolerances.bound_from_k);
        }
        if let Some(why) = &study.fit_skipped {
            report.warn(format!("pair {i}: fit skipped ({why})"));
        }
        if !study.zeros.is_empty() {
            log::info!("pair {i}: kernel vanishes at k = {:?}", study.zeros);
        }
        if let Some(f) = &study.fit {
            log::info!("pair {i}: R = {:.6} (target {:.6}), p = {:.3}", f.rate, study.target, f.log_k_exponent);
        }
        if !study.bound.bound_holds {
            report.failures.push(format!("pair {i}: r_k falls below ½D − {}", cfg.tolerances.bound));
        }
        if !study.bound.dominance_holds {
            report.failures.push(format!("pair {i}: P exceeds its same-angle value"));
        }
        for r in &study.bound.rows {
            rows.push(vec![
                i.to_string(),
                r.k.to_string(),
                num(r.rate),
                num(r.target),
                num(r.margin),
                r.checked.to_string(),
                r.dominated.to_string(),
            ]);
        }
        let path = cfg.output.dir.join(format!("decay_pair{i}.json"));
        write_json(&path, &study)?;
        report.written.push(path);
    }
    let path = cfg.output.dir.join("decay.csv");
    write_csv(&path, &header(&["pair", "k", "r_k", "target", "margin", "checked", "dominated"]), &rows)?;
    report.written.push(path);
    report.into_result()
}

#[derive(Debug, Clone, Serialize)]
pub struct ChristRow {
    pub lambda: f64,
    pub pair: usize,
    pub log_abs_b: f64,
    pub phase: f64,
    pub p: f64,
    /// Relative error estimate of `B`.
    pub b_error: f64,
    /// Closed-form `P` for the quadratic potential.
    pub oracle_p: Option<f64>,
    pub oracle_rel_error: Option<f64>,
    /// Midpoint factorization residual, for pairs with equal `y`.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRate {
    pub pair: usize,
    /// `½(φ(x)+φ(x')) − φ((x+x')/2)`.
    pub deficit: f64,
    pub fit: Option<ScaledFit>,
    pub fit_skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlicePoint {
    pub lambda: f64,
    pub dy: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChristStudy {
    pub potential: String,
    pub lambdas: Vec<f64>,
    pub hessian_bounds: Vec<(f64, f64, f64)>,
    pub rows: Vec<ChristRow>,
    pub rates: Vec<PairRate>,
    pub slice: Vec<SlicePoint>,
}

/// Relative mismatch allowed against the quadratic closed form.
pub const GAUSSIAN_TOL: f64 = 1e-6;
/// Largest midpoint factorization residual accepted.
pub const FACTORIZATION_TOL: f64 = 1e-10;

/// `christ.json`, `christ.csv` and, with a slice configured, `christ_slice.csv`.
pub fn cmd_christ(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let c = cfg.christ.as_ref().ok_or_else(|| CliError::config("no [christ] section configured"))?;
    if c.pairs.is_empty() && c.slice.is_none() {
        return Err(CliError::config("[christ] needs pairs or a slice"));
    }
    let pot = c.potential.build();
    let quadratic = matches!(c.potential, ChristPotentialSpec::Quadratic { .. });
    let pairs: Vec<(ChristPoint, ChristPoint)> = c.pairs.iter().map(|p| p.points()).collect();
    let mut points: Vec<ChristPoint> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    if let Some(s) = &c.slice {
        let m = s.x.len();
        points.push(ChristPoint::new(s.x.clone(), vec![0.0; m]));
    }
    let opts = ChristOptions { rel_tol: c.rel_tol, ..ChristOptions::default() };
    let mut report = Report::default();
    let mut rows = Vec::new();
    let mut slice = Vec::new();
    let mut bounds = Vec::new();
    for &lambda in &c.lambda {
        let kernel = ChristKernel::new(pot.as_ref(), lambda, &points, &opts)?;
        bounds.push((lambda, kernel.bounds.c_lo, kernel.bounds.c_hi));
        for (i, (z, w)) in pairs.iter().enumerate() {
            let (b, b_error) = kernel.bergman(z, w)?;
            let lp = log_berezin_lambda(&kernel, z, w)?;
            let p = lp.exp();
            if p > 1.0 + 1e-12 {
                report.failures.push(format!("λ={lambda}, pair {i}: P = {p} exceeds 1"));
            }
            let (oracle_p, oracle_rel_error) = if quadratic {
                let (ob, op) = gaussian_kernel(lambda, z, w);
                let rel_b = ((b.log_mag - ob.log_mag).exp() - 1.0).abs().max(angle_pm_pi(b.phase - ob.phase).abs());
                let rel = rel_b.max(((p - op) / op).abs());
                if !(rel <= GAUSSIAN_TOL) {
                    report.failures.push(format!("λ={lambda}, pair {i}: closed-form mismatch {rel:.3e}"));
                }
                (Some(op), Some(rel))
            } else {
                (None, None)
            };
            let residual = if z.y == w.y {
                let r = midpoint_factorization_check(&kernel, &z.x, &w.x, &z.y)?.residual;
                if !(r <= FACTORIZATION_TOL) {
                    report.failures.push(format!("λ={lambda}, pair {i}: factorization residual {r:.3e}"));
                }
                Some(r)
            } else {
                None
            };
            rows.push(ChristRow { lambda, pair: i, log_abs_b: b.log_mag, phase: b.phase, p, b_error, oracle_p, oracle_rel_error, residual });
        }
        if let Some(s) = &c.slice {
            for (dy, p) in y_slice_profile(&kernel, &s.x, &s.dy)? {
                slice.push(SlicePoint { lambda, dy, p });
            }
        }
    }
    let mut rates = Vec::new();
    for (i, (z, w)) in pairs.iter().enumerate() {
        if z.x == w.x {
            continue;
        }
        let mid: Vec<f64> = z.x.iter().zip(&w.x).map(|(a, b)| 0.5 * (a + b)).collect();
        let deficit = 0.5 * (pot.value(&z.x) + pot.value(&w.x)) - pot.value(&mid);
        let samples: Vec<(f64, f64)> = rows.iter().filter(|r| r.pair == i).map(|r| (r.lambda, r.p.ln())).collect();
        let (fit, fit_skipped) = match fit_scaled_decay(&samples) {
            Ok(f) => (Some(f), None),
            Err(e) => {
                report.warn(format!("christ pair {i}: fit skipped ({e})"));
                (None, Some(e.to_string()))
            }
        };
        if let Some(f) = &fit {
            log::info!("christ pair {i}: speed-λ rate {:.6}, convexity deficit {:.6}", f.rate, deficit);
        }
        rates.push(PairRate { pair: i, deficit, fit, fit_skipped });
    }
    let study = ChristStudy { potential: pot.name(), lambdas: c.lambda.clone(), hessian_bounds: bounds, rows, rates, slice };
    let path = cfg.output.dir.join("christ.json");
    write_json(&path, &study)?;
    report.written.push(path);
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let csv_rows: Vec<Vec<String>> = study
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.lambda),
                r.pair.to_string(),
                num(r.log_abs_b),
                num(r.phase),
                num(r.p),
                num(r.b_error),
                opt(r.oracle_p),
                opt(r.oracle_rel_error),
                opt(r.residual),
            ]
        })
        .collect();
    let path = cfg.output.dir.join("christ.csv");
    write_csv(
        &path,
        &header(&["lambda", "pair", "log_abs_b", "phase", "p", "b_error", "oracle_p", "oracle_rel_error", "residual"]),
        &csv_rows,
    )?;
    report.written.push(path);
    if c.slice.is_some() {
        let path = cfg.output.dir.join("christ_slice.csv");
        let rows: Vec<Vec<String>> = study.slice.iter().map(|s| vec![num(s.lambda), num(s.dy), num(s.p)]).collect();
        write_csv(&path, &header(&["lambda", "dy", "p"]), &rows)?;
        report.written.push(path);
    }
    report.into_result()
}
