//! Values fixed by hand from closed forms, independent of the library's own
//! oracles.

use bergtoric_core::christ::{log_q_lambda, ChristKernel, ChristOptions, ChristPoint, CoshPotential, Quadratic};
use bergtoric_core::christ::midpoint_factorization_check;
use bergtoric_core::diastasis::{decay_rate_target, diastasis_analytic, diastasis_same_orbit};
use bergtoric_core::kernel::{berezin, szego_diag, OrbitPoint};
use bergtoric_core::norms::{build_norm_table, compute_log_q};
use bergtoric_core::potential::{FubiniStudy, ProductPotential, SegmentFactor};
use bergtoric_core::{DelzantPolytope, QuadratureOptions};
use std::f64::consts::PI;

const LN_5_OVER_4: f64 = 0.22314355131420976;
const COSH_DEFICIT_0_1: f64 = 0.143_914_352_201_241;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn fs_norms() {
    let fs = FubiniStudy::new(1);
    let opts = QuadratureOptions::default();
    // 2!·2!/5! and 0!·4!/5!
    assert!(close(compute_log_q(&fs, 4, &[2], &opts).unwrap().log_q, (1.0f64 / 30.0).ln(), 1e-10));
    assert!(close(compute_log_q(&fs, 4, &[0], &opts).unwrap().log_q, (0.2f64).ln(), 1e-10));
    let fs2 = FubiniStudy::new(2);
    // 1!·1!·0!/4!
    assert!(close(compute_log_q(&fs2, 2, &[1, 1], &opts).unwrap().log_q, (1.0f64 / 24.0).ln(), 1e-10));
}

#[test]
fn segment_norm() {
    // [0,2] at k = 1, α = 1: 2·B(2,2) = 1/3
    let p = ProductPotential::new(vec![SegmentFactor { lo: 0, hi: 2 }]).unwrap();
    let e = compute_log_q(&p, 1, &[1], &QuadratureOptions::default()).unwrap();
    assert!(close(e.log_q, (1.0f64 / 3.0).ln(), 1e-10));
}

#[test]
fn worked_pair() {
    let fs = FubiniStudy::new(1);
    let t = build_norm_table(&fs, 8, &QuadratureOptions::default()).unwrap();
    let z = OrbitPoint::new(vec![0.0], vec![1.0]);
    let w = OrbitPoint::new(vec![9f64.ln()], vec![1.0]);
    assert!(close(berezin(&t, &z, &w), 0.4096, 1e-10));
    assert!(close(diastasis_same_orbit(&fs, &z.rho, &w.rho).value, LN_5_OVER_4, 1e-14));
    assert!(close(decay_rate_target(&fs, &z, &w), 0.5 * LN_5_OVER_4, 1e-14));
    // Π_8(z,z) = 9!/8!
    assert!(close(szego_diag(&t, &fs, &z), 9.0, 1e-9));
}

#[test]
fn fs2_szego_diagonal() {
    let fs = FubiniStudy::new(2);
    let t = build_norm_table(&fs, 4, &QuadratureOptions::default()).unwrap();
    for rho in [[0.0, 0.0], [1.5, -2.0]] {
        assert!(close(szego_diag(&t, &fs, &OrbitPoint::real(rho.to_vec())), 30.0, 1e-9));
    }
}

#[test]
fn antipodal_diastasis() {
    let fs = FubiniStudy::new(1);
    let z = OrbitPoint::new(vec![0.0], vec![0.0]);
    let w = OrbitPoint::new(vec![0.0], vec![PI]);
    assert_eq!(diastasis_analytic(&fs, &z, &w).unwrap().value, f64::INFINITY);
    assert_eq!(decay_rate_target(&fs, &z, &w), 0.0);
}

#[test]
fn lattice_counts() {
    assert_eq!(DelzantPolytope::segment(0, 1).lattice_points(3).unwrap().len(), 4);
    assert_eq!(DelzantPolytope::simplex(2).lattice_points(2).unwrap().len(), 6);
    assert_eq!(DelzantPolytope::simplex(3).lattice_points(4).unwrap().len(), 35);
}

#[test]
fn gaussian_norm_at_origin() {
    let (l, _) = log_q_lambda(&Quadratic { dim: 1 }, 1.0, &[0.0], 1e-10).unwrap();
    assert!(close(l, 1.7724538509055159f64.ln(), 1e-10));
}

#[test]
fn cosh_deficit() {
    let c = CoshPotential { dim: 1 };
    let pts = [ChristPoint::new(vec![0.0], vec![0.0]), ChristPoint::new(vec![1.0], vec![0.0])];
    let k = ChristKernel::new(&c, 2.0, &pts, &ChristOptions::default()).unwrap();
    let r = midpoint_factorization_check(&k, &[0.0], &[1.0], &[0.0]).unwrap();
    assert!(close(r.deficit, COSH_DEFICIT_0_1, 1e-14));
}
