//! Scalar helpers: log-sum-exp, angle reduction, Richardson extrapolation and
//! a seeded uniform sampler.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// `ln Σ exp(xᵢ)` with a single shift by the maximum. Empty input gives `-∞`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Reduces an angle to `[0, 2π)`.
pub fn angle_0_2pi(t: f64) -> f64 {
    let r = t - TAU * (t / TAU).floor();
    if r >= TAU || r < 0.0 {
        0.0
    } else {
        r
    }
}

/// Reduces an angle to `(-π, π]`.
pub fn angle_pm_pi(t: f64) -> f64 {
    let r = angle_0_2pi(t);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Extrapolates `f(h) → f(0)` from samples at geometrically shrinking steps
/// `h, h/ratio, h/ratio², …` assuming a full power series in `h`.
///
/// Neville's tableau evaluated at zero; the last diagonal entry is returned.
pub fn richardson(samples: &[f64], ratio: f64) -> f64 {
    let n = samples.len();
    let mut t: Vec<f64> = samples.to_vec();
    for level in 1..n {
        let factor = ratio.powi(level as i32);
        for i in (level..n).rev() {
            t[i] = (factor * t[i] - t[i - 1]) / (factor - 1.0);
        }
    }
    t[n - 1]
}

/// Deterministic uniform sampler used for randomized checks.
#[derive(Debug, Clone)]
pub struct Sampler(ChaCha8Rng);

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn vector(&mut self, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        lo.iter().zip(hi).map(|(&a, &b)| self.uniform(a, b)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_is_stable() {
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn angles() {
        assert_eq!(angle_0_2pi(-0.5), TAU - 0.5);
        assert!((angle_pm_pi(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(angle_pm_pi(PI), PI);
    }

    #[test]
    fn richardson_kills_polynomial_terms() {
        let f = |h: f64| 2.0 + 3.0 * h - h * h;
        let s = [f(0.1), f(0.05), f(0.025)];
        assert!((richardson(&s, 2.0) - 2.0).abs() < 1e-13);
    }
}
