//! # bergtoric-core
//!
//! Numerical core for Bergman, Szegő and Berezin kernels of positive toric
//! Hermitian line bundles, and for their off-diagonal exponential decay.
//!
//! On the open orbit of a toric Kähler manifold a point is written
//! `z = exp(ρ/2 + iθ)`, the Kähler potential becomes a strictly convex
//! function `φ̃(ρ)` whose gradient is the moment map onto a Delzant polytope
//! `P`, and the Bergman kernel of `L^k` is the finite lattice sum
//!
//! ```text
//! B_k(z, w) = Σ_{α ∈ kP ∩ ℤ^m} exp(⟨α, (ρ₁+ρ₂)/2⟩ + i⟨α, θ₁−θ₂⟩) / Q_k(α)
//! Q_k(α)    = ∫ exp(⟨α,ρ⟩ − kφ̃(ρ)) det Hess φ̃(ρ) dρ
//! ```
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`polytope`] | facet data, Delzant validation, lattice points of `kP` |
//! | [`potential`] | toric potentials, moment map, Legendre inversion, convexity checks |
//! | [`norms`] | log-domain quadrature of the monomial norms `Q_k(α)` |
//! | [`kernel`] | overflow-free lattice sums, Berezin kernel, midpoint identity |
//! | [`diastasis`] | Calabi diastasis (same-orbit, analytic continuation, star-projected) |
//! | [`decay`] | finite-k decay rates, asymptotic fits, upper-bound checks |
//! | [`christ`] | the non-compact variant with potentials depending on `Re z` only |
//! | [`oracles`] | closed forms: Fubini–Study, Dirichlet norms, Gaussian kernels |
//!
//! Everything here is pure computation; file formats, caching and the
//! command line live in the `bergtoric` crate.

#![no_std]
#![forbid(unsafe_code)]
// when anything in the build graph links std, f64 gains inherent math methods
// and the `num_traits::Float` imports become redundant
#![allow(unused_imports)]

extern crate alloc;

pub mod christ;
pub mod decay;
pub mod diastasis;
mod error;
pub mod kernel;
pub mod linalg;
pub mod norms;
pub mod numerics;
pub mod oracles;
pub mod polytope;
pub mod potential;
pub mod quadrature;
pub mod spline;

pub use error::{Error, Result};
pub use kernel::{LogComplex, OrbitPoint};
pub use norms::{NormEntry, NormTable, QuadratureOptions};
pub use polytope::{DelzantPolytope, Facet, LatticePointSet};
pub use potential::{builtin, PotentialSpec, ToricPotential};
