use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed polytope data or a polytope that fails the Delzant checks.
    InvalidPolytope(String),
    /// The bounding box of `kP` holds more integer points than the budget allows.
    EnumerationBudget { k: u32, box_points: u128, budget: u64 },
    DimensionMismatch { expected: usize, found: usize },
    /// A point that must lie strictly inside the polytope does not.
    NotInterior { margin: f64 },
    NoConvergence { what: &'static str, iterations: usize, residual: f64 },
    /// The log-integrand does not decay on the box faces within the box budget.
    TailNotDecaying { half_width: f64 },
    /// Adaptive quadrature could not reach the requested relative tolerance.
    ToleranceUnmet { achieved: f64, requested: f64 },
    /// A potential fails positivity of its Hessian.
    NotPositiveDefinite { min_eigenvalue: f64, at: Vec<f64>, ratio: f64 },
    UnsupportedMethod(&'static str),
    AlphaOutsideDilate { alpha: Vec<i64>, k: u32 },
    RankDeficient,
    TooFewPoints { needed: usize, found: usize },
    /// A norm computation failed for the lattice point `alpha`.
    Norm { alpha: Vec<i64>, k: u32, source: Box<Error> },
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidPolytope(msg) => write!(f, "invalid polytope: {msg}"),
            Error::EnumerationBudget { k, box_points, budget } => write!(
                f,
                "dilate k = {k} has {box_points} bounding-box points, over the budget of {budget}"
            ),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotInterior { margin } => {
                write!(f, "point is not interior to the polytope (margin {margin:e})")
            }
            Error::NoConvergence { what, iterations, residual } => write!(
                f,
                "{what} did not converge in {iterations} iterations (residual {residual:e})"
            ),
            Error::TailNotDecaying { half_width } => write!(
                f,
                "integrand tail not decaying within box half-width {half_width}"
            ),
            Error::ToleranceUnmet { achieved, requested } => write!(
                f,
                "quadrature reached relative error {achieved:e}, requested {requested:e}"
            ),
            Error::NotPositiveDefinite { min_eigenvalue, at, ratio } => write!(
                f,
                "Hessian not positive enough: eigenvalue {min_eigenvalue:e} at {at:?} \
                 (ratio to reference {ratio})"
            ),
            Error::UnsupportedMethod(what) => write!(f, "unsupported method: {what}"),
            Error::AlphaOutsideDilate { alpha, k } => {
                write!(f, "lattice point {alpha:?} is not in the dilate k = {k}")
            }
            Error::RankDeficient => write!(f, "rank-deficient least-squares design"),
            Error::TooFewPoints { needed, found } => {
                write!(f, "need at least {needed} finite points, found {found}")
            }
            Error::Norm { alpha, k, source } => {
                write!(f, "norm of alpha = {alpha:?} at k = {k}: {source}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Norm { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
