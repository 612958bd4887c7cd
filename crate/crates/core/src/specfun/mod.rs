//! Numerical kernels: Gaussian tail and its inverse, log-gamma, chi-square
//! survival function, and adaptive quadrature over uniform distributions.
//!
//! Everything here is double precision and pure.

mod gamma;
mod normal;
mod quadrature;

pub use gamma::{chi_square_sf, log_gamma};
pub use normal::{normal_pdf, q_function, q_inverse};
pub use quadrature::{uniform_expectation, QuadratureSpec};

use crate::error::{Error, Result};

/// Finds the root of a decreasing function on `[lo, hi]` by bisection.
///
/// Requires `f(lo) >= 0 >= f(hi)`. Stops when the bracket no longer shrinks
/// in floating point.
pub(crate) fn bisect_decreasing(
    mut f: impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64> {
    if !(f(lo) >= 0.0 && f(hi) <= 0.0) {
        return Err(Error::Convergence("bisection (root not bracketed)"));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence("bisection"))
}
