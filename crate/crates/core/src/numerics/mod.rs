//! Numerical kernel: adaptive quadrature, incomplete gamma functions and
//! bracketed root finding.
//!
//! Everything here is a pure function of its arguments.

mod gamma;
mod quadrature;
mod root;

pub use gamma::{gamma, ln_gamma, lower_incomplete_gamma, upper_incomplete_gamma};
pub use quadrature::integrate;
pub use root::{find_root, find_root_with};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Stopping rule shared by the quadrature and the root finder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub rel: T,
    pub abs: T,
    pub max_iter: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn new(rel: T, abs: T, max_iter: usize) -> Result<Self> {
        let tol = Tolerance { rel, abs, max_iter };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel > T::zero()) {
            return Err(Error::InvalidTolerance("rel must be > 0"));
        }
        if !(self.abs >= T::zero()) {
            return Err(Error::InvalidTolerance("abs must be >= 0"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidTolerance("max_iter must be >= 1"));
        }
        Ok(())
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

impl<T: Real> Default for Tolerance<T> {
    /// rel = 1e-10, abs = 1e-14, max_iter = 60. For `f32` the relative
    /// tolerance is floored at 64 ulp.
    fn default() -> Self {
        let floor = T::epsilon() * lit(64.0);
        Tolerance {
            rel: lit::<T>(1e-10).max(floor),
            abs: lit(1e-14),
            max_iter: 60,
        }
    }
}
