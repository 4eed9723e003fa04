use thiserror::Error;

/// Errors raised by the numerical kernel, the cell model, the discrete
/// oracle and the planner.
///
/// Numeric payloads are widened to `f64` so the type does not depend on the
/// scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    QuadratureNoConvergence {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("root finder did not converge after {iterations} iterations (last x = {x:e})")]
    RootNoConvergence { iterations: usize, x: f64 },

    #[error("root not bracketed: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    NotBracketed {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("distance {r} m outside the cell [{r0}, {rc}] m")]
    OutsideCell { r: f64, r0: f64, rc: f64 },

    #[error("gamma form requires a zero minimum distance (got {r0} m); use the quadrature form")]
    UnsupportedForm { r0: f64 },

    #[error(
        "no finite power reaches the SINR target without SIC: load pi*rho*area = {load} >= zeta = {zeta} \
         (critical density {critical_density:e} users/m^2, critical linear SINR {critical_sinr})"
    )]
    Infeasible {
        load: f64,
        zeta: f64,
        critical_density: f64,
        /// `inf` when the load is at most one user, i.e. every SINR is reachable.
        critical_sinr: f64,
    },

    #[error("user set is empty")]
    EmptyUserSet,

    #[error("allocation mode {found} does not match requested {expected}")]
    ModeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("no coverage: {0}")]
    NoCoverage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
