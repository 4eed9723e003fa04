//! Minimum downlink transmit power of a base station serving a continuum of
//! users with superposition coding, with and without successive
//! interference cancellation (SIC).
//!
//! The crate is generic over the scalar type (`f32` or `f64`, see
//! [`Real`]); the `*F64` / `*F32` aliases below fix it.
//!
//! ```
//! use noma_cell::{bs_power_sic, watts_to_dbm, CellParamsF64};
//!
//! let cell = CellParamsF64 {
//!     radius: 50.0,
//!     min_distance: 0.0,
//!     pathloss_exponent: 3.57,
//!     pathloss_constant: 2.66e-4,
//!     noise: 5.86e-13,
//!     density: 0.0,
//!     sinr_target: 31.0,
//! }
//! .with_users_per_cell(8.0);
//! let dbm = watts_to_dbm(bs_power_sic(&cell).unwrap()).unwrap();
//! assert!((dbm - 24.0).abs() < 0.01);
//! ```

// `!(x > 0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cell;
pub mod discrete;
pub mod error;
pub mod numerics;
pub mod planner;
mod scalar;

pub use cell::{
    bs_power_no_sic, bs_power_sic, bs_power_sic_asymptotic, bs_power_sic_gamma_form,
    bs_power_sic_unnormalized_gamma_form, db_to_linear, dbm_to_watts, density_from_users_per_cell,
    linear_to_db, per_user_power, sinr_for_se, spectral_efficiency, throughput, total_power,
    watts_to_dbm, CellParams, Coefficients, LinkQoS, PowerModel,
};
pub use discrete::{
    place_users_rings, place_users_uniform, solve_no_sic_allocation, solve_sic_allocation,
    verify_sinr, AllocationMode, AllocationResult, OracleParams, UserSet,
};
pub use error::{Error, Result};
pub use numerics::{
    find_root, find_root_with, integrate, lower_incomplete_gamma, upper_incomplete_gamma, Tolerance,
};
pub use planner::{
    anchor_residual_db, calibrate_noise, linear_grid, max_coverage_radius, max_density,
    max_spectral_efficiency, sweep_power_vs_se, CalibrationAnchor, DensitySpec, PlanAnswer,
    PlanQuantity, PowerCurve, PowerPoint,
};
pub use scalar::Real;

pub type CellParamsF64 = CellParams<f64>;
pub type CoefficientsF64 = Coefficients<f64>;
pub type UserSetF64 = UserSet<f64>;
pub type AllocationResultF64 = AllocationResult<f64>;
pub type OracleParamsF64 = OracleParams<f64>;
pub type PowerCurveF64 = PowerCurve<f64>;
pub type PlanAnswerF64 = PlanAnswer<f64>;
pub type ToleranceF64 = Tolerance<f64>;

pub type CellParamsF32 = CellParams<f32>;
pub type CoefficientsF32 = Coefficients<f32>;
pub type UserSetF32 = UserSet<f32>;
pub type AllocationResultF32 = AllocationResult<f32>;
pub type PowerCurveF32 = PowerCurve<f32>;
pub type ToleranceF32 = Tolerance<f32>;

/// Pathloss constant `K` of the reference urban scenario.
pub const REFERENCE_PATHLOSS_CONSTANT: f64 = 2.66e-4;
/// Pathloss exponent of the reference urban scenario.
pub const REFERENCE_PATHLOSS_EXPONENT: f64 = 3.57;
