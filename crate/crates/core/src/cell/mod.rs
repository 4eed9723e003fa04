//! Continuum model of one cell: parameters, derived coefficients and the
//! closed-form power expressions.

mod params;
mod power;
mod units;

pub use params::{CellParams, Coefficients};
pub use power::{
    bs_power_no_sic, bs_power_sic, bs_power_sic_asymptotic, bs_power_sic_gamma_form,
    bs_power_sic_unnormalized_gamma_form, per_user_power, total_power, PowerModel,
};
pub use units::{
    db_to_linear, dbm_to_watts, density_from_users_per_cell, linear_to_db, sinr_for_se,
    spectral_efficiency, throughput, watts_to_dbm, LinkQoS,
};
