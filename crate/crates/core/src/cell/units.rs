//! Link quality and unit conversions (dB, dBm, users per cell).

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Shannon spectral efficiency `log2(1 + sinr)` in bits/s/Hz.
pub fn spectral_efficiency<T: Real>(sinr: T) -> T {
    sinr.ln_1p() / T::LN_2()
}

/// `W log2(1 + sinr)` in bits/s.
pub fn throughput<T: Real>(sinr: T, bandwidth_hz: T) -> T {
    bandwidth_hz * spectral_efficiency(sinr)
}

/// Linear SINR needed for a spectral efficiency: `2^se - 1`.
pub fn sinr_for_se<T: Real>(se: T) -> T {
    (se * T::LN_2()).exp_m1()
}

pub fn watts_to_dbm<T: Real>(watts: T) -> Result<T> {
    if !(watts > T::zero()) {
        return Err(Error::Domain(format!(
            "dBm conversion needs a positive power, got {} W",
            to_f64(watts)
        )));
    }
    Ok(lit::<T>(10.0) * (watts * lit(1000.0)).log10())
}

pub fn dbm_to_watts<T: Real>(dbm: T) -> T {
    lit::<T>(10.0).powf(dbm / lit(10.0)) / lit(1000.0)
}

pub fn db_to_linear<T: Real>(db: T) -> T {
    lit::<T>(10.0).powf(db / lit(10.0))
}

pub fn linear_to_db<T: Real>(x: T) -> T {
    lit::<T>(10.0) * x.log10()
}

/// Uniform density of `users` spread over the annulus `[min_distance, radius]`.
pub fn density_from_users_per_cell<T: Real>(users: T, radius: T, min_distance: T) -> T {
    users / (T::PI() * (radius * radius - min_distance * min_distance))
}

/// Rate figures reachable at a given SINR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkQoS<T> {
    pub sinr: T,
    /// bits/s/Hz
    pub se: T,
    /// Hz
    pub bandwidth: T,
    /// bits/s
    pub throughput: T,
}

impl<T: Real> LinkQoS<T> {
    pub fn new(sinr: T, bandwidth: T) -> Self {
        let se = spectral_efficiency(sinr);
        LinkQoS {
            sinr,
            se,
            bandwidth,
            throughput: bandwidth * se,
        }
    }
}
