use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Physical description of a single cell.
///
/// All quantities are linear SI: meters, watts, users/m². The SINR target is
/// linear, not dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellParams<T> {
    /// Cell radius `R_c` (m).
    pub radius: T,
    /// Minimum BS-user distance `R_0` (m).
    pub min_distance: T,
    /// Pathloss exponent `eta`.
    pub pathloss_exponent: T,
    /// Pathloss constant `K` in `g = K r^-eta`.
    pub pathloss_constant: T,
    /// Thermal noise power (W).
    pub noise: T,
    /// User density `rho` (users/m²).
    pub density: T,
    /// Linear SINR target `gamma*`.
    pub sinr_target: T,
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

impl<T: Real> CellParams<T> {
    /// Checks every parameter invariant.
    ///
    /// `eta >= 2` is accepted (free-space exponent included); smaller
    /// exponents are rejected.
    pub fn validate(&self) -> Result<()> {
        let finite = |field, v: T| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be finite, got {}", to_f64(v))))
            }
        };
        finite("radius", self.radius)?;
        finite("min_distance", self.min_distance)?;
        finite("pathloss_exponent", self.pathloss_exponent)?;
        finite("pathloss_constant", self.pathloss_constant)?;
        finite("noise", self.noise)?;
        finite("density", self.density)?;
        finite("sinr_target", self.sinr_target)?;

        if !(self.min_distance >= T::zero()) {
            return Err(invalid("min_distance", "must be >= 0"));
        }
        if !(self.radius > self.min_distance) {
            return Err(invalid(
                "radius",
                format!(
                    "must exceed min_distance ({} <= {})",
                    to_f64(self.radius),
                    to_f64(self.min_distance)
                ),
            ));
        }
        if !(self.pathloss_exponent >= lit(2.0)) {
            return Err(invalid("pathloss_exponent", "must be >= 2"));
        }
        if !(self.pathloss_constant > T::zero()) {
            return Err(invalid("pathloss_constant", "must be > 0"));
        }
        if !(self.noise > T::zero()) {
            return Err(invalid("noise", "must be > 0"));
        }
        if !(self.density >= T::zero()) {
            return Err(invalid("density", "must be >= 0"));
        }
        if !(self.sinr_target > T::zero()) {
            return Err(invalid("sinr_target", "must be > 0"));
        }
        Ok(())
    }

    /// Sets the density from a user count spread over the annulus
    /// `[R_0, R_c]`.
    pub fn with_users_per_cell(mut self, users: T) -> Self {
        self.density = super::density_from_users_per_cell(users, self.radius, self.min_distance);
        self
    }

    /// Expected number of users in the annulus, `pi rho (R_c^2 - R_0^2)`.
    pub fn users_per_cell(&self) -> T {
        T::PI() * self.density * (self.radius * self.radius - self.min_distance * self.min_distance)
    }

    pub fn coefficients(&self) -> Coefficients<T> {
        Coefficients::from_params(self)
    }
}

/// Scalars derived from [`CellParams`] that recur in every closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients<T> {
    /// `(gamma* + 1) / gamma*`
    pub zeta: T,
    /// `2 pi rho / zeta` (1/m²)
    pub a: T,
    /// `N_th eta / (K zeta)`
    pub b: T,
    /// `pi rho R_c^2 / zeta`
    pub beta: T,
    /// `pi rho R_c^2`
    pub beta2: T,
    /// `N_th / K`
    pub c: T,
}

impl<T: Real> Coefficients<T> {
    pub fn from_params(p: &CellParams<T>) -> Self {
        let zeta = (p.sinr_target + T::one()) / p.sinr_target;
        let c = p.noise / p.pathloss_constant;
        let beta2 = T::PI() * p.density * p.radius * p.radius;
        Coefficients {
            zeta,
            a: lit::<T>(2.0) * T::PI() * p.density / zeta,
            b: c * p.pathloss_exponent / zeta,
            beta: beta2 / zeta,
            beta2,
            c,
        }
    }
}
