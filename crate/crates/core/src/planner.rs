//! Inversions of the total-power expressions for dimensioning questions:
//! coverage radius, reachable spectral efficiency and user density under a
//! power budget, plus noise calibration and power-vs-SE sweeps.

use std::fmt;

use crate::cell::{
    dbm_to_watts, density_from_users_per_cell, sinr_for_se, spectral_efficiency, total_power,
    watts_to_dbm, CellParams, PowerModel,
};
use crate::error::{Error, Result};
use crate::numerics::{find_root_with, Tolerance};
use crate::scalar::{lit, to_f64, Real};

const MAX_EXPANSIONS: usize = 2000;

fn plan_tolerance<T: Real>() -> Tolerance<T> {
    let floor = T::epsilon() * lit(64.0);
    Tolerance {
        rel: lit::<T>(1e-12).max(floor),
        abs: lit::<T>(1e-12).max(floor),
        max_iter: 300,
    }
}

/// How the user population scales when the cell radius changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensitySpec<T> {
    /// Fixed density in users/m².
    PerSquareMeter(T),
    /// Fixed number of users in the cell; the density follows the area.
    UsersPerCell(T),
}

impl<T: Real> DensitySpec<T> {
    fn density(&self, radius: T, min_distance: T) -> T {
        match *self {
            DensitySpec::PerSquareMeter(rho) => rho,
            DensitySpec::UsersPerCell(n) => density_from_users_per_cell(n, radius, min_distance),
        }
    }

    fn value(&self) -> T {
        match *self {
            DensitySpec::PerSquareMeter(v) | DensitySpec::UsersPerCell(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanQuantity {
    CoverageRadius,
    MaxSpectralEfficiency,
    MaxDensity,
    Noise,
}

impl PlanQuantity {
    pub fn unit(self) -> &'static str {
        match self {
            PlanQuantity::CoverageRadius => "m",
            PlanQuantity::MaxSpectralEfficiency => "bits/s/Hz",
            PlanQuantity::MaxDensity => "users/m^2",
            PlanQuantity::Noise => "W",
        }
    }
}

impl fmt::Display for PlanQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlanQuantity::CoverageRadius => "coverage_radius_m",
            PlanQuantity::MaxSpectralEfficiency => "max_se",
            PlanQuantity::MaxDensity => "max_density",
            PlanQuantity::Noise => "noise_watts",
        })
    }
}

/// Result of an inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanAnswer<T> {
    pub quantity: PlanQuantity,
    /// In the unit of `quantity`; `+inf` when the quantity is unbounded.
    pub value: T,
    /// Search interval handed to the root finder (in the quantity's unit).
    pub bracket: (T, T),
    /// `|P(value) / budget - 1|` at the solution, or the dB residual for
    /// noise calibration.
    pub residual: T,
}

impl<T: Real> PlanAnswer<T> {
    pub fn is_unbounded(&self) -> bool {
        self.value.is_infinite()
    }

    fn unbounded(quantity: PlanQuantity) -> Self {
        PlanAnswer {
            quantity,
            value: T::infinity(),
            bracket: (T::zero(), T::infinity()),
            residual: T::zero(),
        }
    }
}

fn check_budget<T: Real>(budget: T) -> Result<()> {
    if budget > T::zero() && budget.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field: "budget",
            reason: format!("must be finite and > 0, got {} W", to_f64(budget)),
        })
    }
}

// P / budget - 1, with infeasible no-SIC points mapped to +inf.
fn budget_gap<T: Real>(p: &CellParams<T>, model: PowerModel, budget: T) -> Result<T> {
    match total_power(p, model) {
        Ok(w) => Ok(w / budget - T::one()),
        Err(Error::Infeasible { .. }) => Ok(T::infinity()),
        Err(e) => Err(e),
    }
}

/// Total no-SIC power as `gamma* -> inf`, finite only when fewer than one
/// user is expected in the cell.
fn no_sic_limit<T: Real>(p: &CellParams<T>) -> Result<T> {
    let mut q = *p;
    q.sinr_target = T::max_value();
    total_power(&q, PowerModel::NoSic)
}

/// Largest radius whose total power stays within `budget`.
///
/// `template.radius` is only used as the starting point of the bracket
/// search; its density field is replaced according to `density`.
pub fn max_coverage_radius<T: Real>(
    template: &CellParams<T>,
    density: DensitySpec<T>,
    budget: T,
    model: PowerModel,
) -> Result<PlanAnswer<T>> {
    check_budget(budget)?;
    template.validate()?;
    if !(density.value() > T::zero()) {
        return Err(Error::InvalidParameter {
            field: "density",
            reason: "coverage planning needs a positive user density".into(),
        });
    }
    let r0 = template.min_distance;
    let at = |radius: T| {
        let mut p = *template;
        p.radius = radius;
        p.density = density.density(radius, r0);
        p
    };
    let f = |radius: T| budget_gap(&at(radius), model, budget);
    let two: T = lit(2.0);

    let mut wall = T::infinity();
    if model == PowerModel::NoSic {
        let zeta = template.coefficients().zeta;
        match density {
            DensitySpec::UsersPerCell(n) => {
                if !(n < zeta) {
                    return Err(Error::NoCoverage(format!(
                        "{} users per cell exceed zeta = {} without SIC at any radius",
                        to_f64(n),
                        to_f64(zeta)
                    )));
                }
            }
            DensitySpec::PerSquareMeter(rho) => {
                wall = (zeta / (T::PI() * rho) + r0 * r0).sqrt();
            }
        }
    }

    let mut hi = template.radius.min(wall);
    let mut lo;
    if f(hi)? <= T::zero() {
        let mut expansions = 0;
        loop {
            lo = hi;
            if wall.is_finite() && hi >= wall {
                // power diverges only at the wall itself
                return Ok(PlanAnswer {
                    quantity: PlanQuantity::CoverageRadius,
                    value: wall,
                    bracket: (r0, wall),
                    residual: T::zero(),
                });
            }
            hi = (hi * two).min(wall);
            if f(hi)? > T::zero() {
                break;
            }
            expansions += 1;
            if expansions > MAX_EXPANSIONS || !hi.is_finite() {
                return Err(Error::NoCoverage(
                    "power stays below budget at every radius".into(),
                ));
            }
        }
    } else {
        let mut expansions = 0;
        loop {
            let mid = r0 + (hi - r0) / two;
            if mid <= r0 {
                return Err(Error::NoCoverage(
                    "budget below the power of every representable radius above the minimum distance"
                        .into(),
                ));
            }
            if f(mid)? <= T::zero() {
                lo = mid;
                break;
            }
            hi = mid;
            expansions += 1;
            if expansions > MAX_EXPANSIONS {
                return Err(Error::NoCoverage(
                    "budget below the power needed at the minimum radius".into(),
                ));
            }
        }
    }

    let radius = find_root_with(f, lo, hi, plan_tolerance())?;
    Ok(PlanAnswer {
        quantity: PlanQuantity::CoverageRadius,
        value: radius,
        bracket: (lo, hi),
        residual: f(radius)?.abs(),
    })
}

/// Highest spectral efficiency sustainable for every user within `budget`.
///
/// Returns an unbounded answer when the budget covers the `gamma* -> inf`
/// limit of the total power.
pub fn max_spectral_efficiency<T: Real>(
    p: &CellParams<T>,
    budget: T,
    model: PowerModel,
) -> Result<PlanAnswer<T>> {
    check_budget(budget)?;
    p.validate()?;
    let q = PlanQuantity::MaxSpectralEfficiency;

    // search in x = ln gamma*
    let at = |x: T| {
        let mut c = *p;
        c.sinr_target = x.exp();
        c
    };
    let mut x_max = lit::<T>(700.0).min(T::max_value().ln() - T::one());
    match model {
        PowerModel::Sic => {
            if crate::cell::bs_power_sic_asymptotic(p)? <= budget {
                return Ok(PlanAnswer::unbounded(q));
            }
        }
        PowerModel::NoSic => {
            let load = p.users_per_cell();
            if load > T::one() {
                x_max = x_max.min(-(load - T::one()).ln());
            } else if no_sic_limit(p)? <= budget {
                return Ok(PlanAnswer::unbounded(q));
            }
        }
        PowerModel::SicAsymptote => {
            return Err(Error::InvalidParameter {
                field: "model",
                reason: "the asymptotic power does not depend on the SINR target".into(),
            })
        }
    }
    let f = |x: T| budget_gap(&at(x), model, budget);
    let step: T = lit(2.0);
    let x_min = -x_max
        .abs()
        .max(lit(700.0))
        .min(-(T::min_positive_value().ln()) - T::one());

    let mut lo = T::zero().min(x_max - step);
    let mut expansions = 0;
    while f(lo)? > T::zero() {
        lo = lo - step;
        expansions += 1;
        if lo < x_min || expansions > MAX_EXPANSIONS {
            return Ok(PlanAnswer {
                quantity: q,
                value: T::zero(),
                bracket: (T::zero(), T::zero()),
                residual: T::zero(),
            });
        }
    }
    let mut hi = (lo + step).min(x_max);
    while f(hi)? <= T::zero() {
        if hi >= x_max {
            return Ok(PlanAnswer::unbounded(q));
        }
        lo = hi;
        hi = (hi + step).min(x_max);
    }
    let x = find_root_with(f, lo, hi, plan_tolerance())?;
    let se = |x: T| spectral_efficiency(x.exp());
    Ok(PlanAnswer {
        quantity: q,
        value: se(x),
        bracket: (se(lo), se(hi)),
        residual: f(x)?.abs(),
    })
}

/// Highest uniform user density (users/m²) servable within `budget`.
pub fn max_density<T: Real>(
    p: &CellParams<T>,
    budget: T,
    model: PowerModel,
) -> Result<PlanAnswer<T>> {
    check_budget(budget)?;
    p.validate()?;
    let at = |rho: T| {
        let mut c = *p;
        c.density = rho;
        c
    };
    let f = |rho: T| budget_gap(&at(rho), model, budget);
    let one_user = density_from_users_per_cell(T::one(), p.radius, p.min_distance);
    let wall = if model == PowerModel::NoSic {
        p.coefficients().zeta * one_user
    } else {
        T::infinity()
    };

    let mut lo = T::zero();
    let mut hi = one_user.min(wall);
    let mut expansions = 0;
    while f(hi)? <= T::zero() {
        if hi >= wall {
            return Ok(PlanAnswer {
                quantity: PlanQuantity::MaxDensity,
                value: wall,
                bracket: (T::zero(), wall),
                residual: T::zero(),
            });
        }
        lo = hi;
        hi = (hi * lit(2.0)).min(wall);
        expansions += 1;
        if expansions > MAX_EXPANSIONS || !hi.is_finite() {
            return Ok(PlanAnswer::unbounded(PlanQuantity::MaxDensity));
        }
    }
    let rho = find_root_with(f, lo, hi, plan_tolerance())?;
    Ok(PlanAnswer {
        quantity: PlanQuantity::MaxDensity,
        value: rho,
        bracket: (lo, hi),
        residual: f(rho)?.abs(),
    })
}

/// One measured operating point: a cell described by users per cell, radius
/// and spectral efficiency, with the BS power it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationAnchor<T> {
    pub se: T,
    pub users_per_cell: T,
    pub radius: T,
    pub power_dbm: T,
}

impl<T: Real> CalibrationAnchor<T> {
    /// Cell matching the anchor with `R_0 = 0` and the given noise.
    pub fn cell(&self, pathloss_constant: T, pathloss_exponent: T, noise: T) -> CellParams<T> {
        CellParams {
            radius: self.radius,
            min_distance: T::zero(),
            pathloss_exponent,
            pathloss_constant,
            noise,
            density: T::zero(),
            sinr_target: sinr_for_se(self.se),
        }
        .with_users_per_cell(self.users_per_cell)
    }
}

/// Noise power that makes the SIC total match the anchor power.
///
/// The total is proportional to the noise, so a single evaluation at unit
/// noise suffices. `residual` is the forward-model mismatch in dB.
pub fn calibrate_noise<T: Real>(
    anchor: &CalibrationAnchor<T>,
    pathloss_constant: T,
    pathloss_exponent: T,
) -> Result<PlanAnswer<T>> {
    let target = dbm_to_watts(anchor.power_dbm);
    check_budget(target)?;
    let unit = anchor.cell(pathloss_constant, pathloss_exponent, T::one());
    let unit_power = total_power(&unit, PowerModel::Sic)?;
    if !(unit_power > T::zero()) {
        return Err(Error::InvalidParameter {
            field: "users_per_cell",
            reason: "calibration anchor needs users in the cell".into(),
        });
    }
    let noise = target / unit_power;
    let residual = anchor_residual_db(anchor, pathloss_constant, pathloss_exponent, noise)?;
    Ok(PlanAnswer {
        quantity: PlanQuantity::Noise,
        value: noise,
        bracket: (noise, noise),
        residual: residual.abs(),
    })
}

/// Forward SIC power at the anchor minus the anchor power, in dB.
pub fn anchor_residual_db<T: Real>(
    anchor: &CalibrationAnchor<T>,
    pathloss_constant: T,
    pathloss_exponent: T,
    noise: T,
) -> Result<T> {
    let cell = anchor.cell(pathloss_constant, pathloss_exponent, noise);
    Ok(watts_to_dbm(total_power(&cell, PowerModel::Sic)?)? - anchor.power_dbm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPoint<T> {
    pub se: T,
    pub sinr: T,
    /// `+inf` when infeasible.
    pub power_w: T,
    /// `-inf` for zero power, `+inf` when infeasible.
    pub power_dbm: T,
    pub feasible: bool,
}

/// Total power sampled along a spectral-efficiency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve<T> {
    pub points: Vec<PowerPoint<T>>,
    /// Cell used for every point; only the SINR target varies.
    pub params: CellParams<T>,
    pub model: PowerModel,
}

pub(crate) fn power_dbm_or_inf<T: Real>(w: T) -> T {
    if w == T::zero() {
        T::neg_infinity()
    } else if w.is_infinite() {
        T::infinity()
    } else {
        watts_to_dbm(w).unwrap_or(T::nan())
    }
}

/// Evaluates the total power at `gamma* = 2^se - 1` for each grid point.
/// Infeasible no-SIC points are kept and flagged.
pub fn sweep_power_vs_se<T: Real>(
    p: &CellParams<T>,
    se_grid: &[T],
    model: PowerModel,
) -> Result<PowerCurve<T>> {
    p.validate()?;
    let increasing = se_grid.windows(2).all(|w| w[0] < w[1]);
    if se_grid.is_empty() || !increasing || !(se_grid[0] > T::zero()) {
        return Err(Error::InvalidParameter {
            field: "se_grid",
            reason: "must be non-empty, positive and strictly increasing".into(),
        });
    }
    let points = se_grid
        .iter()
        .map(|&se| {
            let sinr = sinr_for_se(se);
            let mut c = *p;
            c.sinr_target = sinr;
            let (power_w, feasible) = match total_power(&c, model) {
                Ok(w) => (w, true),
                Err(Error::Infeasible { .. }) => (T::infinity(), false),
                Err(e) => return Err(e),
            };
            Ok(PowerPoint {
                se,
                sinr,
                power_w,
                power_dbm: power_dbm_or_inf(power_w),
                feasible,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerCurve {
        points,
        params: *p,
        model,
    })
}

/// Evenly spaced grid `se_min..=se_max` with `steps` points.
pub fn linear_grid<T: Real>(se_min: T, se_max: T, steps: usize) -> Vec<T> {
    if steps == 1 {
        return vec![se_min];
    }
    let step = (se_max - se_min) / lit((steps - 1) as f64);
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                se_max
            } else {
                se_min + step * lit(i as f64)
            }
        })
        .collect()
}
