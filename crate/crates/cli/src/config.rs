//! Scenario files (TOML) and their resolution into model parameters.

use std::path::Path;

use noma_cell::{
    calibrate_noise, db_to_linear, dbm_to_watts, density_from_users_per_cell, sinr_for_se,
    CalibrationAnchor, CellParamsF64, REFERENCE_PATHLOSS_CONSTANT, REFERENCE_PATHLOSS_EXPONENT,
};
use serde::Deserialize;

use crate::error::{bad, CliError};

/// Operating point used to derive the default noise power: SE 5 bits/s/Hz,
/// 8 users in a 50 m cell, 24 dBm.
pub const REFERENCE_ANCHOR: CalibrationAnchor<f64> = CalibrationAnchor {
    se: 5.0,
    users_per_cell: 8.0,
    radius: 50.0,
    power_dbm: 24.0,
};

/// Second operating point: SE 15 bits/s/Hz, 10 users per cell, 41 dBm.
/// Its radius is not known; 50 m is assumed.
pub const CROSS_CHECK_ANCHOR: CalibrationAnchor<f64> = CalibrationAnchor {
    se: 15.0,
    users_per_cell: 10.0,
    radius: 50.0,
    power_dbm: 41.0,
};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub cell: CellSection,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSection {
    pub radius_m: Option<f64>,
    pub min_distance_m: Option<f64>,
    pub pathloss_exponent: Option<f64>,
    pub pathloss_constant: Option<f64>,
    pub noise_dbm: Option<f64>,
    pub users_per_cell: Option<f64>,
    pub density_per_m2: Option<f64>,
    pub sinr_target_db: Option<f64>,
    pub se_target: Option<f64>,
    pub bandwidth_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub n_users: Option<usize>,
    pub seed: Option<u64>,
    pub placement: Option<Placement>,
    pub mode: Option<Mode>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Uniform,
    Rings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sic,
    Nosic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Table,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| bad(&path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::BadInput(format!("config: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityInput {
    UsersPerCell(f64),
    PerSquareMeter(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSource {
    Configured,
    /// Derived from [`REFERENCE_ANCHOR`] with the scenario's K and eta.
    Calibrated,
}

/// Fully validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub cell: CellParamsF64,
    pub density_input: DensityInput,
    pub noise_source: NoiseSource,
    pub bandwidth_hz: Option<f64>,
    pub n_users: usize,
    pub seed: u64,
    pub placement: Placement,
    pub mode: Mode,
    pub format: Option<Format>,
    pub out: Option<std::path::PathBuf>,
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(bad(field, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(bad(field, format!("must be finite and >= 0, got {v}")))
    }
}

impl ScenarioConfig {
    /// Validates units and fills defaults.
    pub fn resolve(&self) -> Result<Scenario, CliError> {
        let c = &self.cell;
        let radius = positive("cell.radius_m", c.radius_m.unwrap_or(50.0))?;
        let min_distance = non_negative("cell.min_distance_m", c.min_distance_m.unwrap_or(0.0))?;
        if min_distance >= radius {
            return Err(bad(
                "cell.min_distance_m",
                "must be smaller than cell.radius_m",
            ));
        }
        let eta = c.pathloss_exponent.unwrap_or(REFERENCE_PATHLOSS_EXPONENT);
        if !(eta.is_finite() && eta >= 2.0) {
            return Err(bad(
                "cell.pathloss_exponent",
                format!("must be >= 2, got {eta}"),
            ));
        }
        let k = positive(
            "cell.pathloss_constant",
            c.pathloss_constant.unwrap_or(REFERENCE_PATHLOSS_CONSTANT),
        )?;

        let density_input = match (c.users_per_cell, c.density_per_m2) {
            (Some(_), Some(_)) => {
                return Err(bad(
                    "cell.users_per_cell",
                    "give exactly one of users_per_cell / density_per_m2",
                ))
            }
            (Some(n), None) => DensityInput::UsersPerCell(non_negative("cell.users_per_cell", n)?),
            (None, Some(rho)) => {
                DensityInput::PerSquareMeter(non_negative("cell.density_per_m2", rho)?)
            }
            (None, None) => DensityInput::UsersPerCell(8.0),
        };
        let density = match density_input {
            DensityInput::UsersPerCell(n) => density_from_users_per_cell(n, radius, min_distance),
            DensityInput::PerSquareMeter(rho) => rho,
        };

        let sinr = match (c.sinr_target_db, c.se_target) {
            (Some(_), Some(_)) => {
                return Err(bad(
                    "cell.sinr_target_db",
                    "give exactly one of sinr_target_db / se_target",
                ))
            }
            (Some(db), None) => {
                if !db.is_finite() {
                    return Err(bad("cell.sinr_target_db", "must be finite"));
                }
                db_to_linear(db)
            }
            (None, Some(se)) => sinr_for_se(positive("cell.se_target", se)?),
            (None, None) => sinr_for_se(5.0),
        };
        if !(sinr > 0.0 && sinr.is_finite()) {
            return Err(bad(
                "cell.sinr_target",
                "resolved SINR must be finite and > 0",
            ));
        }

        let (noise, noise_source) = match c.noise_dbm {
            Some(dbm) if dbm.is_finite() => (dbm_to_watts(dbm), NoiseSource::Configured),
            Some(dbm) => return Err(bad("cell.noise_dbm", format!("must be finite, got {dbm}"))),
            None => (
                calibrate_noise(&REFERENCE_ANCHOR, k, eta)?.value,
                NoiseSource::Calibrated,
            ),
        };
        let bandwidth_hz = c
            .bandwidth_hz
            .map(|w| positive("cell.bandwidth_hz", w))
            .transpose()?;

        let s = &self.simulation;
        let n_users = s.n_users.unwrap_or(8);
        if n_users == 0 {
            return Err(bad("simulation.n_users", "must be >= 1"));
        }

        let cell = CellParamsF64 {
            radius,
            min_distance,
            pathloss_exponent: eta,
            pathloss_constant: k,
            noise,
            density,
            sinr_target: sinr,
        };
        cell.validate()?;
        Ok(Scenario {
            cell,
            density_input,
            noise_source,
            bandwidth_hz,
            n_users,
            seed: s.seed.unwrap_or(1),
            placement: s.placement.unwrap_or(Placement::Rings),
            mode: s.mode.unwrap_or(Mode::Sic),
            format: self.output.format,
            out: self.output.path.clone(),
        })
    }
}
