//! Command-line front end for the `noma-cell` model.
//!
//! Exit codes: 0 success, 1 validation failure, 2 bad input, 3 infeasible
//! planning request.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Format, Mode, Placement, ScenarioConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "noma-cell",
    version,
    about = "Downlink BS power with superposition coding"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Scenario file (TOML)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the primary output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    pub radius_m: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub min_distance_m: Option<f64>,
    #[arg(long = "eta", global = true, allow_hyphen_values = true)]
    pub pathloss_exponent: Option<f64>,
    #[arg(long = "k", global = true, allow_hyphen_values = true)]
    pub pathloss_constant: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub noise_dbm: Option<f64>,
    #[arg(
        long,
        global = true,
        allow_hyphen_values = true,
        conflicts_with = "density_per_m2"
    )]
    pub users_per_cell: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub density_per_m2: Option<f64>,
    /// Spectral efficiency target (bits/s/Hz)
    #[arg(
        long = "se",
        global = true,
        allow_hyphen_values = true,
        conflicts_with = "sinr_db"
    )]
    pub se_target: Option<f64>,
    /// SINR target (dB)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sinr_db: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub bandwidth_hz: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Total BS power with SIC, its asymptote and the no-SIC power
    Power,
    /// Power versus spectral efficiency as CSV
    Sweep(SweepArgs),
    /// Largest cell radius within a power budget
    Coverage(CoverageArgs),
    /// Highest spectral efficiency within a power budget
    Qos(PlanArgs),
    /// Highest user density within a power budget
    Density(PlanArgs),
    /// Discrete users: exact allocation and per-user SINR
    Simulate(SimulateArgs),
    /// Run the model consistency checks
    Validate,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub se_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 15.0)]
    pub se_max: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 15)]
    pub steps: usize,
    /// Also write the 8/10/12 users x 50/100 m curve family into this directory
    #[arg(long)]
    pub family_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub budget_dbm: f64,
    #[arg(long, value_enum, default_value = "sic")]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Keep the density in users/m² fixed while the radius changes
    /// (default keeps the number of users per cell fixed)
    #[arg(long)]
    pub fixed_density: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n_users: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub placement: Option<Placement>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
}

impl GlobalArgs {
    /// Flags win over the file.
    fn apply(&self, cfg: &mut ScenarioConfig) {
        let c = &mut cfg.cell;
        macro_rules! set {
            ($flag:ident => $field:ident) => {
                if let Some(v) = self.$flag {
                    c.$field = Some(v);
                }
            };
        }
        set!(radius_m => radius_m);
        set!(min_distance_m => min_distance_m);
        set!(pathloss_exponent => pathloss_exponent);
        set!(pathloss_constant => pathloss_constant);
        set!(noise_dbm => noise_dbm);
        set!(bandwidth_hz => bandwidth_hz);
        if let Some(n) = self.users_per_cell {
            c.users_per_cell = Some(n);
            c.density_per_m2 = None;
        }
        if let Some(rho) = self.density_per_m2 {
            c.density_per_m2 = Some(rho);
            c.users_per_cell = None;
        }
        if let Some(se) = self.se_target {
            c.se_target = Some(se);
            c.sinr_target_db = None;
        }
        if let Some(db) = self.sinr_db {
            c.sinr_target_db = Some(db);
            c.se_target = None;
        }
        if let Some(f) = self.format {
            cfg.output.format = Some(f);
        }
        if let Some(p) = &self.out {
            cfg.output.path = Some(p.clone());
        }
    }
}

/// Parses `args` and runs the selected command. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match commands::dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub(crate) fn load_config(global: &GlobalArgs) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &global.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    global.apply(&mut cfg);
    Ok(cfg)
}
