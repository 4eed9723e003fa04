//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use noma_cell::{
    bs_power_no_sic, bs_power_sic, bs_power_sic_asymptotic, bs_power_sic_gamma_form, dbm_to_watts,
    density_from_users_per_cell, linear_grid, linear_to_db, max_coverage_radius, max_density,
    max_spectral_efficiency, place_users_rings, place_users_uniform, solve_no_sic_allocation,
    solve_sic_allocation, spectral_efficiency, sweep_power_vs_se, throughput, total_power,
    verify_sinr, watts_to_dbm, AllocationMode, CellParamsF64, DensitySpec, OracleParamsF64,
    PlanAnswerF64, PowerModel,
};

use crate::config::{DensityInput, Format, Mode, NoiseSource, Placement, Scenario};
use crate::error::{bad, CliError};
use crate::format::{full, sig6};
use crate::validate::{run_checks, Status};
use crate::{load_config, Cli, Command, CoverageArgs, PlanArgs, SimulateArgs, SweepArgs};

pub const SWEEP_HEADER: [&str; 6] = [
    "se_bits_s_hz",
    "gamma_linear",
    "p_sic_w",
    "p_sic_dbm",
    "p_asymptote_dbm",
    "p_nosic_dbm_or_inf",
];

pub const SIMULATE_HEADER: [&str; 4] = ["index", "distance_m", "power_w", "sinr_achieved"];

pub(crate) fn dispatch(
    cli: &Cli,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut cfg = load_config(&cli.global)?;
    if let Command::Simulate(args) = &cli.command {
        apply_simulate_flags(args, &mut cfg.simulation);
    }
    let scenario = cfg.resolve()?;
    let out = scenario.out.clone();
    with_sinks(
        out.as_deref(),
        stdout,
        stderr,
        |primary, secondary| match &cli.command {
            Command::Power => cmd_power(&scenario, primary),
            Command::Sweep(args) => cmd_sweep(&scenario, args, primary, secondary),
            Command::Coverage(args) => cmd_coverage(&scenario, args, primary),
            Command::Qos(args) => cmd_qos(&scenario, args, primary),
            Command::Density(args) => cmd_density(&scenario, args, primary),
            Command::Simulate(_) => cmd_simulate(&scenario, primary, secondary),
            Command::Validate => cmd_validate(&scenario, primary),
        },
    )
}

fn apply_simulate_flags(args: &SimulateArgs, sim: &mut crate::config::SimulationSection) {
    if args.n_users.is_some() {
        sim.n_users = args.n_users;
    }
    if args.seed.is_some() {
        sim.seed = args.seed;
    }
    if args.placement.is_some() {
        sim.placement = args.placement;
    }
    if args.mode.is_some() {
        sim.mode = args.mode;
    }
}

/// Primary output goes to `out` when given, else stdout; secondary output
/// (summaries) then goes to stdout, else stderr.
fn with_sinks<F>(
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
    f: F,
) -> Result<i32, CliError>
where
    F: FnOnce(&mut dyn Write, &mut dyn Write) -> Result<i32, CliError>,
{
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| bad(&path.display().to_string(), e))?;
            let mut file = BufWriter::new(file);
            let code = f(&mut file, stdout)?;
            file.flush()?;
            Ok(code)
        }
        None => f(stdout, stderr),
    }
}

fn dbm_or_inf(w: f64) -> f64 {
    if w == 0.0 {
        f64::NEG_INFINITY
    } else if w.is_infinite() {
        f64::INFINITY
    } else {
        watts_to_dbm(w).unwrap_or(f64::NAN)
    }
}

fn model_of(mode: Mode) -> PowerModel {
    match mode {
        Mode::Sic => PowerModel::Sic,
        Mode::Nosic => PowerModel::NoSic,
    }
}

fn scenario_line(s: &Scenario) -> String {
    let p = &s.cell;
    let noise = match s.noise_source {
        NoiseSource::Configured => "configured",
        NoiseSource::Calibrated => "calibrated to 24 dBm at SE 5, 8 users, 50 m",
    };
    format!(
        "# R_c = {} m, R_0 = {} m, eta = {}, K = {}, noise = {} dBm ({}), users/cell = {}, \
         SINR = {} ({} dB, SE {} bits/s/Hz)",
        sig6(p.radius),
        sig6(p.min_distance),
        sig6(p.pathloss_exponent),
        sig6(p.pathloss_constant),
        sig6(dbm_or_inf(p.noise)),
        noise,
        sig6(p.users_per_cell()),
        sig6(p.sinr_target),
        sig6(linear_to_db(p.sinr_target)),
        sig6(spectral_efficiency(p.sinr_target)),
    )
}

fn format_or(s: &Scenario, default: Format) -> Format {
    s.format.unwrap_or(default)
}

pub fn cmd_power(s: &Scenario, out: &mut dyn Write) -> Result<i32, CliError> {
    let p = &s.cell;
    let sic = bs_power_sic(p)?;
    let gamma_form = if p.min_distance == 0.0 {
        Some(bs_power_sic_gamma_form(p)?)
    } else {
        None
    };
    let asym = bs_power_sic_asymptotic(p)?;
    let nosic = match bs_power_no_sic(p) {
        Ok(w) => Ok(w),
        Err(e @ noma_cell::Error::Infeasible { .. }) => Err(e),
        Err(e) => return Err(e.into()),
    };

    match format_or(s, Format::Table) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["quantity", "power_w", "power_dbm"])?;
            let mut row = |name: &str, v: f64| {
                w.write_record([name.to_string(), full(v), full(dbm_or_inf(v))])
            };
            row("sic_quadrature", sic)?;
            if let Some(g) = gamma_form {
                row("sic_gamma_form", g)?;
            }
            row("sic_asymptote", asym)?;
            row("nosic", *nosic.as_ref().unwrap_or(&f64::INFINITY))?;
            w.flush()?;
        }
        Format::Table => {
            let line = |w: f64| format!("{} W  {} dBm", sig6(w), sig6(dbm_or_inf(w)));
            writeln!(out, "{}", scenario_line(s))?;
            writeln!(out, "SIC power (quadrature):   {}", line(sic))?;
            match gamma_form {
                Some(g) => writeln!(out, "SIC power (gamma form):   {}", line(g))?,
                None => writeln!(out, "SIC power (gamma form):   n/a (needs R_0 = 0)")?,
            }
            writeln!(out, "SIC asymptote:            {}", line(asym))?;
            match nosic {
                Ok(w) => writeln!(out, "no-SIC power:             {}", line(w))?,
                Err(noma_cell::Error::Infeasible {
                    load,
                    zeta,
                    critical_density,
                    critical_sinr,
                }) => writeln!(
                    out,
                    "no-SIC power:             infeasible (users/cell {} >= zeta {}; critical density {} users/m^2, critical SINR {})",
                    sig6(load),
                    sig6(zeta),
                    sig6(critical_density),
                    sig6(critical_sinr)
                )?,
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(0)
}

fn write_sweep(
    cell: &CellParamsF64,
    grid: &[f64],
    format: Format,
    out: &mut dyn Write,
) -> Result<usize, CliError> {
    let sic = sweep_power_vs_se(cell, grid, PowerModel::Sic)?;
    let asym = sweep_power_vs_se(cell, grid, PowerModel::SicAsymptote)?;
    let nosic = sweep_power_vs_se(cell, grid, PowerModel::NoSic)?;
    let rows = sic.points.iter().zip(&asym.points).zip(&nosic.points);
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(SWEEP_HEADER)?;
            for ((s, a), n) in rows {
                w.write_record([
                    full(s.se),
                    full(s.sinr),
                    full(s.power_w),
                    full(s.power_dbm),
                    full(a.power_dbm),
                    full(n.power_dbm),
                ])?;
            }
            w.flush()?;
        }
        Format::Table => {
            writeln!(
                out,
                "{:>12} {:>12} {:>12} {:>12} {:>15} {:>18}",
                SWEEP_HEADER[0],
                SWEEP_HEADER[1],
                SWEEP_HEADER[2],
                SWEEP_HEADER[3],
                SWEEP_HEADER[4],
                SWEEP_HEADER[5]
            )?;
            for ((s, a), n) in rows {
                writeln!(
                    out,
                    "{:>12} {:>12} {:>12} {:>12} {:>15} {:>18}",
                    sig6(s.se),
                    sig6(s.sinr),
                    sig6(s.power_w),
                    sig6(s.power_dbm),
                    sig6(a.power_dbm),
                    sig6(n.power_dbm)
                )?;
            }
        }
    }
    Ok(grid.len())
}

/// Users per cell and radii of the reference curve family.
pub const FAMILY_USERS: [f64; 3] = [8.0, 10.0, 12.0];
pub const FAMILY_RADII: [f64; 2] = [50.0, 100.0];

pub fn family_file_name(users: f64, radius: f64) -> String {
    format!("sweep_users{users}_r{radius}m.csv")
}

pub fn cmd_sweep(
    s: &Scenario,
    args: &SweepArgs,
    out: &mut dyn Write,
    summary: &mut dyn Write,
) -> Result<i32, CliError> {
    if !(args.se_min > 0.0 && args.se_min < args.se_max && args.se_max.is_finite()) {
        return Err(bad("sweep", "need 0 < se_min < se_max"));
    }
    if args.steps < 2 {
        return Err(bad("sweep.steps", "must be >= 2"));
    }
    let grid = linear_grid(args.se_min, args.se_max, args.steps);
    let rows = write_sweep(&s.cell, &grid, format_or(s, Format::Csv), out)?;
    writeln!(
        summary,
        "sweep: {rows} points, SE {} .. {}",
        sig6(args.se_min),
        sig6(args.se_max)
    )?;

    if let Some(dir) = &args.family_dir {
        std::fs::create_dir_all(dir).map_err(|e| bad(&dir.display().to_string(), e))?;
        for &radius in &FAMILY_RADII {
            for &users in &FAMILY_USERS {
                let mut cell = s.cell;
                cell.radius = radius;
                let cell = cell.with_users_per_cell(users);
                let path = dir.join(family_file_name(users, radius));
                let mut file = BufWriter::new(File::create(&path)?);
                write_sweep(&cell, &grid, Format::Csv, &mut file)?;
                file.flush()?;
                writeln!(summary, "wrote {}", path.display())?;
            }
        }
    }
    Ok(0)
}

fn budget_watts(args: &PlanArgs) -> Result<f64, CliError> {
    if !args.budget_dbm.is_finite() {
        return Err(bad("budget_dbm", "must be finite"));
    }
    Ok(dbm_to_watts(args.budget_dbm))
}

fn write_answer(
    s: &Scenario,
    answer: &PlanAnswerF64,
    extra: &[(&str, String)],
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let value = if answer.is_unbounded() {
        "UNBOUNDED".to_string()
    } else {
        answer.value.to_string()
    };
    match format_or(s, Format::Table) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "quantity",
                "value",
                "unit",
                "bracket_lo",
                "bracket_hi",
                "residual",
            ])?;
            w.write_record([
                answer.quantity.to_string(),
                if answer.is_unbounded() {
                    value
                } else {
                    full(answer.value)
                },
                answer.quantity.unit().to_string(),
                full(answer.bracket.0),
                full(answer.bracket.1),
                full(answer.residual),
            ])?;
            w.flush()?;
        }
        Format::Table => {
            writeln!(out, "{}", scenario_line(s))?;
            let shown = if answer.is_unbounded() {
                "UNBOUNDED".to_string()
            } else {
                format!("{} {}", sig6(answer.value), answer.quantity.unit())
            };
            writeln!(out, "{}: {}", answer.quantity, shown)?;
            if !answer.is_unbounded() {
                writeln!(
                    out,
                    "  bracket [{}, {}], residual {}",
                    sig6(answer.bracket.0),
                    sig6(answer.bracket.1),
                    sig6(answer.residual)
                )?;
            }
            for (k, v) in extra {
                writeln!(out, "  {k}: {v}")?;
            }
        }
    }
    Ok(())
}

fn planning(result: noma_cell::Result<PlanAnswerF64>) -> Result<PlanAnswerF64, CliError> {
    result.map_err(|e| match e {
        noma_cell::Error::NoCoverage(m) => CliError::Infeasible(format!("no coverage: {m}")),
        e @ noma_cell::Error::Infeasible { .. } => CliError::Infeasible(e.to_string()),
        e => e.into(),
    })
}

pub fn cmd_coverage(
    s: &Scenario,
    args: &CoverageArgs,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let budget = budget_watts(&args.plan)?;
    let model = model_of(args.plan.mode);
    let density = match s.density_input {
        DensityInput::UsersPerCell(n) if !args.fixed_density => DensitySpec::UsersPerCell(n),
        _ => DensitySpec::PerSquareMeter(s.cell.density),
    };
    let answer = planning(max_coverage_radius(&s.cell, density, budget, model))?;
    let mut at = s.cell;
    at.radius = answer.value;
    if let DensitySpec::UsersPerCell(n) = density {
        at = at.with_users_per_cell(n);
    }
    let forward = total_power(&at, model)?;
    let extra = [
        ("model", model.to_string()),
        ("budget", format!("{} dBm", sig6(args.plan.budget_dbm))),
        (
            "power at radius",
            format!("{} dBm", sig6(dbm_or_inf(forward))),
        ),
    ];
    write_answer(s, &answer, &extra, out)?;
    Ok(0)
}

pub fn cmd_qos(s: &Scenario, args: &PlanArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let budget = budget_watts(args)?;
    let model = model_of(args.mode);
    let answer = planning(max_spectral_efficiency(&s.cell, budget, model))?;
    let mut extra = vec![
        ("model", model.to_string()),
        ("budget", format!("{} dBm", sig6(args.budget_dbm))),
    ];
    if !answer.is_unbounded() {
        let sinr = noma_cell::sinr_for_se(answer.value);
        extra.push((
            "sinr",
            format!("{} ({} dB)", sig6(sinr), sig6(linear_to_db(sinr))),
        ));
        if let Some(w) = s.bandwidth_hz {
            extra.push((
                "throughput",
                format!("{} bits/s", sig6(throughput(sinr, w))),
            ));
        }
    }
    write_answer(s, &answer, &extra, out)?;
    Ok(0)
}

pub fn cmd_density(s: &Scenario, args: &PlanArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let budget = budget_watts(args)?;
    let model = model_of(args.mode);
    let answer = planning(max_density(&s.cell, budget, model))?;
    let one = density_from_users_per_cell(1.0, s.cell.radius, s.cell.min_distance);
    let extra = [
        ("model", model.to_string()),
        ("budget", format!("{} dBm", sig6(args.budget_dbm))),
        ("users per cell", sig6(answer.value / one)),
    ];
    write_answer(s, &answer, &extra, out)?;
    Ok(0)
}

pub fn cmd_simulate(
    s: &Scenario,
    out: &mut dyn Write,
    summary: &mut dyn Write,
) -> Result<i32, CliError> {
    let p = &s.cell;
    let users = match s.placement {
        Placement::Rings => place_users_rings(s.n_users, p.min_distance, p.radius)?,
        Placement::Uniform => place_users_uniform(s.n_users, p.min_distance, p.radius, s.seed)?,
    };
    let params = OracleParamsF64::from(p);
    let (alloc, mode) = match s.mode {
        Mode::Sic => (solve_sic_allocation(&users, &params)?, AllocationMode::Sic),
        Mode::Nosic => (
            solve_no_sic_allocation(&users, &params)?,
            AllocationMode::NoSic,
        ),
    };
    let sinr = if alloc.feasible {
        verify_sinr(&users, &alloc, &params, mode)?
    } else {
        Vec::new()
    };

    let rows = users
        .tie_order()
        .iter()
        .zip(users.distances())
        .zip(alloc.powers.iter().zip(&sinr));
    match format_or(s, Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(SIMULATE_HEADER)?;
            for ((idx, r), (pw, g)) in rows {
                w.write_record([idx.to_string(), full(*r), full(*pw), full(*g)])?;
            }
            w.flush()?;
        }
        Format::Table => {
            writeln!(
                out,
                "{:>6} {:>12} {:>14} {:>14}",
                "index", "distance_m", "power_w", "sinr_achieved"
            )?;
            for ((idx, r), (pw, g)) in rows {
                writeln!(
                    out,
                    "{:>6} {:>12} {:>14} {:>14}",
                    idx,
                    sig6(*r),
                    sig6(*pw),
                    sig6(*g)
                )?;
            }
        }
    }

    let mut continuum = *p;
    continuum.density = density_from_users_per_cell(s.n_users as f64, p.radius, p.min_distance);
    let model = model_of(s.mode);
    let placement = match s.placement {
        Placement::Rings => "rings".to_string(),
        Placement::Uniform => format!("uniform, seed {}", s.seed),
    };
    writeln!(summary, "{}", scenario_line(s))?;
    writeln!(
        summary,
        "simulate: {} users ({placement}), mode {mode}; equal distances are ordered by insertion index",
        s.n_users
    )?;
    if !alloc.feasible {
        writeln!(
            summary,
            "discrete total: infeasible (N = {} >= zeta = {})",
            s.n_users,
            sig6(p.coefficients().zeta)
        )?;
        return Ok(0);
    }
    writeln!(
        summary,
        "discrete total: {} W ({} dBm)",
        sig6(alloc.total_power),
        sig6(dbm_or_inf(alloc.total_power))
    )?;
    match total_power(&continuum, model) {
        Ok(c) => {
            let gap = if c > 0.0 {
                (alloc.total_power - c) / c
            } else {
                f64::NAN
            };
            writeln!(
                summary,
                "continuum total at {} users/cell: {} W ({} dBm); relative gap {}",
                s.n_users,
                sig6(c),
                sig6(dbm_or_inf(c)),
                sig6(gap)
            )?;
        }
        Err(noma_cell::Error::Infeasible { .. }) => {
            writeln!(summary, "continuum total: infeasible")?;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(0)
}

pub fn cmd_validate(s: &Scenario, out: &mut dyn Write) -> Result<i32, CliError> {
    writeln!(out, "{}", scenario_line(s))?;
    let checks = run_checks(s);
    for c in &checks {
        writeln!(out, "{} {:<20} {}", c.status, c.name, c.detail)?;
    }
    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    writeln!(out, "{} checks, {} failed", checks.len(), failed)?;
    Ok(if failed == 0 { 0 } else { 1 })
}
