//! End-to-end tests of the `noma-cell` binary: exit codes, CSV schemas,
//! golden outputs and file handling.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_noma-cell"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn noma-cell")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 stderr")
}

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(manifest(&format!("tests/golden/{name}"))).expect("golden file")
}

fn assert_golden(args: &[&str], name: &str) {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        golden(name),
        "output of {args:?} drifted from {name}"
    );
}

#[test]
fn power_reports_reference_cell() {
    let o = run(&["power"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(
        s.contains("SIC power (quadrature):   0.251189 W  24 dBm"),
        "{s}"
    );
    assert!(
        s.contains("SIC power (gamma form):   0.251189 W  24 dBm"),
        "{s}"
    );
    assert!(s.contains("no-SIC power:             infeasible"), "{s}");
}

#[test]
fn power_with_zero_density_is_zero() {
    let o = run(&["power", "--density-per-m2", "0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("sic_quadrature,0.0,-inf"), "{s}");
    assert!(s.contains("nosic,0.0,-inf"), "{s}");
}

#[test]
fn power_gamma_form_needs_zero_min_distance() {
    let o = run(&["power", "--min-distance-m", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n/a"));
}

#[test]
fn sweep_header_and_row_count() {
    let o = run(&["sweep", "--steps", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[0],
        "se_bits_s_hz,gamma_linear,p_sic_w,p_sic_dbm,p_asymptote_dbm,p_nosic_dbm_or_inf"
    );
    assert!(lines[1].ends_with(",inf"));
}

#[test]
fn sweep_dbm_column_is_monotone() {
    let s = stdout(&run(&["sweep", "--steps", "29"]));
    let dbm: Vec<f64> = s
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(dbm.len(), 29);
    assert!(dbm.windows(2).all(|w| w[1] >= w[0]), "{dbm:?}");
}

#[test]
fn sweep_bad_range_exits_2() {
    for args in [
        &["sweep", "--se-min", "5", "--se-max", "5"][..],
        &["sweep", "--steps", "1"],
        &["sweep", "--se-min", "-1"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error:"));
    }
}

#[test]
fn golden_sweeps() {
    assert_golden(&["sweep"], "sweep_default.csv");
    assert_golden(
        &[
            "sweep",
            "--users-per-cell",
            "0.5",
            "--se-min",
            "0.1",
            "--se-max",
            "2",
            "--steps",
            "5",
        ],
        "sweep_nosic_feasible.csv",
    );
}

#[test]
fn golden_simulations() {
    assert_golden(
        &[
            "simulate",
            "--placement",
            "uniform",
            "--seed",
            "42",
            "--n-users",
            "16",
        ],
        "simulate_uniform_seed42.csv",
    );
    let cfg = manifest("scenarios/dense_uniform.toml");
    assert_golden(
        &["simulate", "--config", cfg.to_str().unwrap()],
        "simulate_dense_uniform.csv",
    );
}

#[test]
fn sweep_family_writes_six_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "sweep",
        "--steps",
        "3",
        "--family-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "sweep_users10_r100m.csv",
            "sweep_users10_r50m.csv",
            "sweep_users12_r100m.csv",
            "sweep_users12_r50m.csv",
            "sweep_users8_r100m.csv",
            "sweep_users8_r50m.csv",
        ]
    );
    // the 8 users / 50 m member is the default cell
    let member = std::fs::read_to_string(dir.path().join("sweep_users8_r50m.csv")).unwrap();
    assert_eq!(member, stdout(&run(&["sweep", "--steps", "3"])));
}

#[test]
fn out_flag_writes_file_and_moves_summary_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("users.csv");
    let o = run(&[
        "simulate",
        "--n-users",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("index,distance_m,power_w,sinr_achieved\n"));
    assert_eq!(csv.lines().count(), 5);
    assert!(stdout(&o).contains("discrete total"));
    assert!(stderr(&o).is_empty());
}

#[test]
fn simulate_single_user() {
    let o = run(&["simulate", "--n-users", "1", "--noise-dbm", "-100"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let row: Vec<&str> = s.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "0");
    let r: f64 = row[1].parse().unwrap();
    let p: f64 = row[2].parse().unwrap();
    let expected = 31.0 * 1e-13 / 2.66e-4 * r.powf(3.57);
    assert!(
        ((p - expected) / expected).abs() < 1e-12,
        "{p} vs {expected}"
    );
    assert!(s.lines().count() == 2);
}

#[test]
fn simulate_infeasible_no_sic_exits_0() {
    let o = run(&["simulate", "--mode", "nosic", "--n-users", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "index,distance_m,power_w,sinr_achieved\n");
    assert!(stderr(&o).contains("infeasible"));
}

#[test]
fn simulate_reports_continuum_gap() {
    let o = run(&["simulate", "--n-users", "200", "--sinr-db", "-13.0103"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("relative gap"));
}

#[test]
fn simulate_zero_users_exits_2() {
    let o = run(&["simulate", "--n-users", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("simulation.n_users"));
}

#[test]
fn coverage_round_trip_at_anchor() {
    let o = run(&["coverage", "--budget-dbm", "24", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let row: Vec<&str> = s.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "coverage_radius_m");
    let r: f64 = row[1].parse().unwrap();
    assert!((r - 50.0).abs() < 1e-6, "{r}");
}

#[test]
fn coverage_without_coverage_exits_3() {
    // 8 users per cell exceed zeta without SIC at every radius
    let o = run(&["coverage", "--budget-dbm", "30", "--mode", "nosic"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("no coverage"));
    // a budget far below any resolvable annulus around R_0
    let o = run(&["coverage", "--budget-dbm", "-300", "--min-distance-m", "10"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn coverage_no_sic_feasible_population() {
    let o = run(&[
        "coverage",
        "--budget-dbm",
        "20",
        "--mode",
        "nosic",
        "--users-per-cell",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("power at radius: 20 dBm"));
}

#[test]
fn qos_unbounded_and_bounded() {
    let o = run(&["qos", "--budget-dbm", "30"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("max_se: UNBOUNDED"));

    let o = run(&["qos", "--budget-dbm", "24", "--format", "csv"]);
    let s = stdout(&o);
    let se: f64 = s
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((se - 5.0).abs() < 1e-6, "{se}");
}

#[test]
fn qos_reports_throughput_with_bandwidth() {
    let o = run(&["qos", "--budget-dbm", "24", "--bandwidth-hz", "1e6"]);
    assert!(
        stdout(&o).contains("throughput: 5e6 bits/s"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn density_round_trip() {
    let o = run(&["density", "--budget-dbm", "24"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("users per cell: 8\n"), "{}", stdout(&o));
}

#[test]
fn validate_default_passes() {
    let o = run(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(!s.contains("FAIL"));
    assert!(s.contains("(negative)"));
    assert!(s.contains("INFO anchor_41dbm"));
}

#[test]
fn config_file_and_flag_precedence() {
    let cfg = manifest("scenarios/reference.toml");
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&run(&["power", "--config", cfg]));
    assert!(from_file.contains("24 dBm"));
    let overridden = stdout(&run(&["power", "--config", cfg, "--radius-m", "100"]));
    assert!(overridden.contains("R_c = 100 m"));
}

#[test]
fn config_errors_exit_2_with_field_names() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("[cell]\nradius_m = -1\n", "cell.radius_m"),
        (
            "[cell]\nusers_per_cell = 8\ndensity_per_m2 = 1e-3\n",
            "density_per_m2",
        ),
        (
            "[cell]\nse_target = 5\nsinr_target_db = 10\n",
            "sinr_target_db",
        ),
        ("[cell]\nradius = 50\n", "radius"),
        ("[simulation]\nplacement = \"grid\"\n", "placement"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{i}.toml"));
        std::fs::write(&path, text).unwrap();
        let o = run(&["power", "--config", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(stderr(&o).contains(field), "{text}: {}", stderr(&o));
    }
    let o = run(&["power", "--config", "/nonexistent/scenario.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_2() {
    assert_eq!(run(&["power", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["--se", "3", "--sinr-db", "3", "power"]).status.code(),
        Some(2)
    );
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("simulate"));
}
