//! End-to-end runs of the `multinarp` binary.

use std::path::Path;
use std::process::{Command, Output};

use multinarp::io::table::{map_rows, read_table};
use multinarp::io::{read_map_csv, RunConfig};
use multinarp::sweep::run_sweep;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multinarp"))
        .args(args)
        .current_dir(dir)
        .env_remove("MULTINARP_WORKERS")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

const SMALL: &str = r#"
name = "small"
output_dir = "out"
[emitters]
count = 3
[areas]
theta_start_pi = 0
theta_stop_pi = 12
theta_points = 5
[axis]
values_meV = [2.0, 3.4]
"#;

#[test]
fn simulate_pi_pulse() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["simulate", "--theta", "3.14159", "--detuning", "0", "--chirp", "0", "--no-notch"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let table = read_table(&dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(table.header, ["time_ps", "rho11", "re_rho01", "im_rho01"]);
    let rho11 = table.column("rho11").unwrap();
    assert!((rho11.last().unwrap() - 1.0).abs() < 1e-6);
    assert!(table.metadata.iter().any(|l| l == "theta_rad = 3.14159"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("final_occupation=0.99999"));
}

#[test]
fn missing_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["sweep", "missing.conf"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("multinarp: error kind=config key="));
    assert!(files(dir.path()).is_empty());
}

#[test]
fn bad_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[axis]\nwidth_meV = -1\n").unwrap();
    let o = run(dir.path(), &["sweep", "bad.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("key=\"axis.width_meV\""), "{}", stderr(&o));
    std::fs::write(dir.path().join("bad.toml"), "[pulse]\nchirp = 1\n").unwrap();
    let o = run(dir.path(), &["sweep", "bad.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("key=\"pulse.chirp\" message=\"unknown key\""));
    assert_eq!(files(dir.path()), ["bad.toml"]);
}

#[test]
fn numerical_failure_exits_3_with_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}\n[numerics]\ntolerance = 1e-30\n");
    std::fs::write(dir.path().join("job.toml"), cfg).unwrap();
    let o = run(dir.path(), &["sweep", "job.toml", "--quiet"]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("kind=numerical theta_rad="), "{err}");
    assert!(err.contains("spacing_meV=") && err.contains("emitter_index="));
    assert_eq!(files(dir.path()), ["job.toml"]);
}

#[test]
fn sweep_writes_map_and_heatmaps() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("job.toml"), SMALL).unwrap();
    let o = run(dir.path(), &["sweep", "job.toml", "--workers", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("out");
    assert_eq!(files(&out), ["small.csv", "small_qd1.svg", "small_qd2.svg", "small_qd3.svg"]);

    let map = read_map_csv(&out.join("small.csv")).unwrap();
    assert_eq!(map.values.len(), 5 * 2 * 3);
    // The embedded parameters are enough to redo the job exactly.
    let spec = RunConfig::parse(SMALL).unwrap().spec;
    assert_eq!(map.spec, spec);
    assert_eq!(map.values, run_sweep(&spec).unwrap().values);

    let svg = |i: usize| std::fs::read_to_string(out.join(format!("small_qd{i}.svg"))).unwrap();
    assert_eq!(svg(1), svg(3));
    assert!(svg(1).starts_with("<svg"));
}

#[test]
fn figure_fig2_file_set() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["figure", "fig2", "--area-points", "3", "--axis-points", "2", "--output-dir", "figs", "--quiet"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("figs");
    assert_eq!(
        files(&out),
        ["fig2.svg", "fig2_qd1.csv", "fig2_qd2.csv", "fig2_qd3.csv", "fig2_qd4.csv", "fig2_qd5.csv"]
    );
    let rows = map_rows(&read_table(&out.join("fig2_qd4.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 3 * 2);
    assert!(rows.iter().all(|r| r.emitter == 4));
    assert_eq!(std::fs::read_to_string(out.join("fig2.svg")).unwrap().matches("QD ").count(), 5);
}

#[test]
fn figure_fig2e_runs_both_chirps_and_reference() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["figure", "fig2e", "--area-points", "3", "--quiet"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let f = files(dir.path());
    assert_eq!(f.len(), 16);
    for stem in ["fig2e", "fig2e_negchirp", "fig2e_nophonons"] {
        assert!(f.contains(&format!("{stem}_qd5.csv")));
    }
    let svg = std::fs::read_to_string(dir.path().join("fig2e.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 10);
}

#[test]
fn unknown_preset_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["figure", "fig7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("key=preset"));
}

#[test]
fn shape_writes_spectrum_and_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["shape", "--notches", "5", "--spacing", "3.4", "--points", "8192", "--prefix", "p"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let spec = read_table(&dir.path().join("p_spectrum.csv")).unwrap();
    assert_eq!(spec.rows.len(), 8192);
    assert_eq!(spec.header, ["energy_meV", "re_amplitude_rad", "im_amplitude_rad"]);
    let env = read_table(&dir.path().join("p_envelope.csv")).unwrap();
    assert_eq!(env.header, ["time_ps", "re_omega_rad_per_ps", "im_omega_rad_per_ps"]);
    assert!(env.rows.len() % 2 == 1);
}

#[test]
fn help_lists_commands_and_bad_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--help"]);
    assert!(o.status.success());
    let help = String::from_utf8_lossy(&o.stdout);
    for cmd in ["shape", "simulate", "sweep", "figure", "MULTINARP_WORKERS"] {
        assert!(help.contains(cmd), "{cmd}");
    }
    let o = run(dir.path(), &["simulate", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}
