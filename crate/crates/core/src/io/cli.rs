//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad configuration or arguments,
//! 3 numerical failure. Errors are printed to stderr as one line of
//! `key=value` fields, e.g.
//! `multinarp: error kind=config key=axis.width_meV message="must be positive"`.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dynamics::{integrate_scaled, EmitterParams, Frame, IntegratorConfig};
use crate::error::{Error, Result};
use crate::io::config::RunConfig;
use crate::io::svg::{line_cut_series, line_plot_svg, panels_svg, render_heatmap, Series};
use crate::io::table::{write_emitter_csv, write_envelope_csv, write_map_csv, write_spectrum_csv, write_trajectory_csv};
use crate::phonon::PhononEnvironment;
use crate::pulseshape::{
    apply_notch_mask, apply_phase_mask, make_gaussian_spectrum, spectral_fwhm, synthesize_with, Chirp,
    FrequencyGrid, NotchSpec, SpectralPulse, SynthesisOptions, TemporalPulse, DEFAULT_MAX_DT, DEFAULT_POINTS,
    DEFAULT_SPAN_FWHMS,
};
use crate::sweep::{linspace, preset, run_sweep_with, OccupationMap, SweepOptions, SweepProgress, SweepSpec, PRESETS};

#[derive(Debug, Parser)]
#[command(
    name = "multinarp",
    version,
    about = "Chirped multi-notch pulse driving of spectrally distinct two-level emitters",
    after_help = "The sweep worker count can also be set with the MULTINARP_WORKERS environment variable."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the shaped spectrum and the synthesized temporal envelope as CSV.
    Shape(ShapeArgs),
    /// Integrate one emitter and write its trajectory as CSV.
    Simulate(SimulateArgs),
    /// Run an occupation-map sweep described by a config file.
    Sweep(SweepArgs),
    /// Run a figure preset and write its CSV files and SVG figure.
    Figure(FigureArgs),
}

#[derive(Debug, Args)]
struct PulseArgs {
    /// Transform-limited intensity FWHM (ps).
    #[arg(long, default_value_t = 0.120)]
    tau0: f64,
    /// Spectral chirp φ″ (ps²).
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    chirp: f64,
    /// Number of notches, laid out symmetrically about the spectral peak.
    #[arg(long, default_value_t = 1)]
    notches: usize,
    /// Notch spacing (meV).
    #[arg(long, default_value_t = 0.0)]
    spacing: f64,
    /// Notch width δ (meV).
    #[arg(long, default_value_t = 1.0)]
    width: f64,
    /// Leave the spectrum unnotched.
    #[arg(long)]
    no_notch: bool,
    /// Spectral grid points.
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    /// Spectral grid span in transform-limited FWHMs.
    #[arg(long, default_value_t = DEFAULT_SPAN_FWHMS)]
    span_fwhms: f64,
    /// Largest envelope sampling interval (ps).
    #[arg(long, default_value_t = DEFAULT_MAX_DT)]
    max_dt: f64,
    /// Time window (ps); default is ten chirped durations.
    #[arg(long)]
    t_span: Option<f64>,
    /// Halve the sampling interval.
    #[arg(long)]
    refine: bool,
}

#[derive(Debug, Args)]
struct ShapeArgs {
    #[command(flatten)]
    pulse: PulseArgs,
    /// Transform-limited pulse area (rad).
    #[arg(long, default_value_t = PI)]
    theta: f64,
    /// Directory for the output files.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// File name prefix: writes <prefix>_spectrum.csv and <prefix>_envelope.csv.
    #[arg(long, default_value = "shape")]
    prefix: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FrameArg {
    Laser,
    Emitter,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    pulse: PulseArgs,
    /// Transform-limited pulse area (rad).
    #[arg(long, default_value_t = PI)]
    theta: f64,
    /// Emitter detuning from the spectral peak (meV).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    detuning: f64,
    /// Dipole scale relative to the reference emitter.
    #[arg(long, default_value_t = 1.0)]
    dipole: f64,
    /// Include LA-phonon relaxation.
    #[arg(long)]
    phonons: bool,
    /// Phonon bath temperature (K).
    #[arg(long, default_value_t = PhononEnvironment::default().temperature)]
    temperature: f64,
    /// Phonon coupling prefactor (ps²).
    #[arg(long, default_value_t = PhononEnvironment::default().coupling)]
    coupling: f64,
    /// Phonon cutoff energy (meV).
    #[arg(long, default_value_t = PhononEnvironment::default().cutoff)]
    cutoff: f64,
    /// Store every n-th integration step (0 keeps only the endpoints).
    #[arg(long, default_value_t = 10)]
    stride: usize,
    /// Integration frame (results agree to integration accuracy).
    #[arg(long, value_enum, default_value = "laser")]
    frame: FrameArg,
    /// Largest tolerated per-step local error estimate.
    #[arg(long, default_value_t = IntegratorConfig::default().tolerance)]
    tolerance: f64,
    /// Trajectory CSV path.
    #[arg(long, default_value = "trajectory.csv")]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Worker threads (default: MULTINARP_WORKERS or all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Suppress progress output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Config file (see the README for the grammar).
    config: PathBuf,
    /// Override the config's output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// One of fig2, fig2e, fig3c, fig4a, fig4b, fig4c, figS3_10qd.
    preset: String,
    /// Directory for the output files.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// Resample the area grid to this many points over the same range.
    #[arg(long)]
    area_points: Option<usize>,
    /// Resample a multi-valued spacing/width grid to this many points.
    #[arg(long)]
    axis_points: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Shape(a) => shape(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Figure(a) => figure(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("multinarp: error {}", error_fields(&e));
            exit_code(&e)
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::UnknownPreset(_) | Error::InvalidParameter { .. } | Error::InvalidGrid(_) => 2,
        Error::EnvelopeNotDecayed { .. } | Error::StepSize { .. } | Error::Cell { .. } => 3,
        Error::Io(_) | Error::Csv(_) => 1,
    }
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " "))
}

/// The one-line `key=value` rendering of an error.
pub fn error_fields(err: &Error) -> String {
    match err {
        Error::Config { key, message } => {
            format!("kind=config key={} message={}", quoted(key), quoted(message))
        }
        Error::UnknownPreset(name) => format!(
            "kind=config key=preset message={}",
            quoted(&format!("unknown preset `{name}`; known: {}", PRESETS.join(", ")))
        ),
        Error::InvalidParameter { name, reason } => {
            format!("kind=config key={} message={}", quoted(name), quoted(reason))
        }
        Error::InvalidGrid(msg) => format!("kind=config key=grid message={}", quoted(msg)),
        Error::Cell { theta, axis, value, emitter, source } => format!(
            "kind=numerical theta_rad={theta:?} {axis}={value:?} emitter_index={emitter} message={}",
            quoted(&source.to_string())
        ),
        Error::EnvelopeNotDecayed { .. } | Error::StepSize { .. } => {
            format!("kind=numerical message={}", quoted(&err.to_string()))
        }
        Error::Io(_) | Error::Csv(_) => format!("kind=io message={}", quoted(&err.to_string())),
    }
}

fn shaped_spectrum(p: &PulseArgs, theta: f64) -> Result<SpectralPulse> {
    let grid = FrequencyGrid::new(0.0, p.span_fwhms * spectral_fwhm(p.tau0), p.points)?;
    let mut s = make_gaussian_spectrum(p.tau0, 0.0, theta, grid)?;
    if !p.no_notch {
        s = apply_notch_mask(&s, &NotchSpec::symmetric(0.0, p.notches, p.spacing, p.width)?);
    }
    Ok(apply_phase_mask(&s, Chirp::new(p.chirp)?))
}

fn synthesis(p: &PulseArgs) -> SynthesisOptions {
    let opts = SynthesisOptions {
        t_span: p.t_span,
        max_dt: p.max_dt,
    };
    if p.refine {
        opts.refined()
    } else {
        opts
    }
}

fn pulse_metadata(p: &PulseArgs, theta: f64) -> Vec<String> {
    let mut m = vec![
        format!("multinarp {}", crate::VERSION),
        format!("theta_rad = {theta:?}"),
        format!("tau0_ps = {:?}", p.tau0),
        format!("chirp_ps2 = {:?}", p.chirp),
    ];
    if p.no_notch {
        m.push("notches = 0".into());
    } else {
        m.push(format!("notches = {}", p.notches));
        m.push(format!("spacing_meV = {:?}", p.spacing));
        m.push(format!("width_meV = {:?}", p.width));
    }
    m.push(format!("points = {}", p.points));
    m.push(format!("span_fwhms = {:?}", p.span_fwhms));
    m.push(format!("max_dt_ps = {:?}", p.max_dt));
    if let Some(t) = p.t_span {
        m.push(format!("t_span_ps = {t:?}"));
    }
    m.push(format!("refine = {}", p.refine));
    m
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn shape(a: &ShapeArgs) -> Result<()> {
    let spectrum = shaped_spectrum(&a.pulse, a.theta)?;
    let pulse: TemporalPulse = synthesize_with(&spectrum, &synthesis(&a.pulse))?;
    let meta = pulse_metadata(&a.pulse, a.theta);
    create_dir(&a.output_dir)?;
    let spec_path = a.output_dir.join(format!("{}_spectrum.csv", a.prefix));
    let env_path = a.output_dir.join(format!("{}_envelope.csv", a.prefix));
    write_spectrum_csv(&spectrum, &meta, &spec_path)?;
    write_envelope_csv(&pulse, &meta, &env_path)?;
    println!("wrote {}", spec_path.display());
    println!("wrote {}", env_path.display());
    Ok(())
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    // Unit area, scaled in the integrator, exactly as in sweeps.
    let spectrum = shaped_spectrum(&a.pulse, 1.0)?;
    let pulse = synthesize_with(&spectrum, &synthesis(&a.pulse))?;
    let emitter = EmitterParams::new(a.detuning, a.dipole)?;
    let env = PhononEnvironment {
        temperature: a.temperature,
        coupling: a.coupling,
        cutoff: a.cutoff,
        enabled: a.phonons,
    };
    env.validate()?;
    let config = IntegratorConfig {
        stride: a.stride,
        tolerance: a.tolerance,
        frame: match a.frame {
            FrameArg::Laser => Frame::Laser,
            FrameArg::Emitter => Frame::Emitter,
        },
    };
    if !(a.theta.is_finite() && a.theta >= 0.0) {
        return Err(Error::param("theta_rad", "must be finite and non-negative"));
    }
    let traj = integrate_scaled(&pulse, a.theta, &emitter, Some(&env), &config)?;

    let mut meta = pulse_metadata(&a.pulse, a.theta);
    meta.push(format!("detuning_meV = {:?}", a.detuning));
    meta.push(format!("dipole_scale = {:?}", a.dipole));
    if a.phonons {
        meta.push(format!("temperature_K = {:?}", a.temperature));
        meta.push(format!("coupling_ps2 = {:?}", a.coupling));
        meta.push(format!("cutoff_meV = {:?}", a.cutoff));
    } else {
        meta.push("phonons = false".into());
    }
    meta.push(format!("frame = {:?}", a.frame).to_lowercase());
    meta.push(format!("tolerance = {:?}", a.tolerance));
    meta.push(format!("final_occupation = {:?}", traj.final_occupation()));
    if let Some(dir) = a.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_trajectory_csv(&traj, &meta, &a.output)?;
    println!("final_occupation={:?}", traj.final_occupation());
    println!("wrote {}", a.output.display());
    Ok(())
}

fn run_spec(spec: &SweepSpec, run: &RunArgs) -> Result<OccupationMap> {
    let last = AtomicUsize::new(0);
    let report = |p: SweepProgress| {
        let pct = p.done * 100 / p.total;
        if last.fetch_max(pct, Ordering::Relaxed) < pct && pct % 5 == 0 {
            eprintln!("progress {} {}/{} ({pct}%)", spec.name, p.done, p.total);
        }
    };
    let opts = SweepOptions {
        workers: run.workers,
        progress: if run.quiet { None } else { Some(&report) },
    };
    run_sweep_with(spec, &opts)
}

fn wrote(path: &Path) {
    println!("wrote {}", path.display());
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let mut cfg = RunConfig::load(&a.config)?;
    if let Some(dir) = &a.output_dir {
        cfg.output_dir = dir.clone();
    }
    let run = RunArgs {
        workers: a.run.workers.or(cfg.workers),
        quiet: a.run.quiet,
    };
    let map = run_spec(&cfg.spec, &run)?;
    create_dir(&cfg.output_dir)?;
    let name = &cfg.spec.name;
    let csv = cfg.output_dir.join(format!("{name}.csv"));
    write_map_csv(&map, &csv)?;
    wrote(&csv);
    if cfg.plots {
        if map.axis_values().len() > 1 {
            for e in 0..map.n_emitters() {
                let p = cfg.output_dir.join(format!("{name}_qd{}.svg", e + 1));
                render_heatmap(&map, e, &p)?;
                wrote(&p);
            }
        } else {
            let p = cfg.output_dir.join(format!("{name}.svg"));
            std::fs::write(&p, line_plot_svg(&line_cut_series(&map, 0, "", false)))?;
            wrote(&p);
        }
    }
    Ok(())
}

fn resample(v: &[f64], n: Option<usize>, key: &'static str) -> Result<Vec<f64>> {
    match n {
        None => Ok(v.to_vec()),
        Some(0) => Err(Error::param(key, "must be at least 1")),
        Some(_) if v.len() == 1 => Ok(v.to_vec()),
        Some(n) => Ok(linspace(v[0], v[v.len() - 1], n)),
    }
}

fn write_emitter_files(map: &OccupationMap, dir: &Path, stem: &str) -> Result<()> {
    for e in 0..map.n_emitters() {
        let p = dir.join(format!("{stem}_qd{}.csv", e + 1));
        write_emitter_csv(map, e, &p)?;
        wrote(&p);
    }
    Ok(())
}

fn figure(a: &FigureArgs) -> Result<()> {
    let mut spec = preset(&a.preset)?;
    spec.areas = resample(&spec.areas, a.area_points, "area_points")?;
    let values = resample(spec.axis.values(), a.axis_points, "axis_points")?;
    spec.axis = match spec.axis {
        crate::sweep::SweepAxis::Spacing { width, .. } => crate::sweep::SweepAxis::Spacing { values, width },
        crate::sweep::SweepAxis::Width { spacing, .. } => crate::sweep::SweepAxis::Width { values, spacing },
    };
    spec.validate()?;
    let dir = &a.output_dir;
    let svg_path = dir.join(format!("{}.svg", a.preset));

    if a.preset == "fig2e" {
        // Solid: positive chirp; dashed: negative chirp; both with phonons.
        // The phonon-free run is the reference for the positive branch.
        let pos = run_spec(&spec, &a.run)?;
        let neg_spec = SweepSpec {
            name: format!("{}_negchirp", spec.name),
            ..spec.with_chirp(-spec.chirp)
        };
        let neg = run_spec(&neg_spec, &a.run)?;
        let free_spec = SweepSpec {
            name: format!("{}_nophonons", spec.name),
            ..spec.without_phonons()
        };
        let free = run_spec(&free_spec, &a.run)?;
        create_dir(dir)?;
        write_emitter_files(&pos, dir, &spec.name)?;
        write_emitter_files(&neg, dir, &neg_spec.name)?;
        write_emitter_files(&free, dir, &free_spec.name)?;
        let mut series: Vec<Series> = line_cut_series(&pos, 0, " +φ″", false);
        series.extend(line_cut_series(&neg, 0, " −φ″", true));
        std::fs::write(&svg_path, line_plot_svg(&series))?;
        wrote(&svg_path);
        return Ok(());
    }

    let map = run_spec(&spec, &a.run)?;
    create_dir(dir)?;
    write_emitter_files(&map, dir, &spec.name)?;
    let svg = if map.axis_values().len() > 1 {
        panels_svg(&map)
    } else {
        line_plot_svg(&line_cut_series(&map, 0, "", false))
    };
    std::fs::write(&svg_path, svg)?;
    wrote(&svg_path);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::config("a", "b")), 2);
        assert_eq!(exit_code(&Error::UnknownPreset("x".into())), 2);
        let step = Error::StepSize { time: 0.0, local_error: 1.0, tolerance: 0.1 };
        assert_eq!(exit_code(&step), 3);
        let cell = Error::Cell {
            theta: 1.0,
            axis: "spacing_meV",
            value: 2.0,
            emitter: 3,
            source: Box::new(step),
        };
        assert_eq!(exit_code(&cell), 3);
        let line = error_fields(&cell);
        assert!(line.starts_with("kind=numerical theta_rad=1.0 spacing_meV=2.0 emitter_index=3 message=\""));
        assert!(!line.contains('\n'));
    }

    #[test]
    fn help_documents_flags() {
        let help = Cli::try_parse_from(["multinarp", "simulate", "--help"]).unwrap_err().to_string();
        for flag in ["--theta", "--detuning", "--chirp", "--no-notch", "--phonons", "--output"] {
            assert!(help.contains(flag), "{flag}");
        }
    }

    #[test]
    fn negative_values_parse() {
        let cli = Cli::try_parse_from(["multinarp", "simulate", "--chirp", "-0.5", "--detuning", "-2"]).unwrap();
        match cli.command {
            Command::Simulate(a) => {
                assert_eq!(a.pulse.chirp, -0.5);
                assert_eq!(a.detuning, -2.0);
            }
            _ => unreachable!(),
        }
    }
}
