//! Two-dimensional parameter sweeps (pulse area × notch spacing or notch
//! width) over N emitters, and the figure presets.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use crate::dynamics::{integrate_scaled, EmitterParams, IntegratorConfig};
use crate::error::{Error, Result};
use crate::phonon::PhononEnvironment;
use crate::pulseshape::{
    apply_notch_mask, apply_phase_mask, make_gaussian_spectrum, spectral_fwhm, symmetric_layout,
    synthesize_with, Chirp, FrequencyGrid, NotchSpec, SynthesisOptions, TemporalPulse,
    DEFAULT_MAX_DT, DEFAULT_POINTS, DEFAULT_SPAN_FWHMS,
};

/// Environment variable overriding the sweep worker count.
pub const WORKERS_ENV: &str = "MULTINARP_WORKERS";

/// Default area points (0 to 20π).
pub const DEFAULT_AREA_POINTS: usize = 81;
/// Default spacing points.
pub const DEFAULT_SPACING_POINTS: usize = 51;

/// Area window (rad) over which the plateau occupation is taken.
pub const PLATEAU_WINDOW: (f64, f64) = (8.0 * PI, 16.0 * PI);

/// The swept spectral parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    /// Notch spacing values (meV) at fixed notch width (meV).
    Spacing { values: Vec<f64>, width: f64 },
    /// Notch width values (meV) at fixed spacing (meV).
    Width { values: Vec<f64>, spacing: f64 },
}

impl SweepAxis {
    pub fn values(&self) -> &[f64] {
        match self {
            SweepAxis::Spacing { values, .. } | SweepAxis::Width { values, .. } => values,
        }
    }

    /// Column name with units.
    pub fn label(&self) -> &'static str {
        match self {
            SweepAxis::Spacing { .. } => "spacing_meV",
            SweepAxis::Width { .. } => "width_meV",
        }
    }

    /// `(spacing, width)` at axis value `value`.
    pub fn notch_geometry(&self, value: f64) -> (f64, f64) {
        match *self {
            SweepAxis::Spacing { width, .. } => (value, width),
            SweepAxis::Width { spacing, .. } => (spacing, value),
        }
    }
}

/// Spectral and time discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    pub n_points: usize,
    /// Spectral span in transform-limited FWHMs.
    pub span_fwhms: f64,
    /// Envelope sampling bound (ps).
    pub max_dt: f64,
    /// Time window (ps); `None` is ten chirped durations.
    pub t_span: Option<f64>,
    /// Halve the sampling interval.
    pub refine: bool,
    /// Integrator local error tolerance.
    pub tolerance: f64,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            n_points: DEFAULT_POINTS,
            span_fwhms: DEFAULT_SPAN_FWHMS,
            max_dt: DEFAULT_MAX_DT,
            t_span: None,
            refine: false,
            tolerance: IntegratorConfig::default().tolerance,
        }
    }
}

impl Discretization {
    pub fn synthesis(&self) -> SynthesisOptions {
        let opts = SynthesisOptions {
            t_span: self.t_span,
            max_dt: self.max_dt,
        };
        if self.refine {
            opts.refined()
        } else {
            opts
        }
    }

    pub fn grid(&self, tau0: f64) -> Result<FrequencyGrid> {
        FrequencyGrid::new(0.0, self.span_fwhms * spectral_fwhm(tau0), self.n_points)
    }
}

/// A full sweep job. Emitter `i` (1-based) sits on notch `i` at detuning
/// `(i − (N+1)/2)·s` from the spectral peak.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    /// Transform-limited pulse areas (rad).
    pub areas: Vec<f64>,
    pub axis: SweepAxis,
    pub n_emitters: usize,
    /// Spectral chirp φ″ (ps²).
    pub chirp: f64,
    /// Transform-limited intensity FWHM (ps).
    pub tau0: f64,
    pub phonons: Option<PhononEnvironment>,
    /// One per emitter; empty means all equal to one.
    pub dipole_scales: Vec<f64>,
    pub discretization: Discretization,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.areas.is_empty() || !strictly_increasing(&self.areas) {
            return Err(Error::param("areas", "must be nonempty and strictly increasing"));
        }
        if self.areas.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::param("areas", "must be finite and non-negative"));
        }
        let values = self.axis.values();
        if values.is_empty() || !strictly_increasing(values) {
            return Err(Error::param(
                "axis.values",
                "must be nonempty and strictly increasing",
            ));
        }
        match &self.axis {
            SweepAxis::Spacing { values, width } => {
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::param("axis.values", "spacings must be >= 0"));
                }
                if !(width.is_finite() && *width > 0.0) {
                    return Err(Error::param("axis.width", "must be positive"));
                }
            }
            SweepAxis::Width { values, spacing } => {
                if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(Error::param("axis.values", "widths must be positive"));
                }
                if !(spacing.is_finite() && *spacing >= 0.0) {
                    return Err(Error::param("axis.spacing", "must be >= 0"));
                }
            }
        }
        if self.n_emitters == 0 {
            return Err(Error::param("n_emitters", "must be at least 1"));
        }
        if !(self.tau0.is_finite() && self.tau0 > 0.0) {
            return Err(Error::param("tau0_ps", "must be positive"));
        }
        Chirp::new(self.chirp)?;
        if !self.dipole_scales.is_empty() {
            if self.dipole_scales.len() != self.n_emitters {
                return Err(Error::param(
                    "dipole_scales",
                    format!(
                        "expected {} values, got {}",
                        self.n_emitters,
                        self.dipole_scales.len()
                    ),
                ));
            }
            if self.dipole_scales.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                return Err(Error::param("dipole_scales", "must be positive"));
            }
        }
        if let Some(env) = &self.phonons {
            env.validate()?;
        }
        self.discretization.grid(self.tau0)?;
        let d = &self.discretization;
        if !(d.max_dt.is_finite() && d.max_dt > 0.0) {
            return Err(Error::param("max_dt_ps", "must be positive"));
        }
        if !(d.tolerance.is_finite() && d.tolerance > 0.0) {
            return Err(Error::param("tolerance", "must be positive"));
        }
        Ok(())
    }

    pub fn dipole(&self, emitter: usize) -> f64 {
        self.dipole_scales.get(emitter).copied().unwrap_or(1.0)
    }

    /// Emitter detunings (meV) for axis value `value`.
    pub fn detunings(&self, value: f64) -> Vec<f64> {
        let (spacing, _) = self.axis.notch_geometry(value);
        symmetric_layout(0.0, self.n_emitters, spacing)
    }

    /// Unit-area (pre-mask) driving pulse for axis value `value`.
    pub fn unit_pulse(&self, value: f64) -> Result<TemporalPulse> {
        let (spacing, width) = self.axis.notch_geometry(value);
        let grid = self.discretization.grid(self.tau0)?;
        let spectrum = make_gaussian_spectrum(self.tau0, 0.0, 1.0, grid)?;
        let notches = NotchSpec::symmetric(0.0, self.n_emitters, spacing, width)?;
        let shaped = apply_phase_mask(&apply_notch_mask(&spectrum, &notches), Chirp::new(self.chirp)?);
        synthesize_with(&shaped, &self.discretization.synthesis())
    }

    /// The same job with the chirp sign flipped.
    pub fn with_chirp(&self, chirp: f64) -> Self {
        Self {
            chirp,
            ..self.clone()
        }
    }

    pub fn without_phonons(&self) -> Self {
        Self {
            phonons: None,
            ..self.clone()
        }
    }
}

/// Final occupations on the (area, axis value) grid for every emitter.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationMap {
    pub spec: SweepSpec,
    /// Row-major `[area][axis value][emitter]`.
    pub values: Vec<f64>,
    pub version: String,
}

impl OccupationMap {
    pub fn areas(&self) -> &[f64] {
        &self.spec.areas
    }

    pub fn axis_values(&self) -> &[f64] {
        self.spec.axis.values()
    }

    pub fn n_emitters(&self) -> usize {
        self.spec.n_emitters
    }

    fn index(&self, area: usize, value: usize, emitter: usize) -> usize {
        (area * self.axis_values().len() + value) * self.n_emitters() + emitter
    }

    pub fn get(&self, area: usize, value: usize, emitter: usize) -> f64 {
        self.values[self.index(area, value, emitter)]
    }

    /// Occupation versus area at one axis value.
    pub fn line_cut(&self, value: usize, emitter: usize) -> Vec<f64> {
        (0..self.areas().len())
            .map(|a| self.get(a, value, emitter))
            .collect()
    }

    /// Minimum occupation over areas inside [`PLATEAU_WINDOW`]; `None` if no
    /// area falls in the window.
    pub fn plateau(&self, value: usize, emitter: usize) -> Option<f64> {
        let (lo, hi) = PLATEAU_WINDOW;
        let eps = 1e-9;
        self.areas()
            .iter()
            .enumerate()
            .filter(|(_, &a)| a >= lo - eps && a <= hi + eps)
            .map(|(i, _)| self.get(i, value, emitter))
            .reduce(f64::min)
    }

    /// Plateau minimized over all emitters.
    pub fn plateau_all(&self, value: usize) -> Option<f64> {
        (0..self.n_emitters())
            .filter_map(|e| self.plateau(value, e))
            .reduce(f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepProgress {
    pub done: usize,
    pub total: usize,
}

/// Execution controls for [`run_sweep_with`].
#[derive(Default, Clone, Copy)]
pub struct SweepOptions<'a> {
    /// Worker threads; `None` reads [`WORKERS_ENV`] and otherwise uses all
    /// available cores.
    pub workers: Option<usize>,
    /// Called after every completed cell, from worker threads.
    pub progress: Option<&'a (dyn Fn(SweepProgress) + Sync)>,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<OccupationMap> {
    run_sweep_with(spec, &SweepOptions::default())
}

/// Runs one integration per (area, axis value, emitter). Output does not
/// depend on the worker count or scheduling.
pub fn run_sweep_with(spec: &SweepSpec, opts: &SweepOptions) -> Result<OccupationMap> {
    spec.validate()?;
    let workers = opts
        .workers
        .or_else(|| std::env::var(WORKERS_ENV).ok()?.parse().ok())
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::param("workers", e.to_string()))?;

    let n_areas = spec.areas.len();
    let n_values = spec.axis.values().len();
    let n_em = spec.n_emitters;
    let total = n_areas * n_values * n_em;
    let done = AtomicUsize::new(0);
    let config = IntegratorConfig {
        tolerance: spec.discretization.tolerance,
        ..IntegratorConfig::final_only()
    };
    let env = spec.phonons.as_ref();

    // Column-major blocks: one per axis value, each [area][emitter].
    let columns: Vec<Result<Vec<f64>>> = pool.install(|| {
        spec.axis
            .values()
            .par_iter()
            .map(|&value| {
                let pulse = spec.unit_pulse(value)?;
                let detunings = spec.detunings(value);
                (0..n_areas * n_em)
                    .into_par_iter()
                    .map(|cell| {
                        let (a, e) = (cell / n_em, cell % n_em);
                        let theta = spec.areas[a];
                        let emitter = EmitterParams::new(detunings[e], spec.dipole(e))?;
                        let occ = integrate_scaled(&pulse, theta, &emitter, env, &config)
                            .map(|t| t.final_occupation())
                            .map_err(|err| Error::Cell {
                                theta,
                                axis: spec.axis.label(),
                                value,
                                emitter: e + 1,
                                source: Box::new(err),
                            })?;
                        if let Some(cb) = opts.progress {
                            let d = done.fetch_add(1, Ordering::Relaxed) + 1;
                            cb(SweepProgress { done: d, total });
                        }
                        Ok(occ)
                    })
                    .collect()
            })
            .collect()
    });

    let mut values = vec![0.0; total];
    for (v, column) in columns.into_iter().enumerate() {
        let column = column?;
        for a in 0..n_areas {
            for e in 0..n_em {
                values[(a * n_values + v) * n_em + e] = column[a * n_em + e];
            }
        }
    }
    Ok(OccupationMap {
        spec: spec.clone(),
        values,
        version: crate::VERSION.to_string(),
    })
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub const PRESETS: &[&str] = &[
    "fig2",
    "fig2e",
    "fig3c",
    "fig4a",
    "fig4b",
    "fig4c",
    "figS3_10qd",
];

/// Built-in sweep configurations.
///
/// * `fig2`: five emitters, δ = 1 meV, φ″ = 0.5 ps², τ₀ = 120 fs, spacing
///   1–6 meV, area 0–20π, no phonons.
/// * `fig2e`: the 3.4 meV line cut of `fig2` with phonons (positive chirp;
///   use [`SweepSpec::with_chirp`] for the negative branch).
/// * `fig3c`: two emitters, δ = 1 meV, φ″ = 0.3 ps², spacing 7 meV.
/// * `fig4a`/`fig4b`/`fig4c`: the two-emitter `fig3c` pulse (φ″ = 0.3 ps²)
///   with δ = 1.0/1.5/2.0 meV and spacing 0–8 meV.
/// * `figS3_10qd`: ten emitters, otherwise `fig2`, spacing 0.1–3 meV.
pub fn preset(name: &str) -> Result<SweepSpec> {
    let areas = linspace(0.0, 20.0 * PI, DEFAULT_AREA_POINTS);
    let base = SweepSpec {
        name: name.to_string(),
        areas,
        axis: SweepAxis::Spacing {
            values: linspace(1.0, 6.0, DEFAULT_SPACING_POINTS),
            width: 1.0,
        },
        n_emitters: 5,
        chirp: 0.5,
        tau0: 0.120,
        phonons: None,
        dipole_scales: vec![],
        discretization: Discretization::default(),
    };
    let fig4 = |width: f64| SweepSpec {
        axis: SweepAxis::Spacing {
            values: linspace(0.0, 8.0, DEFAULT_SPACING_POINTS),
            width,
        },
        n_emitters: 2,
        chirp: 0.3,
        ..base.clone()
    };
    let spec = match name {
        "fig2" => base,
        "fig2e" => SweepSpec {
            axis: SweepAxis::Spacing {
                values: vec![3.4],
                width: 1.0,
            },
            phonons: Some(PhononEnvironment::default()),
            ..base
        },
        "fig3c" => SweepSpec {
            axis: SweepAxis::Spacing {
                values: vec![7.0],
                width: 1.0,
            },
            n_emitters: 2,
            chirp: 0.3,
            ..base
        },
        "fig4a" => fig4(1.0),
        "fig4b" => fig4(1.5),
        "fig4c" => fig4(2.0),
        "figS3_10qd" => SweepSpec {
            axis: SweepAxis::Spacing {
                values: linspace(0.1, 3.0, 30),
                width: 1.0,
            },
            n_emitters: 10,
            ..base
        },
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(spec)
}
