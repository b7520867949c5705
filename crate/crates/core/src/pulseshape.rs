//! Spectral pulse construction, multi-notch amplitude and quadratic phase
//! masks, and Fourier synthesis of the rotating-frame Rabi envelope.
//!
//! Fourier convention: a temporal envelope `Ω(t)` (rad/ps) and its spectrum
//! `S(ν)` (rad) are related by
//!
//! ```text
//! S(ν) = ∫ Ω(t) e^{+iνt} dt,        Ω(t) = (1/2π) ∫ S(ν) e^{-iνt} dν
//! ```
//!
//! so `S(0)` is the pulse area of a real, positive envelope, and Parseval
//! reads `∫|Ω|² dt = (1/2π) ∫|S|² dν`. With this convention a positive
//! spectral phase curvature produces a frequency that rises in time
//! (`arg Ω ≈ -α t²`, α > 0).

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::units::HBAR;

/// Minimum number of spectral samples.
pub const MIN_POINTS: usize = 1 << 12;
/// Default number of spectral samples.
pub const DEFAULT_POINTS: usize = 1 << 14;
/// Default spectral span in units of the transform-limited intensity FWHM.
pub const DEFAULT_SPAN_FWHMS: f64 = 16.0;
/// Default time-window length in units of the chirped intensity FWHM.
pub const DEFAULT_SPAN_DURATIONS: f64 = 10.0;
/// Default upper bound on the envelope sampling interval (ps).
pub const DEFAULT_MAX_DT: f64 = 1.0e-3;
/// Envelope magnitude at the window edges, relative to the peak, above which
/// synthesis is rejected.
pub const EDGE_DECAY: f64 = 1.0e-6;

/// Spectral intensity FWHM (meV) of a Gaussian pulse with temporal
/// intensity FWHM `tau0` (ps).
pub fn spectral_fwhm(tau0: f64) -> f64 {
    4.0 * LN_2 * HBAR / tau0
}

/// Intensity FWHM (ps) of a Gaussian pulse of transform-limited duration
/// `tau0` after a quadratic spectral phase of curvature `phi2` (ps²).
pub fn chirped_duration(tau0: f64, phi2: f64) -> f64 {
    let stretch = 4.0 * LN_2 * phi2 / (tau0 * tau0);
    tau0 * (1.0 + stretch * stretch).sqrt()
}

/// Uniform grid of photon energies (meV). Sample `j` sits at
/// `center + (j - n/2) * span / n`, so the center is always a grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    center: f64,
    span: f64,
    n_points: usize,
}

impl FrequencyGrid {
    pub fn new(center: f64, span: f64, n_points: usize) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidGrid(format!("center {center} is not finite")));
        }
        if !(span.is_finite() && span > 0.0) {
            return Err(Error::InvalidGrid(format!("span {span} meV must be positive")));
        }
        if !n_points.is_power_of_two() || n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} must be a power of two >= {MIN_POINTS}"
            )));
        }
        Ok(Self {
            center,
            span,
            n_points,
        })
    }

    /// Default grid for a pulse of duration `tau0` centered at `center`.
    pub fn for_pulse(tau0: f64, center: f64) -> Result<Self> {
        Self::new(center, DEFAULT_SPAN_FWHMS * spectral_fwhm(tau0), DEFAULT_POINTS)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Grid spacing in meV.
    pub fn spacing(&self) -> f64 {
        self.span / self.n_points as f64
    }

    /// Signed index of sample `j` relative to the center.
    fn offset_index(&self, j: usize) -> i64 {
        j as i64 - (self.n_points / 2) as i64
    }

    /// Photon energy (meV) of sample `j`.
    pub fn energy(&self, j: usize) -> f64 {
        self.center + self.offset_index(j) as f64 * self.spacing()
    }

    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.energy(j))
    }

    pub fn lowest(&self) -> f64 {
        self.energy(0)
    }

    pub fn highest(&self) -> f64 {
        self.energy(self.n_points - 1)
    }
}

/// Quadratic spectral phase, `Φ(ω) = φ″ (ω - ω₀)² / 2` with φ″ in ps².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chirp {
    pub phi2: f64,
}

impl Chirp {
    pub fn new(phi2: f64) -> Result<Self> {
        if !phi2.is_finite() {
            return Err(Error::param("chirp_ps2", "must be finite"));
        }
        Ok(Self { phi2 })
    }
}

/// Gaussian spectral holes: `A(ω) = Π_i [1 - exp(-(ω - ω_i)² / δ²)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NotchSpec {
    centers: Vec<f64>,
    width: f64,
}

impl NotchSpec {
    /// `centers` and `width` in meV. Centers must be sorted ascending.
    pub fn new(centers: Vec<f64>, width: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::param("notch_centers", "at least one notch is required"));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("notch_centers", "must be finite"));
        }
        if centers.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("notch_centers", "must be sorted ascending"));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::param("notch_width_meV", "must be positive"));
        }
        Ok(Self { centers, width })
    }

    /// Notches at `center + (i - (n+1)/2) * spacing` for `i = 1..=n`.
    pub fn symmetric(center: f64, n: usize, spacing: f64, width: f64) -> Result<Self> {
        Self::new(symmetric_layout(center, n, spacing), width)
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Mask transmission at photon energy `energy` (meV).
    pub fn transmission(&self, energy: f64) -> f64 {
        self.centers
            .iter()
            .map(|&c| {
                let x = (energy - c) / self.width;
                1.0 - (-x * x).exp()
            })
            .product()
    }
}

/// Positions `center + (i - (n+1)/2) * spacing`, `i = 1..=n`.
pub fn symmetric_layout(center: f64, n: usize, spacing: f64) -> Vec<f64> {
    let mid = (n as f64 + 1.0) / 2.0;
    (1..=n)
        .map(|i| center + (i as f64 - mid) * spacing)
        .collect()
}

/// Complex spectral amplitude on a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPulse {
    grid: FrequencyGrid,
    amplitude: Vec<Complex64>,
    tau0: f64,
    carrier: f64,
    phi2: f64,
}

impl SpectralPulse {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    /// Transform-limited intensity FWHM (ps) of the unmasked pulse.
    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    /// Spectral peak ω₀ (meV).
    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    /// Total quadratic phase curvature applied so far (ps²).
    pub fn phi2(&self) -> f64 {
        self.phi2
    }

    /// `(1/2π) Σ |S|² Δν`, the envelope energy expected from Parseval.
    pub fn energy(&self) -> f64 {
        let dnu = self.grid.spacing() / HBAR;
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * dnu / (2.0 * PI)
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for a in &mut out.amplitude {
            *a *= factor;
        }
        out
    }
}

/// Transform-limited Gaussian spectrum whose unmasked synthesis has
/// intensity FWHM `tau0` (ps) and pulse area `theta` (rad), peaked at
/// `carrier` (meV).
pub fn make_gaussian_spectrum(
    tau0: f64,
    carrier: f64,
    theta: f64,
    grid: FrequencyGrid,
) -> Result<SpectralPulse> {
    if !(tau0.is_finite() && tau0 > 0.0) {
        return Err(Error::param("tau0_ps", "must be positive"));
    }
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(Error::param("theta_rad", "must be finite and non-negative"));
    }
    if !carrier.is_finite() {
        return Err(Error::param("carrier_meV", "must be finite"));
    }
    let fwhm = spectral_fwhm(tau0);
    if grid.span() < 8.0 * fwhm {
        return Err(Error::InvalidGrid(format!(
            "span {:.3} meV is below 8x the spectral FWHM ({:.3} meV)",
            grid.span(),
            8.0 * fwhm
        )));
    }
    if carrier - 4.0 * fwhm < grid.lowest() || carrier + 4.0 * fwhm > grid.highest() {
        return Err(Error::InvalidGrid(format!(
            "grid [{:.3}, {:.3}] meV does not cover {carrier:.3} +/- {:.3} meV",
            grid.lowest(),
            grid.highest(),
            4.0 * fwhm
        )));
    }
    // Field spectrum exp(-ν² τ₀² / (8 ln 2)) has intensity FWHM 4 ln2 / τ₀.
    let width = tau0 * tau0 / (8.0 * LN_2);
    let amplitude = grid
        .energies()
        .map(|e| {
            let nu = (e - carrier) / HBAR;
            Complex64::new(theta * (-width * nu * nu).exp(), 0.0)
        })
        .collect();
    Ok(SpectralPulse {
        grid,
        amplitude,
        tau0,
        carrier,
        phi2: 0.0,
    })
}

/// Adds the quadratic phase `φ″ (ω - ω₀)² / 2` about the spectral peak.
pub fn apply_phase_mask(pulse: &SpectralPulse, chirp: Chirp) -> SpectralPulse {
    let mut out = pulse.clone();
    if chirp.phi2 == 0.0 {
        return out;
    }
    let carrier = pulse.carrier;
    for (a, e) in out.amplitude.iter_mut().zip(pulse.grid.energies()) {
        let nu = (e - carrier) / HBAR;
        *a *= Complex64::from_polar(1.0, 0.5 * chirp.phi2 * nu * nu);
    }
    out.phi2 += chirp.phi2;
    out
}

/// Multiplies the amplitude pointwise by the notch transmission `A(ω)`.
pub fn apply_notch_mask(pulse: &SpectralPulse, notches: &NotchSpec) -> SpectralPulse {
    let mut out = pulse.clone();
    for (a, e) in out.amplitude.iter_mut().zip(pulse.grid.energies()) {
        *a *= notches.transmission(e);
    }
    out
}

/// Linear frequency sweep rate α (ps⁻²) of a Gaussian pulse with
/// transform-limited intensity FWHM `tau0` after spectral chirp φ″:
/// `α = 2φ″ / [τ₀⁴ / (2 ln 2)² + (2φ″)²]`. The instantaneous frequency of
/// the field is `ω_L + 2αt`.
pub fn chirp_rate(chirp: Chirp, tau0: f64) -> f64 {
    let two_phi = 2.0 * chirp.phi2;
    if two_phi == 0.0 {
        return 0.0;
    }
    let tl = tau0.powi(4) / (2.0 * LN_2).powi(2);
    two_phi / (tl + two_phi * two_phi)
}

/// Rotating-frame Rabi envelope sampled on a uniform time grid.
///
/// The rotating frame is the center of the spectral grid the pulse was
/// synthesized from. `carrier_offset` is the spectral peak minus that
/// frame frequency (rad/ps), zero for the usual centered construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalPulse {
    t_start: f64,
    dt: f64,
    envelope: Vec<Complex64>,
    chirp_rate: f64,
    carrier_offset: f64,
}

impl TemporalPulse {
    /// Samples `envelope(t)` at `t_start + k dt` for `k < n`. `n` must be odd
    /// so the grid holds a whole number of integrator steps.
    pub fn from_fn(
        t_start: f64,
        dt: f64,
        n: usize,
        chirp_rate: f64,
        envelope: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let samples = (0..n).map(|k| envelope(t_start + k as f64 * dt)).collect();
        Self::from_samples(t_start, dt, samples, chirp_rate)
    }

    pub fn from_samples(
        t_start: f64,
        dt: f64,
        envelope: Vec<Complex64>,
        chirp_rate: f64,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::param("dt_ps", "must be positive"));
        }
        if envelope.len() < 3 || envelope.len() % 2 == 0 {
            return Err(Error::param(
                "envelope",
                format!("needs an odd number (>= 3) of samples, got {}", envelope.len()),
            ));
        }
        if envelope.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::param("envelope", "contains non-finite samples"));
        }
        if !chirp_rate.is_finite() {
            return Err(Error::param("chirp_rate", "must be finite"));
        }
        Ok(Self {
            t_start,
            dt,
            envelope,
            chirp_rate,
            carrier_offset: 0.0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.envelope.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envelope.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.envelope.len()).map(|k| self.time(k))
    }

    pub fn envelope(&self) -> &[Complex64] {
        &self.envelope
    }

    /// Ideal linear sweep rate α (ps⁻²) of the underlying chirp.
    pub fn chirp_rate(&self) -> f64 {
        self.chirp_rate
    }

    pub fn carrier_offset(&self) -> f64 {
        self.carrier_offset
    }

    /// `Σ |Ω|² dt`.
    pub fn energy(&self) -> f64 {
        self.envelope.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dt
    }

    pub fn peak(&self) -> f64 {
        self.envelope.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for z in &mut out.envelope {
            *z *= factor;
        }
        out
    }
}

/// `Θ = Σ |Ω(t)| Δt`.
pub fn pulse_area(pulse: &TemporalPulse) -> f64 {
    pulse.envelope.iter().map(|z| z.norm()).sum::<f64>() * pulse.dt
}

/// Controls for [`synthesize_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    /// Length of the returned time window (ps). `None` uses
    /// [`DEFAULT_SPAN_DURATIONS`] chirped durations.
    pub t_span: Option<f64>,
    /// Upper bound on the sampling interval (ps); the spectrum is zero-padded
    /// until the FFT time step is at or below it.
    pub max_dt: f64,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            t_span: None,
            max_dt: DEFAULT_MAX_DT,
        }
    }
}

impl SynthesisOptions {
    /// Halves the sampling interval (integrator refinement).
    pub fn refined(self) -> Self {
        Self {
            max_dt: self.max_dt / 2.0,
            ..self
        }
    }
}

/// Default window length for `pulse`: ten chirped intensity FWHMs.
pub fn default_time_span(pulse: &SpectralPulse) -> f64 {
    DEFAULT_SPAN_DURATIONS * chirped_duration(pulse.tau0, pulse.phi2)
}

/// Synthesizes the envelope over a window of `t_span` ps centered on the
/// pulse arrival, using the default sampling interval.
pub fn synthesize(pulse: &SpectralPulse, t_span: f64) -> Result<TemporalPulse> {
    synthesize_with(
        pulse,
        &SynthesisOptions {
            t_span: Some(t_span),
            ..Default::default()
        },
    )
}

/// Discrete Fourier synthesis of the rotating-frame envelope.
///
/// Without an explicit `t_span` the window starts at ten chirped durations
/// and is widened once to the reported required span if notch-induced
/// structure outlasts it.
pub fn synthesize_with(pulse: &SpectralPulse, opts: &SynthesisOptions) -> Result<TemporalPulse> {
    match opts.t_span {
        Some(t_span) => synthesize_window(pulse, t_span, opts.max_dt),
        None => match synthesize_window(pulse, default_time_span(pulse), opts.max_dt) {
            Err(Error::EnvelopeNotDecayed { required_span, .. }) => {
                synthesize_window(pulse, 1.1 * required_span, opts.max_dt)
            }
            other => other,
        },
    }
}

fn synthesize_window(pulse: &SpectralPulse, t_span: f64, max_dt: f64) -> Result<TemporalPulse> {
    if !(t_span.is_finite() && t_span > 0.0) {
        return Err(Error::param("t_span_ps", "must be positive"));
    }
    if !(max_dt.is_finite() && max_dt > 0.0) {
        return Err(Error::param("max_dt_ps", "must be positive"));
    }
    let grid = pulse.grid;
    let dnu = grid.spacing() / HBAR;
    let period = 2.0 * PI / dnu;
    if t_span >= period {
        return Err(Error::InvalidGrid(format!(
            "spectral spacing {:.4e} meV gives a {period:.2} ps time period, \
             shorter than the requested {t_span:.2} ps window; \
             spacing must be below {:.4e} meV",
            grid.spacing(),
            2.0 * PI * HBAR / t_span
        )));
    }

    let wanted = (period / max_dt).ceil() as usize;
    let n_fft = smooth_size(wanted.max(grid.n_points()));
    let dt = period / n_fft as f64;

    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    for (j, &a) in pulse.amplitude.iter().enumerate() {
        let bin = grid.offset_index(j).rem_euclid(n_fft as i64) as usize;
        buf[bin] = a;
    }
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);
    let norm = dnu / (2.0 * PI);

    let half = ((0.5 * t_span / dt).floor() as usize).min(n_fft / 2 - 1);
    let envelope: Vec<Complex64> = (0..=2 * half)
        .map(|k| {
            let bin = (k as i64 - half as i64).rem_euclid(n_fft as i64) as usize;
            buf[bin] * norm
        })
        .collect();

    let peak = buf.iter().map(|z| z.norm()).fold(0.0, f64::max) * norm;
    if peak > 0.0 {
        let edge = envelope[0].norm().max(envelope[2 * half].norm());
        if edge > EDGE_DECAY * peak {
            // Furthest sample (in periodic time) still above the threshold.
            let reach = buf
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm() * norm > EDGE_DECAY * peak)
                .map(|(k, _)| {
                    let k = k as i64;
                    let signed = if k > n_fft as i64 / 2 { k - n_fft as i64 } else { k };
                    signed.unsigned_abs() as f64 * dt
                })
                .fold(0.0, f64::max);
            return Err(Error::EnvelopeNotDecayed {
                edge_ratio: edge / peak,
                required_span: 2.0 * reach + 2.0 * dt,
            });
        }
    }

    Ok(TemporalPulse {
        t_start: -(half as f64) * dt,
        dt,
        envelope,
        chirp_rate: chirp_rate(Chirp { phi2: pulse.phi2 }, pulse.tau0),
        carrier_offset: (pulse.carrier - grid.center()) / HBAR,
    })
}

/// Smallest integer `>= n` with no prime factors above 5.
fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TAU0: f64 = 0.120;

    fn tl(theta: f64) -> SpectralPulse {
        let grid = FrequencyGrid::for_pulse(TAU0, 0.0).unwrap();
        make_gaussian_spectrum(TAU0, 0.0, theta, grid).unwrap()
    }

    /// Full width at half maximum of a sampled curve, by linear
    /// interpolation of the outermost half-maximum crossings.
    fn fwhm(xs: &[f64], ys: &[f64]) -> f64 {
        let max = ys.iter().cloned().fold(f64::MIN, f64::max);
        let half = max / 2.0;
        let first = ys.iter().position(|&y| y >= half).unwrap();
        let last = ys.iter().rposition(|&y| y >= half).unwrap();
        let cross = |i: usize, j: usize| {
            xs[i] + (half - ys[i]) * (xs[j] - xs[i]) / (ys[j] - ys[i])
        };
        cross(last, last + 1) - cross(first - 1, first)
    }

    #[test]
    fn grid_rejects_small_or_odd_sizes() {
        assert!(FrequencyGrid::new(0.0, 100.0, 1000).is_err());
        assert!(FrequencyGrid::new(0.0, 100.0, 1 << 11).is_err());
        assert!(FrequencyGrid::new(0.0, -1.0, 1 << 12).is_err());
        let g = FrequencyGrid::new(2.0, 100.0, 1 << 12).unwrap();
        assert_eq!(g.energy(g.n_points() / 2), 2.0);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let fw = spectral_fwhm(TAU0);
        let grid = FrequencyGrid::new(0.0, 6.0 * fw, 1 << 12).unwrap();
        assert!(matches!(
            make_gaussian_spectrum(TAU0, 0.0, 1.0, grid),
            Err(Error::InvalidGrid(_))
        ));
        // Wide enough, but the pulse sits off to one side.
        let grid = FrequencyGrid::new(0.0, 10.0 * fw, 1 << 12).unwrap();
        assert!(make_gaussian_spectrum(TAU0, 2.0 * fw, 1.0, grid).is_err());
    }

    #[test]
    fn spectral_fwhm_of_120_fs_pulse() {
        // Analytic Gaussian pair: Δν = 4 ln2 / τ₀ in rad/ps.
        let analytic = 4.0 * LN_2 / TAU0 * 0.6582119;
        assert_relative_eq!(spectral_fwhm(TAU0), analytic, max_relative = 1e-12);
        assert!((analytic - 15.2).abs() < 0.05);
        // Numerical FWHM of the sampled spectral intensity.
        let p = tl(1.0);
        let xs: Vec<f64> = p.grid().energies().collect();
        let ys: Vec<f64> = p.amplitude().iter().map(|a| a.norm_sqr()).collect();
        assert_relative_eq!(fwhm(&xs, &ys), analytic, max_relative = 1e-4);
    }

    #[test]
    fn zero_area_is_zero_amplitude() {
        assert!(tl(0.0).amplitude().iter().all(|a| *a == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn amplitude_is_linear_in_area() {
        let a = tl(1.3);
        let b = tl(2.6);
        for (x, y) in a.amplitude().iter().zip(b.amplitude()) {
            assert_relative_eq!(2.0 * x.re, y.re, max_relative = 1e-15);
        }
    }

    #[test]
    fn zero_chirp_is_identity() {
        let p = tl(1.0);
        assert_eq!(apply_phase_mask(&p, Chirp { phi2: 0.0 }), p);
    }

    #[test]
    fn phase_mask_preserves_magnitude() {
        let p = apply_notch_mask(&tl(1.0), &NotchSpec::symmetric(0.0, 3, 3.0, 1.0).unwrap());
        let q = apply_phase_mask(&p, Chirp { phi2: 0.5 });
        for (a, b) in p.amplitude().iter().zip(q.amplitude()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-15 * a.norm().max(1e-300));
        }
        assert_relative_eq!(p.energy(), q.energy(), max_relative = 1e-13);
    }

    #[test]
    fn notch_transmission_values() {
        let n = NotchSpec::new(vec![1.5], 0.8).unwrap();
        assert_eq!(n.transmission(1.5), 0.0);
        assert_relative_eq!(n.transmission(1.5 + 0.8), 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
        assert!((n.transmission(2.3) - 0.63212).abs() < 1e-5);
        let two = NotchSpec::new(vec![-10.0, 10.0], 1.0).unwrap();
        assert!((two.transmission(0.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn notch_spec_validation() {
        assert!(NotchSpec::new(vec![], 1.0).is_err());
        assert!(NotchSpec::new(vec![1.0, 0.0], 1.0).is_err());
        assert!(NotchSpec::new(vec![0.0], 0.0).is_err());
        assert_eq!(symmetric_layout(0.0, 5, 3.4), vec![-6.8, -3.4, 0.0, 3.4, 6.8]);
        assert_eq!(symmetric_layout(1.0, 2, 7.0), vec![-2.5, 4.5]);
    }

    #[test]
    fn on_grid_notch_is_exactly_zero() {
        let p = tl(1.0);
        let g = *p.grid();
        let center = g.energy(g.n_points() / 2 + 100);
        let q = apply_notch_mask(&p, &NotchSpec::new(vec![center], 1.0).unwrap());
        assert_eq!(q.amplitude()[g.n_points() / 2 + 100].norm(), 0.0);
    }

    #[test]
    fn chirp_rate_values() {
        assert_eq!(chirp_rate(Chirp { phi2: 0.0 }, TAU0), 0.0);
        // Direct evaluation of 2φ″ / [τ₀⁴/(2 ln2)² + (2φ″)²].
        let direct = |phi2: f64| {
            let ln2x2 = 2.0 * 2.0f64.ln();
            2.0 * phi2 / (TAU0.powi(4) / (ln2x2 * ln2x2) + 4.0 * phi2 * phi2)
        };
        assert_relative_eq!(chirp_rate(Chirp { phi2: 0.5 }, TAU0), direct(0.5), max_relative = 1e-14);
        assert!((chirp_rate(Chirp { phi2: 0.5 }, TAU0) - 0.99989).abs() < 1e-5);
        assert!((chirp_rate(Chirp { phi2: 0.3 }, TAU0) - 1.6662).abs() < 1e-4);
        assert!(chirp_rate(Chirp { phi2: -0.3 }, TAU0) < 0.0);
    }

    #[test]
    fn unmasked_synthesis_is_tl_gaussian() {
        let p = tl(PI);
        let t = synthesize_with(&p, &SynthesisOptions::default()).unwrap();
        assert_relative_eq!(pulse_area(&t), PI, max_relative = 1e-6);
        let xs: Vec<f64> = t.times().collect();
        let ys: Vec<f64> = t.envelope().iter().map(|z| z.norm_sqr()).collect();
        assert_relative_eq!(fwhm(&xs, &ys), TAU0, max_relative = 1e-3);
        let peak = t.peak();
        for z in t.envelope().iter().filter(|z| z.norm() > 1e-3 * peak) {
            assert!(z.im.abs() < 1e-9 * peak);
            assert!(z.re > 0.0);
        }
    }

    #[test]
    fn chirped_duration_matches_numerical_fwhm() {
        let analytic = chirped_duration(TAU0, 0.5);
        assert!((analytic - 11.6).abs() < 0.06);
        let p = apply_phase_mask(&tl(1.0), Chirp { phi2: 0.5 });
        let t = synthesize_with(&p, &SynthesisOptions::default()).unwrap();
        let xs: Vec<f64> = t.times().collect();
        let ys: Vec<f64> = t.envelope().iter().map(|z| z.norm_sqr()).collect();
        assert_relative_eq!(fwhm(&xs, &ys), analytic, max_relative = 1e-4);
    }

    #[test]
    fn short_window_is_rejected_with_required_span() {
        let p = apply_phase_mask(&tl(1.0), Chirp { phi2: 0.5 });
        match synthesize(&p, 20.0) {
            Err(Error::EnvelopeNotDecayed { required_span, .. }) => {
                assert!(required_span > 70.0 && required_span < 76.0, "{required_span}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn window_longer_than_period_is_rejected() {
        let p = tl(1.0);
        let period = 2.0 * PI * HBAR / p.grid().spacing();
        assert!(matches!(synthesize(&p, period * 1.1), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn area_scales_linearly() {
        let t = synthesize_with(&tl(1.0), &SynthesisOptions::default()).unwrap();
        assert_relative_eq!(pulse_area(&t.scaled(3.0)), 3.0 * pulse_area(&t), max_relative = 1e-14);
        assert_eq!(pulse_area(&t.scaled(0.0)), 0.0);
    }

    #[test]
    fn refinement_halves_the_step() {
        let p = tl(1.0);
        let a = synthesize_with(&p, &SynthesisOptions::default()).unwrap();
        let b = synthesize_with(&p, &SynthesisOptions::default().refined()).unwrap();
        assert!(b.dt() <= 0.5 * DEFAULT_MAX_DT);
        assert!(a.dt() <= DEFAULT_MAX_DT);
    }

    #[test]
    fn from_samples_requires_odd_length() {
        let z = Complex64::new(0.0, 0.0);
        assert!(TemporalPulse::from_samples(0.0, 0.1, vec![z; 4], 0.0).is_err());
        assert!(TemporalPulse::from_samples(0.0, 0.1, vec![z; 5], 0.0).is_ok());
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size(7), 8);
        assert_eq!(smooth_size(16384), 16384);
        assert_eq!(smooth_size(278_001), 279_936);
    }
}
