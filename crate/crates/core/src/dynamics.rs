//! Driven two-level (optical Bloch) dynamics and dressed-state diagnostics.
//!
//! In the frame rotating at the laser frame frequency ω_L the Hamiltonian is
//!
//! ```text
//! H(t) = Δ |1⟩⟨1| + ½ [Ω_d(t) |1⟩⟨0| + Ω_d*(t) |0⟩⟨1|],   Ω_d = d Ω(t)
//! ```
//!
//! with Δ = ω_qd − ω_L (rad/ps). The density matrix is carried as the
//! exciton occupation ρ₁₁ and the coherence ρ₀₁ = ⟨0|ρ|1⟩:
//!
//! ```text
//! dρ₁₁/dt = Im(Ω_d ρ₀₁)
//! dρ₀₁/dt = iΔ ρ₀₁ − i (Ω_d*/2)(2ρ₁₁ − 1)
//! ```
//!
//! The integrator is classical RK4 with step `2 dt` on the envelope grid,
//! taking the odd samples as stage midpoints, so no envelope interpolation
//! is ever needed. Refinement is done by synthesizing the envelope on a
//! finer grid (see [`SynthesisOptions::refined`](crate::pulseshape::SynthesisOptions::refined)).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phonon::{dressed_rates, PhononEnvironment};
use crate::pulseshape::{TemporalPulse, EDGE_DECAY};
use crate::units::{mev_to_rad_per_ps, HBAR};

/// One emitter: detuning Δ = ω_qd − ω_L (meV) and dipole scale d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterParams {
    pub detuning: f64,
    pub dipole_scale: f64,
}

impl EmitterParams {
    pub fn new(detuning: f64, dipole_scale: f64) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::param("detuning_meV", "must be finite"));
        }
        if !(dipole_scale.is_finite() && dipole_scale > 0.0) {
            return Err(Error::param("dipole_scale", "must be positive"));
        }
        Ok(Self {
            detuning,
            dipole_scale,
        })
    }

    pub fn resonant() -> Self {
        Self {
            detuning: 0.0,
            dipole_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    /// ρ₁₁
    pub occupation: f64,
    /// ρ₀₁
    pub coherence: Complex64,
}

impl BlochState {
    pub fn ground() -> Self {
        Self {
            occupation: 0.0,
            coherence: Complex64::new(0.0, 0.0),
        }
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        let p = self.occupation;
        (1.0 - p).powi(2) + p * p + 2.0 * self.coherence.norm_sqr()
    }

    /// `|ρ₀₁|² − ρ₁₁(1 − ρ₁₁)`, non-positive for a physical state.
    pub fn positivity_excess(&self) -> f64 {
        self.coherence.norm_sqr() - self.occupation * (1.0 - self.occupation)
    }

    fn axpy(&self, h: f64, d: &BlochState) -> BlochState {
        BlochState {
            occupation: self.occupation + h * d.occupation,
            coherence: self.coherence + d.coherence * h,
        }
    }
}

/// Which frame the equations are integrated in. Final occupations do not
/// depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// Detuning as the static `Δ|1⟩⟨1|` term; chirp lives in the envelope.
    #[default]
    Laser,
    /// Detuning folded into the drive: `Ω_d(t) e^{+iΔt}`, no static term.
    Emitter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Keep every `stride`-th step in the trajectory (the final state is
    /// always kept). `0` keeps only the initial and final states.
    pub stride: usize,
    /// Largest tolerated per-step local error estimate.
    pub tolerance: f64,
    pub frame: Frame,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            stride: 1,
            tolerance: 1e-5,
            frame: Frame::Laser,
        }
    }
}

impl IntegratorConfig {
    /// Configuration for sweeps: no intermediate storage.
    pub fn final_only() -> Self {
        Self {
            stride: 0,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlochState>,
    /// Step count between stored states.
    pub stride: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> BlochState {
        *self.states.last().expect("trajectory always holds the final state")
    }

    pub fn final_occupation(&self) -> f64 {
        self.final_state().occupation
    }
}

/// Integrates from the ground state with the default configuration.
pub fn integrate(
    pulse: &TemporalPulse,
    emitter: &EmitterParams,
    env: Option<&PhononEnvironment>,
) -> Result<Trajectory> {
    integrate_scaled(pulse, 1.0, emitter, env, &IntegratorConfig::default())
}

/// Integrates with the drive `area_scale · d · Ω(t)`.
pub fn integrate_scaled(
    pulse: &TemporalPulse,
    area_scale: f64,
    emitter: &EmitterParams,
    env: Option<&PhononEnvironment>,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let env = env.filter(|e| e.enabled);
    if let Some(env) = env {
        env.validate()?;
    }
    if !(area_scale.is_finite() && area_scale >= 0.0) {
        return Err(Error::param("area_scale", "must be finite and non-negative"));
    }
    check_decay(pulse)?;

    let drive = Drive::new(pulse, area_scale * emitter.dipole_scale, emitter, env, config.frame);
    check_step(pulse, &drive, config.tolerance)?;

    let n = pulse.len();
    let h = 2.0 * pulse.dt();
    let steps = (n - 1) / 2;
    let mut state = BlochState::ground();
    let mut times = vec![pulse.time(0)];
    let mut states = vec![state];

    let mut at_start = drive.sample(0);
    for step in 0..steps {
        let k = 2 * step;
        let at_mid = drive.sample(k + 1);
        let at_end = drive.sample(k + 2);

        let k1 = drive.rhs(&state, &at_start);
        let k2 = drive.rhs(&state.axpy(0.5 * h, &k1), &at_mid);
        let k3 = drive.rhs(&state.axpy(0.5 * h, &k2), &at_mid);
        let k4 = drive.rhs(&state.axpy(h, &k3), &at_end);
        state = BlochState {
            occupation: state.occupation
                + h / 6.0
                    * (k1.occupation + 2.0 * k2.occupation + 2.0 * k3.occupation + k4.occupation),
            coherence: state.coherence
                + (k1.coherence + k2.coherence * 2.0 + k3.coherence * 2.0 + k4.coherence)
                    * (h / 6.0),
        };
        at_start = at_end;

        let last = step + 1 == steps;
        if last || (config.stride > 0 && (step + 1) % config.stride == 0) {
            times.push(pulse.time(k + 2));
            states.push(state);
        }
    }

    Ok(Trajectory {
        times,
        states,
        stride: config.stride,
    })
}

fn check_decay(pulse: &TemporalPulse) -> Result<()> {
    let peak = pulse.peak();
    if peak == 0.0 {
        return Ok(());
    }
    let env = pulse.envelope();
    let edge = env[0].norm().max(env[env.len() - 1].norm());
    if edge > EDGE_DECAY * peak {
        return Err(Error::EnvelopeNotDecayed {
            edge_ratio: edge / peak,
            required_span: f64::NAN,
        });
    }
    Ok(())
}

/// Rejects grids on which some RK4 step would exceed `tolerance`.
///
/// The local error of one step of length `h` is estimated as
/// `h⁵/120 · (ν⁵ + |Ω⁽⁴⁾|)`, where ν bounds the generator norm over the
/// step and the fourth derivative of the drive comes from a five-point
/// difference.
fn check_step(pulse: &TemporalPulse, drive: &Drive, tolerance: f64) -> Result<()> {
    let n = pulse.len();
    let dt = pulse.dt();
    let h = 2.0 * dt;
    let omega = |k: usize| drive.omega(k);
    let mut worst = (0.0f64, 0.0f64);
    for k in (0..n - 1).step_by(2) {
        let mut nu = 0.0f64;
        for j in k..=k + 2 {
            let rate = drive.rate_bound(j);
            nu = nu.max((drive.static_detuning.powi(2) + omega(j).norm_sqr()).sqrt() + rate);
        }
        let mut d4 = 0.0f64;
        if k >= 2 && k + 2 < n {
            let c = k;
            let fourth = omega(c - 2) - omega(c - 1) * 4.0 + omega(c) * 6.0 - omega(c + 1) * 4.0
                + omega(c + 2);
            d4 = fourth.norm() / dt.powi(4);
        }
        let err = h.powi(5) / 120.0 * (nu.powi(5) + d4);
        if err > worst.0 {
            worst = (err, pulse.time(k + 1));
        }
    }
    if worst.0 > tolerance {
        return Err(Error::StepSize {
            time: worst.1,
            local_error: worst.0,
            tolerance,
        });
    }
    Ok(())
}

/// Drive and relaxation coefficients at one envelope sample.
#[derive(Debug, Clone, Copy)]
struct Sample {
    omega: Complex64,
    relax: Option<Relaxation>,
}

/// Dressed-basis relaxation at one instant: `cos 2θ`, `sin 2θ`, the rates
/// already scaled by `sin² 2θ`, and `e^{i arg Ω}` mapping the frame coherence
/// to the real-drive (adiabatic) frame.
#[derive(Debug, Clone, Copy)]
struct Relaxation {
    cos2: f64,
    sin2: f64,
    emit: f64,
    absorb: f64,
    rotor: Complex64,
}

struct Drive<'a> {
    pulse: &'a TemporalPulse,
    scale: f64,
    static_detuning: f64,
    /// Δ − Δ_frame: phase rate folded into the envelope by the frame.
    folded: f64,
    detuning: f64,
    env: Option<&'a PhononEnvironment>,
}

impl<'a> Drive<'a> {
    fn new(
        pulse: &'a TemporalPulse,
        scale: f64,
        emitter: &EmitterParams,
        env: Option<&'a PhononEnvironment>,
        frame: Frame,
    ) -> Self {
        let detuning = mev_to_rad_per_ps(emitter.detuning);
        let (static_detuning, folded) = match frame {
            Frame::Laser => (detuning, 0.0),
            Frame::Emitter => (0.0, detuning),
        };
        Self {
            pulse,
            scale,
            static_detuning,
            folded,
            detuning,
            env,
        }
    }

    fn omega(&self, k: usize) -> Complex64 {
        let raw = self.pulse.envelope()[k] * self.scale;
        if self.folded == 0.0 {
            raw
        } else {
            raw * Complex64::from_polar(1.0, self.folded * self.pulse.time(k))
        }
    }

    /// Upper bound on the relaxation rate at sample `k`.
    fn rate_bound(&self, k: usize) -> f64 {
        match self.sample(k).relax {
            Some(r) => r.emit + r.absorb,
            None => 0.0,
        }
    }

    fn sample(&self, k: usize) -> Sample {
        let omega = self.omega(k);
        let relax = self.env.and_then(|env| {
            let t = self.pulse.time(k);
            let alpha = self.pulse.chirp_rate();
            let offset = self.pulse.carrier_offset();
            // Ideal-chirp detuning: the laser sweeps as offset + 2αt.
            let inst = self.detuning - offset - 2.0 * alpha * t;
            let mag = omega.norm();
            let split = inst.hypot(mag);
            if split == 0.0 || mag == 0.0 {
                return None;
            }
            let (emit, absorb) = dressed_rates(split * HBAR, env);
            let sin2 = mag / split;
            let mix = sin2 * sin2;
            // The dressed states take the drive's actual phase, which for an
            // ideal chirped Gaussian is the quadratic above plus a constant.
            Some(Relaxation {
                cos2: inst / split,
                sin2,
                emit: emit * mix,
                absorb: absorb * mix,
                rotor: omega / mag,
            })
        });
        Sample { omega, relax }
    }

    fn rhs(&self, s: &BlochState, at: &Sample) -> BlochState {
        let i = Complex64::i();
        let inversion = 2.0 * s.occupation - 1.0;
        let mut d = BlochState {
            occupation: (at.omega * s.coherence).im,
            coherence: i * self.static_detuning * s.coherence
                - i * at.omega.conj() * (0.5 * inversion),
        };
        if let Some(r) = at.relax {
            let (dp, dc) = relax(s, &r);
            d.occupation += dp;
            d.coherence += dc;
        }
        d
    }
}

/// Dressed-state relaxation `|+⟩ → |−⟩` at rate `emit` and back at
/// `absorb`, with the dressed coherence decaying at half their sum.
/// `|+⟩ = (sin θ, cos θ)`, `|−⟩ = (cos θ, −sin θ)` in the (|0⟩, |1⟩) basis.
fn relax(s: &BlochState, r: &Relaxation) -> (f64, Complex64) {
    let (c, sn) = (r.cos2, r.sin2);
    let lo = 0.5 * (1.0 - c); // sin²θ
    let hi = 0.5 * (1.0 + c); // cos²θ
    let p11 = s.occupation;
    let p00 = 1.0 - p11;
    let coh = s.coherence * r.rotor;

    let upper = lo * p00 + hi * p11 + sn * coh.re;
    let cross = 0.5 * sn * (p00 - p11) - coh * lo + coh.conj() * hi;

    let d_upper = -r.emit * upper + r.absorb * (1.0 - upper);
    let d_cross = cross * (-0.5 * (r.emit + r.absorb));

    let d11 = c * d_upper - sn * d_cross.re;
    let d01 = d_cross.conj() * hi - d_cross * lo + sn * d_upper;
    (d11, d01 * r.rotor.conj())
}

/// Instantaneous dressed energies `±½√(Δ² + Ω²)` (same units as inputs).
pub fn dressed_energies(omega: f64, detuning: f64) -> (f64, f64) {
    let half = 0.5 * detuning.hypot(omega);
    (half, -half)
}

/// Largest ratio `|dθ/dt| / Λ(t)` over the pulse, with mixing angle
/// `θ = ½ atan2(|Ω_d|, Δ_inst)`, splitting `Λ = √(Δ_inst² + |Ω_d|²)` and the
/// ideal-chirp detuning `Δ_inst = Δ − 2αt`. Values well below one mean the
/// evolution is adiabatic.
pub fn adiabaticity_margin(pulse: &TemporalPulse, emitter: &EmitterParams) -> f64 {
    let detuning = mev_to_rad_per_ps(emitter.detuning) - pulse.carrier_offset();
    let alpha = pulse.chirp_rate();
    let dt = pulse.dt();
    let mags: Vec<f64> = pulse
        .envelope()
        .iter()
        .map(|z| z.norm() * emitter.dipole_scale)
        .collect();
    let mut worst = 0.0f64;
    for k in 1..mags.len() - 1 {
        let t = pulse.time(k);
        let inst = detuning - 2.0 * alpha * t;
        let mag = mags[k];
        let split2 = inst * inst + mag * mag;
        if split2 == 0.0 {
            continue;
        }
        let dmag = (mags[k + 1] - mags[k - 1]) / (2.0 * dt);
        // θ̇ = ½ (Δ_inst d|Ω|/dt − |Ω| dΔ_inst/dt) / Λ², dΔ_inst/dt = −2α.
        let theta_dot = 0.5 * (inst * dmag + 2.0 * alpha * mag) / split2;
        worst = worst.max(theta_dot.abs() / split2.sqrt());
    }
    worst
}
