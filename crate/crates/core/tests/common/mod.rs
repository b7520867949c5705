#![allow(dead_code)]

use std::f64::consts::PI;

use multinarp::dynamics::{integrate_scaled, EmitterParams, Frame, IntegratorConfig};
use multinarp::phonon::PhononEnvironment;
use multinarp::pulseshape::*;
use num_complex::Complex64;

pub const TAU0: f64 = 0.120;

/// Unit-area pulse centered on the grid, optionally notched, then chirped.
pub fn unit_pulse(phi2: f64, notches: Option<&NotchSpec>) -> TemporalPulse {
    let grid = FrequencyGrid::for_pulse(TAU0, 0.0).unwrap();
    let mut s = make_gaussian_spectrum(TAU0, 0.0, 1.0, grid).unwrap();
    if let Some(n) = notches {
        s = apply_notch_mask(&s, n);
    }
    let s = apply_phase_mask(&s, Chirp::new(phi2).unwrap());
    synthesize_with(&s, &SynthesisOptions::default()).unwrap()
}

pub fn final_occupation(
    pulse: &TemporalPulse,
    theta: f64,
    detuning: f64,
    env: Option<&PhononEnvironment>,
    frame: Frame,
) -> f64 {
    let config = IntegratorConfig {
        frame,
        ..IntegratorConfig::final_only()
    };
    let emitter = EmitterParams::new(detuning, 1.0).unwrap();
    integrate_scaled(pulse, theta, &emitter, env, &config)
        .unwrap()
        .final_occupation()
}

/// Landau–Zener drive: `Ω₀ e^{-iαt²}` (instantaneous frequency `2αt`) with
/// a flat top over `|t| ≤ t_flat` and cos² ramps of length `t_ramp`.
pub fn flat_top_chirp(omega0: f64, alpha: f64, t_flat: f64, t_ramp: f64) -> TemporalPulse {
    let dt = 1e-3;
    let half = t_flat + t_ramp;
    let n = 2 * (half / dt).ceil() as usize + 1;
    let t0 = -((n - 1) as f64) * dt / 2.0;
    TemporalPulse::from_fn(t0, dt, n, alpha, |t| {
        let a = t.abs();
        let shape = if a <= t_flat {
            1.0
        } else if a < half {
            (0.5 * PI * (a - t_flat) / t_ramp).cos().powi(2)
        } else {
            0.0
        };
        Complex64::from_polar(omega0 * shape, -alpha * t * t)
    })
    .unwrap()
}

/// Least-squares fit `arg Ω(t) ≈ c₀ + c₁t + c₂t²` over the samples whose
/// magnitude exceeds `frac` of the peak, after phase unwrapping.
pub fn fit_quadratic_phase(pulse: &TemporalPulse, frac: f64) -> [f64; 3] {
    let peak = pulse.peak();
    let env = pulse.envelope();
    let mut ts = Vec::new();
    let mut phases = Vec::new();
    let mut last: Option<f64> = None;
    for (k, z) in env.iter().enumerate() {
        if z.norm() < frac * peak {
            continue;
        }
        let mut p = z.arg();
        if let Some(prev) = last {
            p += (2.0 * PI) * ((prev - p) / (2.0 * PI)).round();
        }
        last = Some(p);
        ts.push(pulse.time(k));
        phases.push(p);
    }
    // Normal equations for the basis (1, t, t²).
    let mut m = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for (&t, &p) in ts.iter().zip(&phases) {
        let basis = [1.0, t, t * t];
        for i in 0..3 {
            b[i] += basis[i] * p;
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
        }
    }
    solve3(m, b)
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for c in 0..3 {
        let p = (c..3)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())
            .unwrap();
        m.swap(c, p);
        b.swap(c, p);
        for r in c + 1..3 {
            let f = m[r][c] / m[c][c];
            for k in c..3 {
                m[r][k] -= f * m[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|k| m[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    x
}

/// `1 − exp(−π Ω₀² / (2 |2α|))`.
pub fn landau_zener(omega0: f64, alpha: f64) -> f64 {
    1.0 - (-PI * omega0 * omega0 / (2.0 * (2.0 * alpha).abs())).exp()
}
