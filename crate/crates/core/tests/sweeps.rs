//! Sweep engine contracts: reduction to a single emitter, determinism,
//! emitter symmetry and error reporting.

use std::f64::consts::PI;

use multinarp::dynamics::{integrate_scaled, EmitterParams, IntegratorConfig};
use multinarp::pulseshape::*;
use multinarp::sweep::*;
use multinarp::Error;

fn small(preset_name: &str, n: usize) -> SweepSpec {
    SweepSpec {
        areas: vec![0.0, 2.0 * PI, 7.5 * PI, 13.0 * PI],
        axis: SweepAxis::Spacing {
            values: vec![1.5, 3.4],
            width: 1.0,
        },
        n_emitters: n,
        ..preset(preset_name).unwrap()
    }
}

#[test]
fn single_emitter_matches_manual_narp_bitwise() {
    let spec = SweepSpec {
        axis: SweepAxis::Width {
            values: vec![0.5, 1.0],
            spacing: 0.0,
        },
        ..small("fig2", 1)
    };
    let map = run_sweep(&spec).unwrap();
    for (v, &width) in spec.axis.values().iter().enumerate() {
        let grid = FrequencyGrid::new(0.0, 16.0 * spectral_fwhm(spec.tau0), 1 << 14).unwrap();
        let s = make_gaussian_spectrum(spec.tau0, 0.0, 1.0, grid).unwrap();
        let s = apply_notch_mask(&s, &NotchSpec::new(vec![0.0], width).unwrap());
        let s = apply_phase_mask(&s, Chirp::new(spec.chirp).unwrap());
        let pulse = synthesize_with(&s, &SynthesisOptions::default()).unwrap();
        for (a, &theta) in spec.areas.iter().enumerate() {
            let p = integrate_scaled(
                &pulse,
                theta,
                &EmitterParams::resonant(),
                None,
                &IntegratorConfig::final_only(),
            )
            .unwrap()
            .final_occupation();
            assert_eq!(map.get(a, v, 0).to_bits(), p.to_bits());
        }
    }
}

#[test]
fn worker_count_does_not_change_output() {
    for name in ["fig2", "fig2e"] {
        let spec = small(name, 3);
        let one = run_sweep_with(&spec, &SweepOptions { workers: Some(1), progress: None }).unwrap();
        let three = run_sweep_with(&spec, &SweepOptions { workers: Some(3), progress: None }).unwrap();
        let bits = |m: &OccupationMap| m.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&one), bits(&three));
        assert_eq!(one, three);
    }
}

#[test]
fn symmetric_partners_agree() {
    let spec = small("fig2", 5);
    let map = run_sweep(&spec).unwrap();
    for a in 0..spec.areas.len() {
        for v in 0..2 {
            for e in 0..2 {
                let d = (map.get(a, v, e) - map.get(a, v, 4 - e)).abs();
                assert!(d < 1e-6, "area {a} value {v} emitter {e}: {d}");
            }
        }
    }
    assert!(map.values.iter().all(|x| (0.0..=1.0).contains(x)));
}

#[test]
fn unequal_dipoles_break_the_symmetry() {
    let spec = SweepSpec {
        dipole_scales: vec![1.0, 0.7],
        ..small("fig3c", 2)
    };
    let map = run_sweep(&spec).unwrap();
    assert!((map.get(1, 1, 0) - map.get(1, 1, 1)).abs() > 1e-3);
}

#[test]
fn failing_cell_reports_coordinates() {
    let mut spec = small("fig2", 2);
    spec.discretization.tolerance = 1e-30;
    match run_sweep(&spec) {
        Err(Error::Cell { axis, emitter, value, .. }) => {
            assert_eq!(axis, "spacing_meV");
            assert!((1..=2).contains(&emitter));
            assert!(spec.axis.values().contains(&value));
        }
        other => panic!("expected a cell error, got {other:?}"),
    }
}

#[test]
fn invalid_spec_fails_before_compute() {
    let calls = std::sync::atomic::AtomicUsize::new(0);
    let cb = |_: SweepProgress| {
        calls.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
    };
    let mut spec = small("fig2", 2);
    spec.areas = vec![2.0, 1.0];
    let opts = SweepOptions { workers: None, progress: Some(&cb) };
    assert!(matches!(run_sweep_with(&spec, &opts), Err(Error::InvalidParameter { .. })));
    assert_eq!(calls.into_inner(), 0);
}
