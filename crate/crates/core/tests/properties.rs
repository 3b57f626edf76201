mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qsl_core::dynamics::survival_amplitude;
use qsl_core::minorant::alpha_minorant_residual;
use qsl_core::mixed::{fidelity, purify};
use qsl_core::optimizer::default_sweep;
use qsl_core::spectral::{
    alpha_bound, dispersion, make_doublet_state, make_intelligent_state, make_paired_state, ml_bound, moment, mt_bound,
    SpectralState,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, rel: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn state_strategy() -> impl Strategy<Value = SpectralState> {
    prop::collection::vec((0.0f64..100.0, -1.0f64..1.0, -1.0f64..1.0), 1..8).prop_filter_map(
        "degenerate amplitudes",
        |raw| {
            let norm: f64 = raw.iter().map(|(_, re, im)| re * re + im * im).sum::<f64>().sqrt();
            if norm < 1e-3 {
                return None;
            }
            let levels = raw.into_iter().map(|(e, re, im)| (e, Complex64::new(re, im) / norm));
            SpectralState::new(levels).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn power_mean_is_monotone(state in state_strategy(), a in 0.05f64..10.0, b in 0.05f64..10.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let m_lo = moment(&state, lo).unwrap().powf(1.0 / lo);
        let m_hi = moment(&state, hi).unwrap().powf(1.0 / hi);
        prop_assert!(m_lo <= m_hi * (1.0 + 1e-12) + 1e-300, "{} > {}", m_lo, m_hi);
    }

    #[test]
    fn bounds_are_shift_invariant(state in state_strategy(), shift in -1e3f64..1e3, alpha in 0.05f64..10.0) {
        let moved = state.shifted(shift).unwrap();
        prop_assert!(close(ml_bound(&state).value, ml_bound(&moved).value, 1e-9));
        prop_assert!(close(mt_bound(&state).value, mt_bound(&moved).value, 1e-9));
        prop_assert!(close(dispersion(&state), dispersion(&moved), 1e-9));
        prop_assert!(close(
            alpha_bound(&state, alpha).unwrap().value,
            alpha_bound(&moved, alpha).unwrap().value,
            1e-9
        ));
    }

    #[test]
    fn bounds_ignore_global_phase(state in state_strategy(), phi in 0.0f64..(2.0 * PI), t in -20.0f64..20.0) {
        let turned = state.with_global_phase(Complex64::from_polar(1.0, phi)).unwrap();
        prop_assert!(close(ml_bound(&state).value, ml_bound(&turned).value, 1e-12));
        prop_assert!(close(mt_bound(&state).value, mt_bound(&turned).value, 1e-12));
        let d = survival_amplitude(&state, t).norm() - survival_amplitude(&turned, t).norm();
        prop_assert!(d.abs() <= 1e-12);
    }

    #[test]
    fn bounds_scale_with_hbar_and_energy(state in state_strategy(), c in 0.1f64..10.0, alpha in 0.05f64..10.0) {
        let scaled = SpectralState::with_params(
            state.levels().iter().map(|l| (c * l.energy, l.amplitude)),
            c,
            Some(c * state.ground_energy()),
        ).unwrap();
        prop_assert!(close(ml_bound(&state).value, ml_bound(&scaled).value, 1e-9));
        prop_assert!(close(mt_bound(&state).value, mt_bound(&scaled).value, 1e-9));
        prop_assert!(close(
            alpha_bound(&state, alpha).unwrap().value,
            alpha_bound(&scaled, alpha).unwrap().value,
            1e-9
        ));
    }

    #[test]
    fn sweep_never_drops_below_ml(state in state_strategy()) {
        let sweep = default_sweep(&state);
        let ml = ml_bound(&state).value;
        prop_assert!(sweep.best_value >= ml || (ml.is_infinite() && sweep.best_value.is_infinite()));
        for (alpha, value) in &sweep.samples {
            prop_assert!(*value <= sweep.best_value, "alpha {} gives {} > best {}", alpha, value, sweep.best_value);
        }
    }

    #[test]
    fn doublet_is_normalized(n in 2u64..1_000_000, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let lambda = Complex64::new(re, im);
        let state = make_doublet_state(n, lambda, 1.0, 1.0).unwrap();
        prop_assert!((state.distribution().total_weight() - 1.0).abs() <= 1e-12);
        prop_assert!(state.len() <= 4);
    }

    #[test]
    fn paired_state_is_normalized(seed in any::<u64>(), eps in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = common::random_paired_state(&mut rng, 6, eps, 80);
        prop_assert!((state.distribution().total_weight() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(state.len() % 2, 0);
    }

    #[test]
    fn intelligent_state_is_flat_in_alpha(e0 in -10.0f64..10.0, gap in 0.01f64..50.0, alpha in 0.05f64..20.0) {
        let state = make_intelligent_state(e0, e0 + gap, 0.3, 1.7, 1.0).unwrap();
        let expected = PI / gap;
        prop_assert!(close(alpha_bound(&state, alpha).unwrap().value, expected, 1e-10));
        prop_assert!(close(mt_bound(&state).value, expected, 1e-10));
    }

    #[test]
    fn residual_is_nonnegative(alpha in 0.05f64..20.0, x in 0.0f64..50.0) {
        prop_assert!(alpha_minorant_residual(alpha, x).unwrap() >= -1e-9);
    }

    #[test]
    fn fidelity_is_a_probability(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let energies = [0.0, 0.5, 1.3];
        let rho = common::random_density(&mut rng, &energies);
        let sigma = common::random_density(&mut rng, &energies);
        let f = fidelity(&rho, &sigma).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-9).contains(&f));
        let p = purify(&rho).unwrap();
        prop_assert!(p.reduced_state().max_abs_diff(rho.entries()) <= 1e-10);
    }
}

#[test]
fn paired_state_rejects_overlap() {
    let pairs = [(0.0, Complex64::new(0.6, 0.0)), (1.0, Complex64::new(0.8, 0.0))];
    assert!(make_paired_state(&pairs, 1.0, 1.0).is_err());
}
