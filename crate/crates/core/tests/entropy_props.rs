// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sqbath::bath::BathMoments;
use sqbath::dynamics::{quadrature_steady_variances, steady_state_lyapunov};
use sqbath::entropy::{
    purity_vs_r_curve, renyi2_closed_form, renyi2_single_mode, thermal_current, thermal_current_from_covariance,
};
use sqbath::perturbation::alpha_beta_coefficients;
use sqbath::system::{diffusion, drift, DiffusionConvention, ModeSpec, SystemSpec};

#[test]
fn current_matches_solver_on_random_draws() {
    let mut rng = StdRng::seed_from_u64(404);
    for _ in 0..50 {
        let j = rng.gen_range(0.05..1.0);
        let g = rng.gen_range(0.1..2.0);
        let (n1, n2) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        let mode = ModeSpec::new(rng.gen_range(0.5..2.0), g).unwrap();
        let spec = SystemSpec::two_mode(mode, mode, j, [BathMoments::thermal(n1).unwrap(), BathMoments::thermal(n2).unwrap()]).unwrap();
        let s = steady_state_lyapunov(&drift(&spec).unwrap(), &diffusion(&spec, DiffusionConvention::ConsistencyCorrected)).unwrap();
        let want = thermal_current(j, g, n1, n2).unwrap();
        let got = thermal_current_from_covariance(&s).unwrap();
        assert!((got - want).abs() <= 1e-8 * want.abs().max(1e-12), "{got} vs {want}");
    }
}

#[test]
fn purity_curves_differ_across_damping() {
    let r: Vec<f64> = (0..=10).map(|k| 0.0866 * k as f64).collect();
    let ends: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&g| {
            let pts = purity_vs_r_curve(&ModeSpec::new(1.0, g).unwrap(), 0.5, &r).unwrap();
            pts.last().unwrap().report.as_ref().unwrap().purity
        })
        .collect();
    assert!(ends[0] < ends[1] && ends[1] < ends[2], "{ends:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn purity_monotone_in_r(n in 0.01f64..3.0, g in 0.1f64..3.0, w in 0.1f64..3.0) {
        prop_assume!((g * g - 8.0 * w * w).abs() > 1e-3);
        let mode = ModeSpec::new(w, g).unwrap();
        let bound = (n * (n + 1.0)).sqrt();
        let grid: Vec<f64> = (0..50).map(|k| bound * k as f64 / 50.0).collect();
        let pts = purity_vs_r_curve(&mode, n, &grid).unwrap();
        let p: Vec<f64> = pts.iter().map(|p| p.report.as_ref().unwrap().purity).collect();
        for win in p.windows(2) {
            prop_assert!(win[1] >= win[0]);
        }
        let cf: Vec<f64> = grid.iter().map(|&r| renyi2_closed_form(&mode, n, r).unwrap().purity).collect();
        for win in cf.windows(2) {
            prop_assert!(win[1] >= win[0]);
        }
    }

    #[test]
    fn entropy_and_purity_consistent(n in 0.0f64..3.0, frac in 0.0f64..1.0, g in 0.1f64..3.0, w in 0.1f64..3.0) {
        let r = frac * (n * (n + 1.0)).sqrt();
        let rep = renyi2_single_mode(&quadrature_steady_variances(&ModeSpec::new(w, g).unwrap(), n, r).unwrap()).unwrap();
        prop_assert!((rep.s2 + rep.purity.ln()).abs() < 1e-12);
        prop_assert!(rep.purity > 0.0 && rep.purity <= 1.0);
    }

    #[test]
    fn current_antisymmetric_and_odd(j in -2.0f64..2.0, g in 0.01f64..3.0, n1 in 0.0f64..5.0, n2 in 0.0f64..5.0) {
        let i = thermal_current(j, g, n1, n2).unwrap();
        prop_assert_eq!(i, -thermal_current(j, g, n2, n1).unwrap());
        prop_assert_eq!(i, -thermal_current(-j, g, n1, n2).unwrap());
    }

    #[test]
    fn alpha_beta_nonnegative(n in 0.0f64..5.0, m in -2.0f64..2.0, g in 0.01f64..3.0, j in -2.0f64..2.0, w in 0.01f64..3.0) {
        if let Ok((a, b)) = alpha_beta_coefficients(n, m, g, j, w) {
            prop_assert!(a >= 0.0 && b >= 0.0);
        }
    }
}
