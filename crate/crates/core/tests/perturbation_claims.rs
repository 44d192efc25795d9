// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use proptest::prelude::*;
use sqbath::entropy::{entropy_shift_exact, entropy_shift_exact_matrix, entropy_shift_perturbative, entropy_shift_quartic};
use sqbath::matrix::{frobenius, CovarianceState};
use sqbath::perturbation::{
    exact_covariance, first_order_expansion, sigma14_closed_form, sigma23_closed_form, PerturbationInput,
};
use sqbath::system::{DiffusionConvention, ModeSpec};

const CONVENTIONS: [DiffusionConvention; 2] = [DiffusionConvention::PaperLiteral, DiffusionConvention::ConsistencyCorrected];

fn mode() -> ModeSpec {
    ModeSpec::new(1.0, 0.5).unwrap()
}

fn input(n: f64, dn: f64, m: f64, dm: f64) -> PerturbationInput {
    PerturbationInput::new(n, dn, m, dm, 1.0).unwrap()
}

#[test]
fn residual_halves_quadratically() {
    for conv in CONVENTIONS {
        let p = input(0.5, 0.0, 0.05, 0.0);
        let fo = first_order_expansion(mode(), 0.2, &p, conv).unwrap();
        let res: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
            .iter()
            .map(|&eta| {
                let ex = exact_covariance(mode(), 0.2, &p.with_eta(eta).unwrap(), conv).unwrap();
                frobenius(&(ex.matrix() - fo.truncated(eta)))
            })
            .collect();
        for w in res.windows(2) {
            assert!(w[0] / w[1] >= 3.8, "{conv}: {res:?}");
        }
    }
}

#[test]
fn first_order_trace_vanishes_without_thermal_bias() {
    for conv in CONVENTIONS {
        for (m, dm) in [(0.05, 0.0), (0.1, 0.03), (-0.02, 0.07)] {
            let fo = first_order_expansion(mode(), 0.2, &input(0.5, 0.0, m, dm), conv).unwrap();
            let t = entropy_shift_perturbative(&fo.sigma0, &fo.sigma1).unwrap().first_order_trace;
            assert!(t.norm() <= 1e-10, "{conv} m={m} dm={dm}: {t}");
        }
    }
}

#[test]
fn cross_correlation_displays_match_literal_diffusion() {
    let p = input(0.5, 0.0, 0.1, 0.0);
    let cf14 = sigma14_closed_form(&p, 0.2, 0.5, 1.0).unwrap();
    let cf23 = sigma23_closed_form(&p, 0.2, 0.5, 1.0).unwrap();
    let lit = first_order_expansion(mode(), 0.2, &p, DiffusionConvention::PaperLiteral).unwrap();
    let s1 = lit.sigma1.matrix();
    assert!((s1[(0, 3)] - cf14).norm() < 1e-12, "{} vs {cf14}", s1[(0, 3)]);
    assert!((s1[(1, 2)] - cf23).norm() < 1e-12);
    // under the corrected diffusion the same entry is -1/3 of the display here
    let cor = first_order_expansion(mode(), 0.2, &p, DiffusionConvention::ConsistencyCorrected).unwrap();
    let ratio = cor.sigma1.matrix()[(0, 3)] / cf14;
    assert!((ratio - Complex64::new(-1.0 / 3.0, 0.0)).norm() < 1e-9, "{ratio}");
}

#[test]
fn displays_with_thermal_bias() {
    // ΔmΔn term: compare against the solve with both differences nonzero
    let p = input(0.6, 0.4, 0.05, 0.08);
    let cf14 = sigma14_closed_form(&p, 0.3, 0.5, 1.0).unwrap();
    let s1 = first_order_expansion(mode(), 0.3, &p, DiffusionConvention::PaperLiteral).unwrap().sigma1;
    let rel = (s1.matrix()[(0, 3)] - cf14).norm() / cf14.norm();
    assert!(rel < 1e-10, "rel diff {rel:e}");
    let cf23 = sigma23_closed_form(&p, 0.3, 0.5, 1.0).unwrap();
    assert!((s1.matrix()[(1, 2)] - cf23).norm() < 1e-10 * cf23.norm());
}

#[test]
fn first_order_correction_has_local_anomalous_entries() {
    // the displayed correction keeps only the four anti-diagonal entries;
    // the solve also populates <a_i²>
    let fo = first_order_expansion(mode(), 0.2, &input(0.5, 0.0, 0.1, 0.0), DiffusionConvention::PaperLiteral).unwrap();
    let s1 = fo.sigma1.matrix();
    for (i, j) in [(0, 1), (2, 3)] {
        assert!((s1[(i, j)] - Complex64::new(-0.019585, 0.072655)).norm() < 1e-5, "{}", s1[(i, j)]);
    }
    for (i, j) in [(0, 0), (1, 1), (0, 2), (1, 3)] {
        assert!(s1[(i, j)].norm() <= 1e-12);
    }
}

#[test]
fn quadratic_trace_formula_misses_second_order_covariance() {
    // -¼Tr[(σ0⁻¹σ1)²] drops Tr(σ0⁻¹σ2), which enters at the same order.
    for m in [0.01, 0.03, 0.05] {
        let p = input(0.5, 0.0, m, 0.0);
        let mut rel = Vec::new();
        for conv in CONVENTIONS {
            let fo = first_order_expansion(mode(), 0.2, &p, conv).unwrap();
            let exact = entropy_shift_exact(&fo.sigma0, &exact_covariance(mode(), 0.2, &p, conv).unwrap()).unwrap();
            let pert = entropy_shift_perturbative(&fo.sigma0, &fo.sigma1).unwrap().value;
            let quartic = entropy_shift_quartic(fo.sigma1.matrix()[(0, 3)]);
            eprintln!("m={m} {conv}: exact {exact:e} quadratic {pert:e} quartic {quartic:e}");
            rel.push((exact - pert).abs() / exact.abs());
            assert!(quartic < 1e-3 * exact.abs());
        }
        // literal diffusion: opposite signs; corrected: ~40% apart
        assert!(rel[0] > 1.0, "{rel:?}");
        assert!(rel[1] > 0.25 && rel[1] < 0.6, "{rel:?}");
    }
}

#[test]
fn exact_shift_is_quadratic_in_m() {
    for conv in CONVENTIONS {
        let ms: Vec<f64> = (0..10).map(|k| 1e-3 * 10f64.powf(k as f64 / 9.0)).collect();
        let pts: Vec<(f64, f64)> = ms
            .iter()
            .map(|&m| {
                let p = input(0.5, 0.0, m, 0.0);
                let fo = first_order_expansion(mode(), 0.2, &p, conv).unwrap();
                let ds = entropy_shift_exact(&fo.sigma0, &exact_covariance(mode(), 0.2, &p, conv).unwrap()).unwrap();
                (m.ln(), ds.abs().ln())
            })
            .collect();
        let slope = least_squares_slope(&pts);
        assert!((slope - 2.0).abs() <= 0.1, "{conv}: slope {slope}");
    }
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn perturbative_shift_scales_as_m_squared() {
    let at = |m: f64| {
        let fo = first_order_expansion(mode(), 0.2, &input(0.5, 0.0, m, 0.0), DiffusionConvention::PaperLiteral).unwrap();
        entropy_shift_perturbative(&fo.sigma0, &fo.sigma1).unwrap().value
    };
    for m in [0.1, 0.01, 0.001] {
        assert!((at(2.0 * m) / at(m) - 4.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn truncation_error_is_third_order(
        n in 0.1f64..2.0,
        m in -0.1f64..0.1,
        dm in -0.1f64..0.1,
        j in 0.05f64..0.5,
        corrected in any::<bool>(),
    ) {
        prop_assume!(m.abs() + dm.abs() > 0.02);
        let conv = if corrected { DiffusionConvention::ConsistencyCorrected } else { DiffusionConvention::PaperLiteral };
        let fo = first_order_expansion(mode(), j, &input(n, 0.0, m, dm), conv).unwrap();
        let s0 = fo.sigma0.matrix();
        let gap = |eta: f64| {
            let s1 = CovarianceState::new(fo.sigma1.matrix() * Complex64::new(eta, 0.0)).unwrap();
            entropy_shift_exact_matrix(s0, &fo.truncated(eta)).unwrap()
                - entropy_shift_perturbative(&fo.sigma0, &s1).unwrap().value
        };
        let (e1, e2) = (gap(0.2), gap(0.1));
        prop_assume!(e1.abs() > 1e-13);
        let order = (e1 / e2).abs().log2();
        prop_assert!(order >= 2.7, "order {order}: {e1:e} {e2:e}");
    }

    #[test]
    fn first_order_output_is_hermitian(
        n in 0.0f64..2.0,
        dn in -0.5f64..0.5,
        m in -0.2f64..0.2,
        dm in -0.2f64..0.2,
        j in -0.5f64..0.5,
        corrected in any::<bool>(),
    ) {
        prop_assume!(n >= dn.abs() / 2.0);
        let conv = if corrected { DiffusionConvention::ConsistencyCorrected } else { DiffusionConvention::PaperLiteral };
        let fo = first_order_expansion(mode(), j, &input(n, dn, m, dm), conv).unwrap();
        prop_assert!(fo.sigma1.is_hermitian(1e-12));
    }
}
