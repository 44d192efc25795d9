// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DVector;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sqbath::linalg::{eigen, schur};
use sqbath::matrix::{c64, frobenius, inverse, spectral_norm};
use sqbath::spectral::{eigendecompose, match_branches, single_mode_eigenvalues};
use sqbath::system::{single_mode_drift, ModeSpec};
use sqbath::ComplexMatrix;

fn random_matrix(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

#[test]
fn random_4x4_residuals_and_reconstruction() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let mut checked = 0;
    for _ in 0..1000 {
        let a = random_matrix(&mut rng, 4);
        let rep = eigendecompose(&a).unwrap();
        if rep.cond_v >= 1e6 {
            continue;
        }
        checked += 1;
        let norm = spectral_norm(&a);
        for (k, lambda) in rep.eigenvalues.iter().enumerate() {
            let v: DVector<_> = rep.eigenvectors.column(k).into_owned();
            let r = (&a * &v - &v * *lambda).norm();
            assert!(r <= 1e-10 * norm, "residual {r:e} at pair {k}");
        }
        let lam = ComplexMatrix::from_diagonal(&DVector::from_vec(rep.eigenvalues.clone()));
        let recon = &rep.eigenvectors * lam * inverse(&rep.eigenvectors).unwrap();
        assert!(frobenius(&(recon - &a)) <= 1e-9 * frobenius(&a));
    }
    assert!(checked > 900, "only {checked} well-conditioned draws");
}

#[test]
fn schur_form_of_larger_matrices() {
    let mut rng = StdRng::seed_from_u64(17);
    for n in [5, 7, 8] {
        for _ in 0..50 {
            let a = random_matrix(&mut rng, n);
            let s = schur(&a).unwrap();
            let back = &s.q * &s.t * s.q.adjoint();
            assert!(frobenius(&(back - &a)) < 1e-12 * frobenius(&a).max(1.0));
            for i in 0..n {
                for j in 0..i {
                    assert_eq!(s.t[(i, j)].norm(), 0.0);
                }
            }
        }
    }
}

#[test]
fn single_mode_numeric_matches_closed_form() {
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..500 {
        let mode = ModeSpec::new(rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0)).unwrap();
        let m = c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (p, q) = single_mode_eigenvalues(&mode, m);
        let e = eigen(&single_mode_drift(&mode, m)).unwrap();
        let want = [p, q];
        let idx = match_branches(&want, &e.values);
        // conditioning near the exceptional point limits agreement to ~sqrt(eps)
        for (w, j) in want.iter().zip(idx) {
            assert!((e.values[j] - w).norm() < 1e-6, "{} vs {w}", e.values[j]);
        }
    }
}
