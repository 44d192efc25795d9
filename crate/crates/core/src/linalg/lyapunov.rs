// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Continuous Lyapunov equation `A X + X A† = -D` by Kronecker vectorisation.
//!
//! With column-major `vec`, `vec(A X) = (I ⊗ A) vec X` and
//! `vec(X A†) = (conj(A) ⊗ I) vec X`.

use nalgebra::DVector;

use super::eigen::eigenvalues;
use crate::matrix::{frobenius, kron, ComplexMatrix};
use crate::{Error, Result};

/// Eigenvalues with `Re λ >= STABILITY_THRESHOLD` are rejected as unstable.
pub const STABILITY_THRESHOLD: f64 = -1e-12;

const RESIDUAL_BOUND: f64 = 1e-10;

pub fn lyapunov_residual(a: &ComplexMatrix, x: &ComplexMatrix, d: &ComplexMatrix) -> ComplexMatrix {
    a * x + x * a.adjoint() + d
}

/// Hurwitz check, Kronecker solve, residual check.
pub fn solve_lyapunov(a: &ComplexMatrix, d: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a, d)?;
    for lambda in eigenvalues(a)? {
        if !(lambda.re < STABILITY_THRESHOLD) {
            return Err(Error::Unstable {
                eigenvalue: lambda,
                threshold: STABILITY_THRESHOLD,
            });
        }
    }
    let x = solve_lyapunov_unchecked(a, d)?;
    let residual = frobenius(&lyapunov_residual(a, &x, d));
    let bound = RESIDUAL_BOUND * frobenius(d);
    if residual > bound && residual > f64::MIN_POSITIVE {
        return Err(Error::Residual { residual, bound });
    }
    Ok(x)
}

/// Kronecker solve with two steps of iterative refinement; no stability check.
pub fn solve_lyapunov_unchecked(a: &ComplexMatrix, d: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a, d)?;
    let n = a.nrows();
    let ident = ComplexMatrix::identity(n, n);
    let op = kron(&ident, a) + kron(&a.map(|z| z.conj()), &ident);
    let lu = op.clone().full_piv_lu();
    let rhs = -DVector::from_column_slice(d.as_slice());
    let mut v = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Kronecker Lyapunov operator".into()))?;
    for _ in 0..2 {
        let r = &rhs - &op * &v;
        if let Some(dv) = lu.solve(&r) {
            v += dv;
        }
    }
    Ok(ComplexMatrix::from_column_slice(n, n, v.as_slice()))
}

fn check_dims(a: &ComplexMatrix, d: &ComplexMatrix) -> Result<()> {
    if !a.is_square() || a.shape() != d.shape() {
        return Err(Error::Dimension(format!(
            "Lyapunov needs square A and D of equal size, got {:?} and {:?}",
            a.shape(),
            d.shape()
        )));
    }
    Ok(())
}
