// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices and the covariance carrier.
//!
//! Mode operators are ordered `(a1, a1†, a2, a2†)`; a covariance is
//! `sigma = <R R†>` in that ordering, so `sigma[(0,0)] = <a1 a1†>`,
//! `sigma[(1,1)] = <a1† a1>` and `sigma[(0,1)] = <a1 a1>`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Returns `(sigma + sigma†)/2` and the Frobenius norm of the correction applied.
pub fn hermitize(m: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let h = (m + m.adjoint()) * c64(0.5, 0.0);
    let corr = frobenius(&(&h - m));
    (h, corr)
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && frobenius(&(m - m.adjoint())) <= tol
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(b);
        off += k;
    }
    out
}

/// Permutation exchanging each `(a_i, a_i†)` pair.
pub fn pair_swap(dim: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(dim, dim);
    for i in (0..dim).step_by(2) {
        p[(i, i + 1)] = c64(1.0, 0.0);
        p[(i + 1, i)] = c64(1.0, 0.0);
    }
    p
}

/// `P · conj(M) · P`; the particle-hole image of `M`.
pub fn particle_hole_image(m: &ComplexMatrix) -> ComplexMatrix {
    let p = pair_swap(m.nrows());
    &p * m.map(|z| z.conj()) * &p
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    m.clone().lu().determinant()
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular("matrix inverse".into()))
}

/// Covariance `sigma = <R R†>` in `(a1, a1†, ...)` ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    sigma: ComplexMatrix,
}

impl CovarianceState {
    pub fn new(sigma: ComplexMatrix) -> Result<Self> {
        if !sigma.is_square() || !sigma.nrows().is_multiple_of(2) || sigma.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "covariance must be square with even dimension, got {}x{}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        Ok(Self { sigma })
    }

    /// Vacuum: `<a a†> = 1`, everything else zero.
    pub fn vacuum(modes: usize) -> Self {
        let mut sigma = ComplexMatrix::zeros(2 * modes, 2 * modes);
        for k in 0..modes {
            sigma[(2 * k, 2 * k)] = c64(1.0, 0.0);
        }
        Self { sigma }
    }

    pub fn zeros(modes: usize) -> Self {
        Self {
            sigma: ComplexMatrix::zeros(2 * modes, 2 * modes),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.sigma
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.sigma
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn modes(&self) -> usize {
        self.sigma.nrows() / 2
    }

    /// `<a_k† a_k>`.
    pub fn occupation(&self, k: usize) -> f64 {
        self.sigma[(2 * k + 1, 2 * k + 1)].re
    }

    /// `<a_k a_k>`.
    pub fn anomalous(&self, k: usize) -> Complex64 {
        self.sigma[(2 * k, 2 * k + 1)]
    }

    /// `<a_j† a_k>`.
    pub fn coherence(&self, j: usize, k: usize) -> Complex64 {
        self.sigma[(2 * j + 1, 2 * k + 1)]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        is_hermitian(&self.sigma, tol)
    }
}

impl From<CovarianceState> for ComplexMatrix {
    fn from(s: CovarianceState) -> Self {
        s.sigma
    }
}
