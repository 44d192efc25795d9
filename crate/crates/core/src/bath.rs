// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Squeezed thermal reservoirs: occupation `N`, anomalous correlation `M`, and
//! the phase-space covariance of a squeezed thermal mode.

use std::f64::consts::TAU;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::require;
use crate::Result;

/// Thermal occupation, squeezing amplitude and squeezing phase of one bath mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingInput {
    nbar: f64,
    r: f64,
    phi: f64,
}

impl SqueezingInput {
    /// `phi` is wrapped into `[0, 2π)`.
    pub fn new(nbar: f64, r: f64, phi: f64) -> Result<Self> {
        require(nbar >= 0.0, "nbar", "nbar >= 0", nbar)?;
        require(r >= 0.0, "r", "r >= 0", r)?;
        require(phi.is_finite(), "phi", "phi finite", phi)?;
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { nbar, r, phi })
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Reservoir moments of the squeezed thermal state.
    ///
    /// `N = nbar cosh 2r + sinh² r`, `M = -½ sinh 2r e^{2iφ} (2 nbar + 1)`.
    pub fn moments(&self) -> BathMoments {
        let (r, nbar) = (self.r, self.nbar);
        let n = nbar * (2.0 * r).cosh() + r.sinh().powi(2);
        let m = Complex64::from_polar(-0.5 * (2.0 * r).sinh() * (2.0 * nbar + 1.0), 2.0 * self.phi);
        BathMoments { n, m }
    }

    /// Symmetrised `(x, p)` covariance with vacuum variance ½.
    pub fn wigner_covariance(&self) -> Matrix2<f64> {
        let (ch, sh) = ((2.0 * self.r).cosh(), (2.0 * self.r).sinh());
        let (c2, s2) = ((2.0 * self.phi).cos(), (2.0 * self.phi).sin());
        let scale = self.nbar + 0.5;
        Matrix2::new(ch - sh * c2, -sh * s2, -sh * s2, ch + sh * c2) * scale
    }
}

pub fn bath_moments_from_squeezing(input: &SqueezingInput) -> BathMoments {
    input.moments()
}

pub fn wigner_covariance(input: &SqueezingInput) -> Matrix2<f64> {
    input.wigner_covariance()
}

/// Effective occupation `N` and anomalous correlation `M = <b b>` of one reservoir.
///
/// `M` is a free complex parameter here; it need not come from a squeezing input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathMoments {
    n: f64,
    m: Complex64,
}

impl BathMoments {
    pub fn new(n: f64, m: Complex64) -> Result<Self> {
        require(n >= 0.0, "N", "N >= 0", n)?;
        require(m.re.is_finite() && m.im.is_finite(), "M", "M finite", m.norm())?;
        Ok(Self { n, m })
    }

    pub fn thermal(n: f64) -> Result<Self> {
        Self::new(n, Complex64::new(0.0, 0.0))
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn m(&self) -> Complex64 {
        self.m
    }

    pub fn with_m(self, m: Complex64) -> Self {
        Self { m, ..self }
    }

    /// `|M|² <= N(N+1) + tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        check_physical(self, tol)
    }

    /// Largest `|M|` allowed at this occupation.
    pub fn max_anomalous(&self) -> f64 {
        (self.n * (self.n + 1.0)).sqrt()
    }
}

pub fn check_physical(moments: &BathMoments, tol: f64) -> bool {
    moments.m.norm_sqr() <= moments.n * (moments.n + 1.0) + tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_squeezing_is_thermal() {
        let b = SqueezingInput::new(0.7, 0.0, 1.3).unwrap().moments();
        assert_abs_diff_eq!(b.n(), 0.7, epsilon = 1e-15);
        assert_eq!(b.m().norm(), 0.0);
    }

    #[test]
    fn squeezed_vacuum_r1() {
        let b = SqueezingInput::new(0.0, 1.0, 0.0).unwrap().moments();
        assert_abs_diff_eq!(b.n(), 1.0f64.sinh().powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(b.n(), 1.381_097_845_541_816_6, epsilon = 1e-12);
        assert_abs_diff_eq!(b.m().re, -0.5 * 2.0f64.sinh(), epsilon = 1e-15);
        assert_abs_diff_eq!(b.m().re, -1.813_430_203_923_509_4, epsilon = 1e-12);
        assert_abs_diff_eq!(b.m().im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn physical_bound_examples() {
        let ok = BathMoments::new(0.5, Complex64::new(0.866, 0.0)).unwrap();
        let bad = BathMoments::new(0.5, Complex64::new(0.9, 0.0)).unwrap();
        assert!(check_physical(&ok, 0.0));
        assert!(check_physical(&BathMoments::thermal(0.0).unwrap(), 0.0));
        assert!(!check_physical(&bad, 0.0));
    }

    #[test]
    fn phase_wraps() {
        let s = SqueezingInput::new(0.0, 0.1, -0.5).unwrap();
        assert!((s.phi() - (TAU - 0.5)).abs() < 1e-15);
        assert!(SqueezingInput::new(-0.1, 0.0, 0.0).is_err());
        assert!(SqueezingInput::new(0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn wigner_vacuum_and_squeezed() {
        let v = SqueezingInput::new(0.0, 0.0, 0.0).unwrap().wigner_covariance();
        assert_abs_diff_eq!(v, Matrix2::identity() * 0.5, epsilon = 1e-15);
        let s = SqueezingInput::new(0.0, 1.0, 0.0).unwrap().wigner_covariance();
        assert_abs_diff_eq!(s, Matrix2::new(0.5 * (-2.0f64).exp(), 0.0, 0.0, 0.5 * 2.0f64.exp()), epsilon = 1e-14);
        let d = SqueezingInput::new(0.5, 0.8, 0.3).unwrap().wigner_covariance().determinant();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn squeezing_always_physical(nbar in 0.0f64..5.0, r in 0.0f64..2.0, phi in 0.0f64..TAU) {
            let b = SqueezingInput::new(nbar, r, phi).unwrap().moments();
            // exact in real arithmetic; allow rounding relative to the bound
            let bound = b.n() * (b.n() + 1.0);
            prop_assert!(b.m().norm_sqr() <= bound * (1.0 + 1e-12));
        }

        #[test]
        fn vacuum_squeezing_saturates(r in 0.0f64..2.0, phi in 0.0f64..TAU) {
            let b = SqueezingInput::new(0.0, r, phi).unwrap().moments();
            let bound = b.n() * (b.n() + 1.0);
            prop_assert!((b.m().norm_sqr() - bound).abs() <= 1e-12 * bound.max(1.0));
        }

        #[test]
        fn wigner_determinant_invariant(nbar in 0.0f64..5.0, r in 0.0f64..2.0, phi in 0.0f64..TAU) {
            let s = SqueezingInput::new(nbar, r, phi).unwrap();
            let det = s.wigner_covariance().determinant();
            let expect = (nbar + 0.5).powi(2);
            prop_assert!((det - expect).abs() <= 1e-12 * (2.0 * r).cosh().powi(2).max(1.0) * expect.max(1.0));
        }
    }
}
