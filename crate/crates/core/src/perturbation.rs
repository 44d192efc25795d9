// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Weak-squeezing expansion of the symmetric two-mode steady state:
//! `A = A0 + ηA1`, `D = D0 + ηD1`, `σ = σ0 + ησ1 + O(η²)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::BathMoments;
use crate::dynamics::steady_state_lyapunov;
use crate::error::require;
use crate::linalg::{lyapunov_residual, solve_lyapunov};
use crate::matrix::{c64, frobenius, hermitize, ComplexMatrix, CovarianceState};
use crate::system::{diffusion, drift, DiffusionConvention, ModeSpec, SystemSpec};
use crate::{Error, Result};

/// Fraction of `ω/γ` above which `|M_i|` is no longer treated as weak.
pub const WEAK_SQUEEZING_FRACTION: f64 = 0.2;

/// Bath parameters in mean/difference form. `M` is real here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationInput {
    pub n: f64,
    pub dn: f64,
    pub m: f64,
    pub dm: f64,
    pub eta: f64,
}

impl PerturbationInput {
    pub fn new(n: f64, dn: f64, m: f64, dm: f64, eta: f64) -> Result<Self> {
        require(n.is_finite(), "n", "n finite", n)?;
        require(dn.is_finite(), "dn", "dn finite", dn)?;
        require(m.is_finite(), "m", "m finite", m)?;
        require(dm.is_finite(), "dm", "dm finite", dm)?;
        require(eta > 0.0 && eta <= 1.0, "eta", "0 < eta <= 1", eta)?;
        require(n - dn.abs() / 2.0 >= 0.0, "dn", "N1, N2 >= 0", n - dn.abs() / 2.0)?;
        Ok(Self { n, dn, m, dm, eta })
    }

    pub fn from_baths(n1: f64, n2: f64, m1: f64, m2: f64, eta: f64) -> Result<Self> {
        Self::new((n1 + n2) / 2.0, n1 - n2, (m1 + m2) / 2.0, m1 - m2, eta)
    }

    pub fn n1(&self) -> f64 {
        self.n + self.dn / 2.0
    }

    pub fn n2(&self) -> f64 {
        self.n - self.dn / 2.0
    }

    pub fn m1(&self) -> f64 {
        self.m + self.dm / 2.0
    }

    pub fn m2(&self) -> f64 {
        self.m - self.dm / 2.0
    }

    pub fn with_eta(self, eta: f64) -> Result<Self> {
        Self::new(self.n, self.dn, self.m, self.dm, eta)
    }

    /// Two-mode system with identical modes and anomalous moments scaled by `eta`.
    pub fn system(&self, mode: ModeSpec, hopping: f64) -> Result<SystemSpec> {
        SystemSpec::two_mode(
            mode,
            mode,
            hopping,
            [
                BathMoments::new(self.n1(), c64(self.eta * self.m1(), 0.0))?,
                BathMoments::new(self.n2(), c64(self.eta * self.m2(), 0.0))?,
            ],
        )
    }
}

/// True when some `|M_i|` exceeds `0.2 ω/γ`.
pub fn weak_squeezing_violated(mode: &ModeSpec, m: &[f64]) -> bool {
    let bound = WEAK_SQUEEZING_FRACTION * mode.critical_anomalous();
    m.iter().any(|mi| mi.abs() > bound)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    pub a0: ComplexMatrix,
    pub a1: ComplexMatrix,
    pub d0: ComplexMatrix,
    pub d1: ComplexMatrix,
}

/// `A1` holds the `-γM_i` drift entries, `D1` the off-diagonal diffusion entries
/// linear in `M_i`, both at unit `η`. The corrected convention's `|M|²` heating
/// on the diagonal is second order and belongs to neither.
pub fn split(
    mode: ModeSpec,
    hopping: f64,
    p: &PerturbationInput,
    convention: DiffusionConvention,
) -> Result<Splitting> {
    let full = p.with_eta(1.0)?.system(mode, hopping)?;
    let bare = full.with_anomalous(&[c64(0.0, 0.0), c64(0.0, 0.0)]);
    let a0 = drift(&bare)?;
    let a1 = drift(&full)? - &a0;
    let d0 = diffusion(&bare, convention);
    let mut d1 = diffusion(&full, convention) - &d0;
    d1.fill_diagonal(c64(0.0, 0.0));
    Ok(Splitting { a0, a1, d0, d1 })
}

/// Solves `A0 σ1 + σ1 A0† = -(A1 σ0 + σ0 A1† + D1)`.
pub fn first_order_covariance(
    a0: &ComplexMatrix,
    d0: &ComplexMatrix,
    a1: &ComplexMatrix,
    d1: &ComplexMatrix,
    sigma0: &CovarianceState,
) -> Result<CovarianceState> {
    let s0 = sigma0.matrix();
    let n = s0.nrows();
    for (name, m) in [("A0", a0), ("D0", d0), ("A1", a1), ("D1", d1)] {
        if m.shape() != (n, n) {
            return Err(Error::Dimension(format!("{name} is {:?}, sigma0 is {n}x{n}", m.shape())));
        }
    }
    let res = frobenius(&lyapunov_residual(a0, s0, d0));
    let bound = 1e-8 * frobenius(d0).max(1.0);
    if res > bound {
        return Err(Error::Residual { residual: res, bound });
    }
    let source = a1 * s0 + s0 * a1.adjoint() + d1;
    let (s1, _) = hermitize(&solve_lyapunov(a0, &source)?);
    CovarianceState::new(s1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrder {
    pub sigma0: CovarianceState,
    pub sigma1: CovarianceState,
    /// Set when the inputs are outside the weak-squeezing regime.
    pub weak_squeezing_violated: bool,
}

impl FirstOrder {
    /// `σ0 + η σ1`.
    pub fn truncated(&self, eta: f64) -> ComplexMatrix {
        self.sigma0.matrix() + self.sigma1.matrix() * c64(eta, 0.0)
    }
}

pub fn first_order_expansion(
    mode: ModeSpec,
    hopping: f64,
    p: &PerturbationInput,
    convention: DiffusionConvention,
) -> Result<FirstOrder> {
    let s = split(mode, hopping, p, convention)?;
    let sigma0 = steady_state_lyapunov(&s.a0, &s.d0)?;
    let sigma1 = first_order_covariance(&s.a0, &s.d0, &s.a1, &s.d1, &sigma0)?;
    Ok(FirstOrder {
        sigma0,
        sigma1,
        weak_squeezing_violated: weak_squeezing_violated(&mode, &[p.m1(), p.m2()]),
    })
}

/// Exact steady state with anomalous moments scaled by `p.eta`.
pub fn exact_covariance(
    mode: ModeSpec,
    hopping: f64,
    p: &PerturbationInput,
    convention: DiffusionConvention,
) -> Result<CovarianceState> {
    let spec = p.system(mode, hopping)?;
    steady_state_lyapunov(&drift(&spec)?, &diffusion(&spec, convention))
}

fn checked(num: Complex64, den: Complex64) -> Result<Complex64> {
    if den.norm() < 1e-14 {
        Err(Error::SingularParameters(den.norm()))
    } else {
        Ok(num / den)
    }
}

fn anomalous_cross(p: &PerturbationInput, j: f64, g: f64, w: f64, sign: f64) -> Result<Complex64> {
    let (n, m) = (p.n, p.m);
    let inner = c64(2.0 * m * (1.0 + n) * g, 0.0) + c64(g, sign * w) * (p.dm * p.dn);
    let num = c64(0.0, sign * 2.0 * j * g) * (c64(8.0 * j * j * m * (1.0 + n), 0.0) + inner * g);
    let den = c64(4.0 * j * j + g * g, 0.0) * (c64(4.0 * j * j, 0.0) + c64(g, sign * 2.0 * w).powi(2));
    checked(num, den)
}

/// `<a1† a2†>` at first order, literal closed form.
pub fn sigma14_closed_form(p: &PerturbationInput, hopping: f64, gamma: f64, omega: f64) -> Result<Complex64> {
    anomalous_cross(p, hopping, gamma, omega, 1.0)
}

/// The companion normal cross-correlation display, evaluated on its own.
pub fn sigma23_closed_form(p: &PerturbationInput, hopping: f64, gamma: f64, omega: f64) -> Result<Complex64> {
    anomalous_cross(p, hopping, gamma, omega, -1.0)
}

/// Coefficients of `ΔS₂ ∝ α + β Δm²` at `Δn = 0`.
pub fn alpha_beta_coefficients(n: f64, m: f64, gamma: f64, hopping: f64, omega: f64) -> Result<(f64, f64)> {
    let (g2, j2, w2) = (gamma * gamma, hopping * hopping, omega * omega);
    let occ = (2.0 * n + 1.0).powi(2);
    let a_den = occ * ((g2 + 4.0 * w2).powi(2) + 16.0 * j2 * j2 + 8.0 * j2 * (g2 - 4.0 * w2));
    let b_den = occ * (g2 + 4.0 * w2);
    for den in [a_den, b_den] {
        if !(den.abs() >= 1e-14) {
            return Err(Error::SingularParameters(den.abs()));
        }
    }
    let alpha = 16.0 * g2 * m * m * (n + 1.0).powi(2) * (g2 + 4.0 * j2 + 4.0 * w2) / a_den;
    let beta = 4.0 * g2 * (n + 1.0).powi(2) / b_den;
    Ok((alpha, beta))
}
