// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Purity, Rényi-2 entropy, entropy shifts from squeezing and the inter-mode
//! thermal current.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{quadrature_steady_variances, QuadratureMoments};
use crate::error::require;
use crate::matrix::{c64, determinant, inverse, trace, ComplexMatrix, CovarianceState};
use crate::system::ModeSpec;
use crate::{Error, Result};

/// Single-mode `det V` floor in the `1/√(4 det V)` purity convention.
pub const UNCERTAINTY_FLOOR: f64 = 0.25;

const FLOOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    pub s2: f64,
    pub purity: f64,
    pub det_sigma: f64,
}

impl EntropyReport {
    fn from_det(det: f64) -> Result<Self> {
        if det < UNCERTAINTY_FLOOR - FLOOR_TOL || !det.is_finite() {
            return Err(Error::Uncertainty {
                det,
                floor: UNCERTAINTY_FLOOR,
            });
        }
        Ok(Self {
            s2: 0.5 * (4.0 * det).ln(),
            purity: 1.0 / (4.0 * det).sqrt(),
            det_sigma: det,
        })
    }
}

/// `S₂ = ½ ln(4 det V)` with `det V = xx·pp - xp²/4`.
pub fn renyi2_single_mode(v: &QuadratureMoments) -> Result<EntropyReport> {
    EntropyReport::from_det(v.xx * v.pp - 0.25 * v.xp * v.xp)
}

/// The closed-form steady-state determinant
/// `(2N+1)² - 4R²(γ² - 8ω²)²/(γ² + 8ω²)²`.
///
/// This is not `xx·pp - xp²/4` of [`quadrature_steady_variances`], which gives
/// `(2N+1)² - 4R²γ²(γ² + 4ω²)/(γ² + 8ω²)²`; both are kept.
pub fn steady_det_closed_form(mode: &ModeSpec, n: f64, r: f64) -> f64 {
    let (g2, w2) = (mode.gamma().powi(2), mode.omega().powi(2));
    (2.0 * n + 1.0).powi(2) - 4.0 * r * r * ((g2 - 8.0 * w2) / (g2 + 8.0 * w2)).powi(2)
}

pub fn renyi2_closed_form(mode: &ModeSpec, n: f64, r: f64) -> Result<EntropyReport> {
    EntropyReport::from_det(steady_det_closed_form(mode, n, r))
}

#[derive(Debug)]
pub struct PurityPoint {
    pub r: f64,
    pub report: Result<EntropyReport>,
}

/// Steady-state purity for each `R` in the grid. Points outside
/// `[0, √(N(N+1))]` carry an error instead of a value.
pub fn purity_vs_r_curve(mode: &ModeSpec, n: f64, r_grid: &[f64]) -> Result<Vec<PurityPoint>> {
    require(n >= 0.0, "N", "N >= 0", n)?;
    let bound = (n * (n + 1.0)).sqrt();
    Ok(r_grid
        .iter()
        .map(|&r| {
            let report = if !(0.0..=bound * (1.0 + 1e-12)).contains(&r) {
                Err(Error::Unphysical {
                    m_sq: r * r,
                    bound: bound * bound,
                })
            } else {
                quadrature_steady_variances(mode, n, r).and_then(|v| renyi2_single_mode(&v))
            };
            PurityPoint { r, report }
        })
        .collect())
}

/// `2Jγ(n₂ - n₁)/(4J² + γ²)`, positive when heat flows from mode 1 to mode 2.
pub fn thermal_current(hopping: f64, gamma: f64, n1: f64, n2: f64) -> Result<f64> {
    require(gamma > 0.0, "gamma", "gamma > 0", gamma)?;
    Ok(2.0 * hopping * gamma * (n2 - n1) / (4.0 * hopping * hopping + gamma * gamma))
}

/// `2 Im <a1† a2>`, which is `<{x1, p2}>` when the quadrature cross terms
/// `<x1 x2>`, `<p1 p2>` and `<x2 p1>` are symmetric.
pub fn thermal_current_from_covariance(state: &CovarianceState) -> Result<f64> {
    if state.modes() != 2 {
        return Err(Error::Dimension(format!("thermal current needs 2 modes, got {}", state.modes())));
    }
    Ok(2.0 * state.coherence(0, 1).im)
}

/// Real covariance `½<{Q_i, Q_j}>` of `Q = (x1, p1, x2, p2, ...)` with
/// `x = (a + a†)/√2`, `p = -i(a - a†)/√2`; vacuum gives `I/2`.
pub fn quadrature_covariance(state: &CovarianceState) -> DMatrix<f64> {
    let s = state.matrix();
    let dim = s.nrows();
    let swap = |k: usize| k ^ 1;
    let sym = ComplexMatrix::from_fn(dim, dim, |i, j| (s[(i, j)] + s[(swap(j), swap(i))]) * 0.5);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i / 2 != j / 2 {
            c64(0.0, 0.0)
        } else if i % 2 == 0 {
            c64(h, 0.0)
        } else if j % 2 == 0 {
            c64(0.0, -h)
        } else {
            c64(0.0, h)
        }
    });
    (&t * sym * t.adjoint()).map(|z| z.re)
}

/// Gaussian Rényi-2 entropy `½ ln det(2V)` of an `n`-mode state, zero for vacuum.
pub fn renyi2_gaussian(state: &CovarianceState) -> Result<f64> {
    let v = quadrature_covariance(state) * 2.0;
    let det = v.determinant();
    if !(det > 0.0) {
        return Err(Error::NonPositiveDeterminant { value: det });
    }
    Ok(0.5 * det.ln())
}

fn real_det(m: &ComplexMatrix) -> Result<f64> {
    let d = determinant(m);
    if !(d.re > 0.0) || d.im.abs() > 1e-10 * d.re {
        return Err(Error::NonPositiveDeterminant { value: d.re });
    }
    Ok(d.re)
}

/// `½ ln(det σ / det σ0)`.
pub fn entropy_shift_exact(sigma0: &CovarianceState, sigma: &CovarianceState) -> Result<f64> {
    entropy_shift_exact_matrix(sigma0.matrix(), sigma.matrix())
}

pub fn entropy_shift_exact_matrix(sigma0: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if sigma0.shape() != sigma.shape() {
        return Err(Error::Dimension(format!("{:?} vs {:?}", sigma0.shape(), sigma.shape())));
    }
    Ok(0.5 * (real_det(sigma)?.ln() - real_det(sigma0)?.ln()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbativeShift {
    /// `-¼ Tr[(σ0⁻¹σ1)²]`.
    pub value: f64,
    /// `Tr(σ0⁻¹σ1)`, the first-order term the quadratic formula assumes absent.
    pub first_order_trace: Complex64,
}

pub fn entropy_shift_perturbative(sigma0: &CovarianceState, sigma1: &CovarianceState) -> Result<PerturbativeShift> {
    let s0 = sigma0.matrix();
    let s1 = sigma1.matrix();
    if s0.shape() != s1.shape() {
        return Err(Error::Dimension(format!("{:?} vs {:?}", s0.shape(), s1.shape())));
    }
    let x = inverse(s0)? * s1;
    Ok(PerturbativeShift {
        value: -0.25 * trace(&(&x * &x)).re,
        first_order_trace: trace(&x),
    })
}

/// `½|σ14|⁴`, the rank-2 anti-diagonal estimate.
pub fn entropy_shift_quartic(sigma14: Complex64) -> f64 {
    0.5 * sigma14.norm_sqr().powi(2)
}
