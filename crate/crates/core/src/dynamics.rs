// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time evolution of first and second moments, the steady-state Lyapunov
//! solve, and the single-mode closed forms.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::BathMoments;
use crate::error::require;
use crate::linalg::{expm, solve_lyapunov, DormandPrince, OdeOptions};
use crate::matrix::{c64, hermitize, ComplexMatrix, CovarianceState};
use crate::system::ModeSpec;
use crate::{Error, Result};

/// States sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    times: Vec<f64>,
    states: Vec<S>,
    /// Frobenius norm of the Hermitian projection applied at each output time
    /// (all zero for first-moment trajectories).
    corrections: Vec<f64>,
}

impl<S> Trajectory<S> {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn hermitization_corrections(&self) -> &[f64] {
        &self.corrections
    }

    pub fn max_hermitization_correction(&self) -> f64 {
        self.corrections.iter().cloned().fold(0.0, f64::max)
    }

    pub fn last(&self) -> Option<(&f64, &S)> {
        self.times.last().zip(self.states.last())
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::TimeGrid("empty time grid".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::TimeGrid("non-finite time".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::TimeGrid("times must be strictly increasing".into()));
    }
    Ok(())
}

/// `R(t) = exp(A t) R(0)`, one exponential per grid time; the grid starts at `t = 0`
/// implicitly, so entries are absolute times.
pub fn evolve_first_moments(
    a: &ComplexMatrix,
    r0: &DVector<Complex64>,
    t_grid: &[f64],
) -> Result<Trajectory<DVector<Complex64>>> {
    check_grid(t_grid)?;
    if a.nrows() != r0.len() || !a.is_square() {
        return Err(Error::Dimension(format!(
            "drift is {}x{} but initial moments have length {}",
            a.nrows(),
            a.ncols(),
            r0.len()
        )));
    }
    let states = t_grid
        .iter()
        .map(|&t| {
            if t == 0.0 {
                Ok(r0.clone())
            } else {
                Ok(expm(&(a * c64(t, 0.0)))? * r0)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: t_grid.to_vec(),
        corrections: vec![0.0; states.len()],
        states,
    })
}

/// Integrates `dσ/dt = Aσ + σA† + D` from `σ(0) = sigma0`, stepping exactly to
/// each grid time. Emitted states are projected onto Hermitian matrices and the
/// projection norm is recorded.
pub fn evolve_covariance(
    a: &ComplexMatrix,
    d: &ComplexMatrix,
    sigma0: &CovarianceState,
    t_grid: &[f64],
    opts: OdeOptions,
) -> Result<Trajectory<CovarianceState>> {
    match evolve_covariance_partial(a, d, sigma0, t_grid, opts)? {
        (traj, None) => Ok(traj),
        (_, Some(e)) => Err(e),
    }
}

/// As [`evolve_covariance`], but an integration failure ends the trajectory
/// early and is returned next to the states reached so far. Input errors are
/// still returned as `Err`.
pub fn evolve_covariance_partial(
    a: &ComplexMatrix,
    d: &ComplexMatrix,
    sigma0: &CovarianceState,
    t_grid: &[f64],
    opts: OdeOptions,
) -> Result<(Trajectory<CovarianceState>, Option<Error>)> {
    check_grid(t_grid)?;
    if t_grid[0] < 0.0 {
        return Err(Error::TimeGrid("times must be >= 0".into()));
    }
    let dim = sigma0.dim();
    if a.shape() != (dim, dim) || d.shape() != (dim, dim) {
        return Err(Error::Dimension(format!(
            "drift {:?}, diffusion {:?} and covariance {dim}x{dim} disagree",
            a.shape(),
            d.shape()
        )));
    }
    let a_dag = a.adjoint();
    let rhs = |_t: f64, s: &ComplexMatrix| a * s + s * &a_dag + d;
    let mut integrator = DormandPrince::new(rhs, 0.0, sigma0.matrix().clone(), opts);

    let mut states = Vec::with_capacity(t_grid.len());
    let mut corrections = Vec::with_capacity(t_grid.len());
    let mut failure = None;
    for &t in t_grid {
        if let Err(e) = integrator.advance_to(t) {
            failure = Some(e);
            break;
        }
        let (h, corr) = hermitize(integrator.state());
        integrator.set_state(h.clone());
        corrections.push(corr);
        states.push(CovarianceState::new(h)?);
    }
    let traj = Trajectory {
        times: t_grid[..states.len()].to_vec(),
        states,
        corrections,
    };
    Ok((traj, failure))
}

/// Unique Hermitian solution of `Aσ + σA† = -D` for Hurwitz-stable `A`.
pub fn steady_state_lyapunov(a: &ComplexMatrix, d: &ComplexMatrix) -> Result<CovarianceState> {
    let x = solve_lyapunov(a, d)?;
    let (h, _) = hermitize(&x);
    CovarianceState::new(h)
}

/// `<a²>_ss = γM/(γ + 2iω)`.
pub fn steady_anomalous(mode: &ModeSpec, m: Complex64) -> Complex64 {
    m * mode.gamma() / c64(mode.gamma(), 2.0 * mode.omega())
}

/// Closed-form single-mode steady state: `<a a†> = N + 1`, `<a†a> = N`,
/// `<a²> = γM/(γ + 2iω)`.
pub fn single_mode_steady_closed_form(mode: &ModeSpec, bath: &BathMoments) -> CovarianceState {
    let x = steady_anomalous(mode, bath.m());
    let sigma = ComplexMatrix::from_row_slice(
        2,
        2,
        &[c64(bath.n() + 1.0, 0.0), x, x.conj(), c64(bath.n(), 0.0)],
    );
    CovarianceState::new(sigma).expect("2x2 covariance")
}

/// `<x²>`, `<p²>` and `<{x, p}>` with vacuum variance 1 (the `2N + 1` normalisation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMoments {
    pub xx: f64,
    pub pp: f64,
    pub xp: f64,
}

impl QuadratureMoments {
    pub fn new(xx: f64, pp: f64, xp: f64) -> Result<Self> {
        require(xx > 0.0, "xx", "<x²> > 0", xx)?;
        require(pp > 0.0, "pp", "<p²> > 0", pp)?;
        require(xp.is_finite(), "xp", "<{x,p}> finite", xp)?;
        Ok(Self { xx, pp, xp })
    }
}

/// Steady-state quadrature moments for real squeezing `R = Re M`:
/// `xx, pp = 2N + 1 ± 2γ²R/(γ² + 8ω²)`, `xp = 8γωR/(γ² + 8ω²)`.
pub fn quadrature_steady_variances(mode: &ModeSpec, n: f64, r: f64) -> Result<QuadratureMoments> {
    require(n >= 0.0, "N", "N >= 0", n)?;
    require(r.is_finite(), "R", "R finite", r)?;
    let (w, g) = (mode.omega(), mode.gamma());
    let den = g * g + 8.0 * w * w;
    let shift = 2.0 * g * g * r / den;
    QuadratureMoments::new(2.0 * n + 1.0 + shift, 2.0 * n + 1.0 - shift, 8.0 * g * w * r / den)
}

/// The two steady-state routes to single-mode squeezing disagree in their
/// denominators (`γ + 2iω` against `γ² + 8ω²`); this reports both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingRouteComparison {
    /// `Re <a²>` from `γM/(γ + 2iω)`.
    pub from_moments: f64,
    /// `(xx - pp)/4` from the quadrature variances.
    pub from_quadratures: f64,
    pub discrepancy: f64,
}

pub fn compare_squeezing_routes(mode: &ModeSpec, n: f64, r: f64) -> Result<SqueezingRouteComparison> {
    let q = quadrature_steady_variances(mode, n, r)?;
    let from_moments = steady_anomalous(mode, c64(r, 0.0)).re;
    let from_quadratures = (q.xx - q.pp) / 4.0;
    Ok(SqueezingRouteComparison {
        from_moments,
        from_quadratures,
        discrepancy: from_moments - from_quadratures,
    })
}
