// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {constraint} (got {value})")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("drift matrix is not Hurwitz-stable: eigenvalue {eigenvalue} has Re >= {threshold:e}")]
    Unstable {
        eigenvalue: Complex64,
        threshold: f64,
    },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("Lyapunov residual {residual:e} exceeds bound {bound:e}")]
    Residual { residual: f64, bound: f64 },

    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("integration failed at t = {t}: step size {step:e} underflowed")]
    StepUnderflow { t: f64, step: f64 },

    #[error("invalid time grid: {0}")]
    TimeGrid(String),

    #[error("no phase change in bracket [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("bracket endpoint s = {s} is numerically defective; move the bracket away from the exceptional point")]
    DegenerateEndpoint { s: f64 },

    #[error("determinant {value:e} is not positive")]
    NonPositiveDeterminant { value: f64 },

    #[error("uncertainty bound violated: det V = {det} < {floor}")]
    Uncertainty { det: f64, floor: f64 },

    #[error("unphysical bath: |M|^2 = {m_sq} exceeds N(N+1) = {bound}")]
    Unphysical { m_sq: f64, bound: f64 },

    #[error("singular parameters: |denominator| = {0:e}")]
    SingularParameters(f64),
}

impl Error {
    /// Short kebab-case tag for tabular status columns.
    pub fn code(&self) -> &'static str {
        match self {
            Self::InvalidParameter { .. } => "invalid-parameter",
            Self::Dimension(_) => "dimension",
            Self::Unstable { .. } => "unstable",
            Self::Singular(_) => "singular",
            Self::Residual { .. } => "residual",
            Self::NoConvergence { .. } => "no-convergence",
            Self::StepUnderflow { .. } => "step-underflow",
            Self::TimeGrid(_) => "time-grid",
            Self::NoBracket { .. } => "no-bracket",
            Self::DegenerateEndpoint { .. } => "degenerate-endpoint",
            Self::NonPositiveDeterminant { .. } => "non-positive-determinant",
            Self::Uncertainty { .. } => "uncertainty",
            Self::Unphysical { .. } => "unphysical",
            Self::SingularParameters(_) => "singular-parameters",
        }
    }
}

/// Checks a real scalar against a predicate and returns a named error on failure.
pub(crate) fn require(
    ok: bool,
    name: &'static str,
    constraint: &'static str,
    value: f64,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            constraint,
            value,
        })
    }
}
