// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Gaussian (second-moment) description of one or two bosonic modes coupled to
//! squeezed thermal reservoirs.
//!
//! The crate is organised bottom-up:
//!
//! * [`bath`] and [`system`] build reservoir moments, drift and diffusion matrices.
//! * [`linalg`] holds the dense complex kernels: eigensolver, matrix exponential,
//!   Lyapunov solver.
//! * [`dynamics`] evolves first moments and covariances and carries the
//!   single-mode closed forms.
//! * [`spectral`] classifies drift spectra and locates exceptional points.
//! * [`entropy`] and [`perturbation`] compute purity, Renyi-2 entropy, thermal
//!   currents and the weak-squeezing expansion of the two-mode steady state.
//!
//! Units: hbar = 1, all rates and frequencies share one inverse-time unit.

// NaN must fail range checks, so several guards are written as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod dynamics;
pub mod entropy;
mod error;
pub mod linalg;
pub mod matrix;
pub mod perturbation;
pub mod spectral;
pub mod system;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
