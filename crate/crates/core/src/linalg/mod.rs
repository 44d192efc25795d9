// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Small dense complex kernels.

mod eigen;
mod expm;
mod lyapunov;
mod ode;

pub use eigen::{eigen, eigenvalues, schur, Eigen, Schur};
pub use expm::expm;
pub use lyapunov::{lyapunov_residual, solve_lyapunov, solve_lyapunov_unchecked, STABILITY_THRESHOLD};
pub use ode::{DormandPrince, OdeOptions};
