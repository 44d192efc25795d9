// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Mode parameters, drift matrices and diffusion matrices.
//!
//! Operator ordering is `(a1, a1†, a2, a2†)`. The drift `A` generates
//! `dR/dt = A R`, the diffusion `D` enters `dσ/dt = Aσ + σA† + D`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::BathMoments;
use crate::error::require;
use crate::matrix::{c64, direct_sum, ComplexMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    omega: f64,
    gamma: f64,
}

impl ModeSpec {
    pub fn new(omega: f64, gamma: f64) -> Result<Self> {
        require(omega > 0.0, "omega", "omega > 0", omega)?;
        require(gamma > 0.0, "gamma", "gamma > 0", gamma)?;
        Ok(Self { omega, gamma })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Squeezing strength `ω/γ` at which the single-mode drift is defective.
    pub fn critical_anomalous(&self) -> f64 {
        self.omega / self.gamma
    }
}

/// Which diffusion matrix to pair with the drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffusionConvention {
    /// Blocks `[[γ(N+2), 2γM], [2γM, γ(N+2)]]`, taken verbatim.
    #[serde(alias = "paper")]
    PaperLiteral,
    /// Blocks chosen so that the uncoupled steady state has `<a†a> = N` and
    /// `<a²> = γM/(γ + 2iω)` under the squeezing-dependent drift.
    #[default]
    #[serde(alias = "corrected")]
    ConsistencyCorrected,
}

impl fmt::Display for DiffusionConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PaperLiteral => "paper",
            Self::ConsistencyCorrected => "corrected",
        })
    }
}

impl std::str::FromStr for DiffusionConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" | "paper-literal" => Ok(Self::PaperLiteral),
            "corrected" | "consistency-corrected" => Ok(Self::ConsistencyCorrected),
            other => Err(format!("unknown diffusion convention `{other}` (expected paper|corrected)")),
        }
    }
}

/// One or two modes, their baths, and the coherent hopping `J` between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    modes: Vec<ModeSpec>,
    hopping: f64,
    baths: Vec<BathMoments>,
}

impl SystemSpec {
    pub fn single(mode: ModeSpec, bath: BathMoments) -> Self {
        Self {
            modes: vec![mode],
            hopping: 0.0,
            baths: vec![bath],
        }
    }

    /// Both modes must share one damping rate.
    pub fn two_mode(
        first: ModeSpec,
        second: ModeSpec,
        hopping: f64,
        baths: [BathMoments; 2],
    ) -> Result<Self> {
        require(hopping.is_finite(), "J", "J finite", hopping)?;
        let spec = Self {
            modes: vec![first, second],
            hopping,
            baths: baths.to_vec(),
        };
        spec.shared_gamma()?;
        Ok(spec)
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn baths(&self) -> &[BathMoments] {
        &self.baths
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.modes.len()
    }

    /// Same system with the anomalous correlations replaced.
    pub fn with_anomalous(&self, m: &[Complex64]) -> Self {
        let mut out = self.clone();
        for (b, &mi) in out.baths.iter_mut().zip(m) {
            *b = b.with_m(mi);
        }
        out
    }

    /// Same system with every mode's damping rate set to `gamma`.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        let modes = self
            .modes
            .iter()
            .map(|m| ModeSpec::new(m.omega, gamma))
            .collect::<Result<_>>()?;
        Ok(Self { modes, ..self.clone() })
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.baths.iter().all(|b| b.is_physical(tol))
    }

    fn shared_gamma(&self) -> Result<f64> {
        let g = self.modes[0].gamma;
        for m in &self.modes[1..] {
            if m.gamma != g {
                return Err(Error::InvalidParameter {
                    name: "gamma",
                    constraint: "two-mode drift requires a shared gamma",
                    value: m.gamma,
                });
            }
        }
        Ok(g)
    }
}

/// `[[-iω - γ/2, -γM], [-γM*, iω - γ/2]]`.
pub fn single_mode_drift(mode: &ModeSpec, m: Complex64) -> ComplexMatrix {
    let (w, g) = (mode.omega, mode.gamma);
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[c64(-g / 2.0, -w), -m * g, -m.conj() * g, c64(-g / 2.0, w)],
    )
}

/// Two-mode drift; diagonal blocks are single-mode drifts, off-diagonal
/// blocks are `∓iJ diag(1, -1)`.
pub fn two_mode_drift(spec: &SystemSpec) -> Result<ComplexMatrix> {
    if spec.mode_count() != 2 {
        return Err(Error::Dimension(format!(
            "two-mode drift needs 2 modes, got {}",
            spec.mode_count()
        )));
    }
    spec.shared_gamma()?;
    let j = spec.hopping;
    let mut a = direct_sum(&[
        single_mode_drift(&spec.modes[0], spec.baths[0].m()),
        single_mode_drift(&spec.modes[1], spec.baths[1].m()),
    ]);
    a[(0, 2)] = c64(0.0, -j);
    a[(2, 0)] = c64(0.0, -j);
    a[(1, 3)] = c64(0.0, j);
    a[(3, 1)] = c64(0.0, j);
    Ok(a)
}

/// Drift for a one- or two-mode system.
pub fn drift(spec: &SystemSpec) -> Result<ComplexMatrix> {
    match spec.mode_count() {
        1 => Ok(single_mode_drift(&spec.modes[0], spec.baths[0].m())),
        2 => two_mode_drift(spec),
        n => Err(Error::Dimension(format!("expected 1 or 2 modes, got {n}"))),
    }
}

/// 2×2 diffusion block of one mode.
pub fn diffusion_block(
    mode: &ModeSpec,
    bath: &BathMoments,
    convention: DiffusionConvention,
) -> ComplexMatrix {
    let g = mode.gamma;
    let (n, m) = (bath.n(), bath.m());
    match convention {
        DiffusionConvention::PaperLiteral => {
            let d = c64(g * (n + 2.0), 0.0);
            ComplexMatrix::from_row_slice(2, 2, &[d, m * (2.0 * g), m * (2.0 * g), d])
        }
        DiffusionConvention::ConsistencyCorrected => {
            // Solves A σ + σ A† = -D for σ = [[N+1, X], [X*, N]], X = γM/(γ+2iω).
            let q = anomalous_heating(mode, m);
            let off = m * (2.0 * g * (n + 1.0));
            ComplexMatrix::from_row_slice(
                2,
                2,
                &[c64(g * (n + 1.0) + q, 0.0), off, off.conj(), c64(g * n + q, 0.0)],
            )
        }
    }
}

/// `2γ³|M|²/(γ² + 4ω²)`, the diagonal diffusion the squeezing-dependent drift
/// needs on top of the thermal part.
pub(crate) fn anomalous_heating(mode: &ModeSpec, m: Complex64) -> f64 {
    let (w, g) = (mode.omega, mode.gamma);
    2.0 * g.powi(3) * m.norm_sqr() / (g * g + 4.0 * w * w)
}

/// Block-diagonal diffusion for a one- or two-mode system.
pub fn diffusion(spec: &SystemSpec, convention: DiffusionConvention) -> ComplexMatrix {
    let blocks: Vec<_> = spec
        .modes
        .iter()
        .zip(&spec.baths)
        .map(|(mode, bath)| diffusion_block(mode, bath, convention))
        .collect();
    direct_sum(&blocks)
}

pub fn two_mode_diffusion(
    spec: &SystemSpec,
    convention: DiffusionConvention,
) -> Result<ComplexMatrix> {
    if spec.mode_count() != 2 {
        return Err(Error::Dimension(format!(
            "two-mode diffusion needs 2 modes, got {}",
            spec.mode_count()
        )));
    }
    Ok(diffusion(spec, convention))
}
