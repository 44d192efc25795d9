// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Eigen-analysis of drift matrices: PT-phase classification, exceptional-point
//! bisection along one-parameter families, and the `(M1, M2)` fan scan.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{eigen, eigenvalues};
use crate::matrix::{c64, condition_number, ComplexMatrix};
use crate::system::{drift, ModeSpec, SystemSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    /// `|Im λ| <= im_tol` counts as a purely real (overdamped) eigenvalue.
    pub im_tol: f64,
    /// Largest eigenvalue gap accepted at a refined exceptional point.
    pub gap_tol: f64,
    /// Eigenvector condition number above which a matrix is reported defective.
    pub cond_threshold: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            im_tol: 1e-9,
            gap_tol: 1e-6,
            cond_threshold: 1e8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PtPhase {
    /// Every eigenvalue keeps a nonzero oscillation frequency.
    Unbroken,
    /// At least one eigenvalue is purely real.
    Broken,
    /// Eigenvector matrix numerically singular.
    Degenerate,
}

impl fmt::Display for PtPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Unbroken => "unbroken",
            Self::Broken => "broken",
            Self::Degenerate => "degenerate",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// Sorted by real part, then imaginary part, both descending.
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm right eigenvectors, columns aligned with `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
    pub cond_v: f64,
    pub pt_phase: PtPhase,
}

impl SpectralReport {
    /// Smallest pairwise eigenvalue distance.
    pub fn gap(&self) -> f64 {
        min_gap(&self.eigenvalues)
    }
}

fn descending(a: &Complex64, b: &Complex64) -> Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

pub fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(descending);
}

pub fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            gap = gap.min((a - b).norm());
        }
    }
    gap
}

fn phase_of(values: &[Complex64], cond_v: f64, cfg: &SpectralConfig) -> PtPhase {
    if !(cond_v <= cfg.cond_threshold) {
        PtPhase::Degenerate
    } else if has_real_eigenvalue(values, cfg.im_tol) {
        PtPhase::Broken
    } else {
        PtPhase::Unbroken
    }
}

fn has_real_eigenvalue(values: &[Complex64], im_tol: f64) -> bool {
    values.iter().any(|l| l.im.abs() <= im_tol)
}

pub fn eigendecompose(a: &ComplexMatrix) -> Result<SpectralReport> {
    eigendecompose_with(a, &SpectralConfig::default())
}

pub fn eigendecompose_with(a: &ComplexMatrix, cfg: &SpectralConfig) -> Result<SpectralReport> {
    if a.nrows() > 8 {
        return Err(Error::Dimension(format!("eigendecompose supports dim <= 8, got {}", a.nrows())));
    }
    let e = eigen(a)?;
    let mut order: Vec<usize> = (0..e.values.len()).collect();
    order.sort_by(|&i, &j| descending(&e.values[i], &e.values[j]));
    let eigenvalues: Vec<Complex64> = order.iter().map(|&i| e.values[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(a.nrows(), a.nrows(), |r, c| e.vectors[(r, order[c])]);
    let cond_v = condition_number(&eigenvectors);
    let pt_phase = phase_of(&eigenvalues, cond_v, cfg);
    Ok(SpectralReport {
        eigenvalues,
        eigenvectors,
        cond_v,
        pt_phase,
    })
}

/// Closed-form pair `-γ/2 ± sqrt(γ²|M|² - ω²)`, principal square root; `(λ+, λ-)`.
pub fn single_mode_eigenvalues(mode: &ModeSpec, m: Complex64) -> (Complex64, Complex64) {
    let (w, g) = (mode.omega(), mode.gamma());
    let root = c64(g * g * m.norm_sqr() - w * w, 0.0).sqrt();
    let centre = c64(-g / 2.0, 0.0);
    (centre + root, centre - root)
}

pub fn classify_pt_phase(a: &ComplexMatrix, im_tol: f64) -> Result<PtPhase> {
    let cfg = SpectralConfig {
        im_tol,
        ..SpectralConfig::default()
    };
    Ok(eigendecompose_with(a, &cfg)?.pt_phase)
}

/// Bisection criterion for locating an exceptional point along a family `A(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpPredicate {
    /// Some eigenvalue becomes purely real (`|Im λ| <= im_tol`).
    #[default]
    ImaginaryCrossing,
    /// Real parts leave their common value `tr A / n` (by more than `im_tol`).
    /// Catches coalescences whose eigenvalues stay complex.
    RealPartSplitting,
}

impl EpPredicate {
    fn holds(&self, values: &[Complex64], tol: f64) -> bool {
        match self {
            Self::ImaginaryCrossing => has_real_eigenvalue(values, tol),
            Self::RealPartSplitting => {
                let mean = values.iter().map(|l| l.re).sum::<f64>() / values.len() as f64;
                values.iter().any(|l| (l.re - mean).abs() > tol)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpPoint {
    /// Family parameter at the refined location.
    pub s: f64,
    /// Final bracket width.
    pub width: f64,
    pub gap: f64,
    pub cond_v: f64,
    pub eigenvalues: Vec<Complex64>,
}

impl EpPoint {
    pub fn within_gap_tolerance(&self, cfg: &SpectralConfig) -> bool {
        self.gap <= cfg.gap_tol
    }
}

/// Bisects `s` in `[s_lo, s_hi]` until the bracket is narrower than `tol`.
/// The predicate must differ at the endpoints, and neither endpoint may be
/// numerically defective.
pub fn find_ep_on_ray<F>(
    builder: F,
    s_lo: f64,
    s_hi: f64,
    tol: f64,
    predicate: EpPredicate,
    cfg: &SpectralConfig,
) -> Result<EpPoint>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    if !(s_lo < s_hi) || !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "bracket",
            constraint: "s_lo < s_hi and tol > 0",
            value: s_hi - s_lo,
        });
    }
    let mut lo = s_lo;
    let mut hi = s_hi;
    for s in [lo, hi] {
        let rep = eigendecompose_with(&builder(s)?, cfg)?;
        if rep.pt_phase == PtPhase::Degenerate {
            return Err(Error::DegenerateEndpoint { s });
        }
    }
    let p_lo = predicate.holds(&eigenvalues(&builder(lo)?)?, cfg.im_tol);
    let p_hi = predicate.holds(&eigenvalues(&builder(hi)?)?, cfg.im_tol);
    if p_lo == p_hi {
        return Err(Error::NoBracket { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if predicate.holds(&eigenvalues(&builder(mid)?)?, cfg.im_tol) == p_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let a = builder(s)?;
    let (cond_v, mut values) = match eigendecompose_with(&a, cfg) {
        Ok(rep) => (rep.cond_v, rep.eigenvalues),
        // eigenvectors can fail to resolve this close to coalescence
        Err(_) => {
            let mut v = eigenvalues(&a)?;
            sort_eigenvalues(&mut v);
            (f64::INFINITY, v)
        }
    };
    sort_eigenvalues(&mut values);
    Ok(EpPoint {
        s,
        width: hi - lo,
        gap: min_gap(&values),
        cond_v,
        eigenvalues: values,
    })
}

/// Greedy nearest-neighbour assignment: `out[i]` is the index in `next`
/// continuing branch `i` of `prev`.
pub fn match_branches(prev: &[Complex64], next: &[Complex64]) -> Vec<usize> {
    let n = prev.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, p) in prev.iter().enumerate() {
        for (j, q) in next.iter().enumerate() {
            pairs.push(((p - q).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = vec![usize::MAX; n];
    let mut used = vec![false; next.len()];
    for (_, i, j) in pairs {
        if out[i] == usize::MAX && !used[j] {
            out[i] = j;
            used[j] = true;
        }
    }
    out
}

#[derive(Debug)]
pub struct RayPoint {
    pub s: f64,
    /// Eigenvalues ordered by branch continuity from the first sample; empty
    /// when the decomposition failed.
    pub branches: Vec<Complex64>,
    pub cond_v: f64,
    pub gap: f64,
    pub pt_phase: Option<PtPhase>,
    pub error: Option<Error>,
}

/// Spectral reports along `A(s)` for each `s` in order, with branch tracking.
/// A failed sample is kept with its error; tracking resumes from the last
/// good sample.
pub fn ray_scan<F>(builder: F, s_grid: &[f64], cfg: &SpectralConfig) -> Vec<RayPoint>
where
    F: Fn(f64) -> Result<ComplexMatrix> + Sync,
{
    let reports: Vec<Result<SpectralReport>> = s_grid
        .par_iter()
        .map(|&s| eigendecompose_with(&builder(s)?, cfg))
        .collect();
    let mut out: Vec<RayPoint> = Vec::with_capacity(reports.len());
    let mut last: Option<Vec<Complex64>> = None;
    for (&s, rep) in s_grid.iter().zip(reports) {
        let rep = match rep {
            Ok(r) => r,
            Err(e) => {
                out.push(RayPoint {
                    s,
                    branches: Vec::new(),
                    cond_v: f64::NAN,
                    gap: f64::NAN,
                    pt_phase: None,
                    error: Some(e),
                });
                continue;
            }
        };
        let branches: Vec<Complex64> = match &last {
            None => rep.eigenvalues.clone(),
            Some(prev) => match_branches(prev, &rep.eigenvalues)
                .into_iter()
                .map(|j| rep.eigenvalues[j])
                .collect(),
        };
        last = Some(branches.clone());
        out.push(RayPoint {
            s,
            gap: rep.gap(),
            branches,
            cond_v: rep.cond_v,
            pt_phase: Some(rep.pt_phase),
            error: None,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FanPoint {
    pub gamma: f64,
    pub m1: f64,
    pub m2: f64,
    /// `None` when the eigensolver failed; see `error`.
    pub report: Option<SpectralReport>,
    pub error: Option<String>,
    pub physical: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourPoint {
    pub gamma: f64,
    pub m1: f64,
    pub m2: f64,
    pub gap: f64,
    pub cond_v: f64,
    /// False when bisection failed; location is then the segment midpoint.
    pub refined: bool,
}

impl ContourPoint {
    /// Polar angle in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        self.m2.atan2(self.m1).rem_euclid(TAU)
    }
}

/// Per-γ checks of the quadrant structure of the fan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FanClaims {
    pub gamma: f64,
    /// Grid points with `M1 M2 > 0`.
    pub same_sign_points: usize,
    pub same_sign_broken: usize,
    /// Grid points with `M1 M2 < 0`.
    pub opposite_sign_points: usize,
    pub opposite_sign_unbroken: usize,
    pub opposite_sign_contour_points: usize,
    /// Angular extent of contour points with `M1 M2 < 0`, radians; zero if none.
    pub opposite_sign_angle_span: f64,
    pub origin_phase: Option<PtPhase>,
}

impl FanClaims {
    pub fn same_sign_broken_fraction(&self) -> f64 {
        if self.same_sign_points == 0 {
            f64::NAN
        } else {
            self.same_sign_broken as f64 / self.same_sign_points as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FanScan {
    /// γ-major, then `M1`, then `M2` (row-major).
    pub points: Vec<FanPoint>,
    /// Grouped by γ, each group ordered by polar angle then radius.
    pub contours: Vec<ContourPoint>,
    pub claims: Vec<FanClaims>,
}

impl FanScan {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.report.is_none()).count()
            + self.contours.iter().filter(|c| !c.refined).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanOptions {
    pub spectral: SpectralConfig,
    pub bisection_tol: f64,
    pub physical_tol: f64,
}

impl Default for FanOptions {
    fn default() -> Self {
        Self {
            spectral: SpectralConfig::default(),
            bisection_tol: 1e-10,
            physical_tol: 0.0,
        }
    }
}

/// Eigen-analysis of the two-mode drift over a real `(M1, M2)` grid for each γ,
/// with phase boundaries refined by bisection between neighbouring grid points.
pub fn ep_fan_scan(
    base: &SystemSpec,
    m1_grid: &[f64],
    m2_grid: &[f64],
    gammas: &[f64],
    opts: &FanOptions,
) -> Result<FanScan> {
    if m1_grid.is_empty() || m2_grid.is_empty() || gammas.is_empty() {
        return Err(Error::Dimension("fan scan grids must be nonempty".into()));
    }
    let (n1, n2) = (m1_grid.len(), m2_grid.len());
    let cfg = opts.spectral;
    let mut points = Vec::with_capacity(gammas.len() * n1 * n2);
    let mut contours = Vec::new();
    let mut claims = Vec::with_capacity(gammas.len());

    for &gamma in gammas {
        let spec = base.with_gamma(gamma)?;
        let build = |m1: f64, m2: f64| drift(&spec.with_anomalous(&[c64(m1, 0.0), c64(m2, 0.0)]));

        let layer: Vec<FanPoint> = (0..n1 * n2)
            .into_par_iter()
            .map(|idx| {
                let (m1, m2) = (m1_grid[idx / n2], m2_grid[idx % n2]);
                let trial = spec.with_anomalous(&[c64(m1, 0.0), c64(m2, 0.0)]);
                let result = build(m1, m2).and_then(|a| eigendecompose_with(&a, &cfg));
                let (report, error) = match result {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                FanPoint {
                    gamma,
                    m1,
                    m2,
                    report,
                    error,
                    physical: trial.is_physical(opts.physical_tol),
                }
            })
            .collect();

        let broken = |p: &FanPoint| {
            p.report
                .as_ref()
                .map(|r| has_real_eigenvalue(&r.eigenvalues, cfg.im_tol))
        };
        let mut segments = Vec::new();
        for i in 0..n1 {
            for j in 0..n2 {
                let here = &layer[i * n2 + j];
                let mut neighbours = Vec::with_capacity(2);
                if j + 1 < n2 {
                    neighbours.push(&layer[i * n2 + j + 1]);
                }
                if i + 1 < n1 {
                    neighbours.push(&layer[(i + 1) * n2 + j]);
                }
                for there in neighbours {
                    if let (Some(a), Some(b)) = (broken(here), broken(there)) {
                        if a != b {
                            segments.push(((here.m1, here.m2), (there.m1, there.m2)));
                        }
                    }
                }
            }
        }

        let mut layer_contours: Vec<ContourPoint> = segments
            .par_iter()
            .map(|&((x0, y0), (x1, y1))| {
                let seg = |s: f64| build(x0 + s * (x1 - x0), y0 + s * (y1 - y0));
                match find_ep_on_ray(seg, 0.0, 1.0, opts.bisection_tol, EpPredicate::ImaginaryCrossing, &cfg) {
                    Ok(ep) => ContourPoint {
                        gamma,
                        m1: x0 + ep.s * (x1 - x0),
                        m2: y0 + ep.s * (y1 - y0),
                        gap: ep.gap,
                        cond_v: ep.cond_v,
                        refined: true,
                    },
                    Err(_) => ContourPoint {
                        gamma,
                        m1: 0.5 * (x0 + x1),
                        m2: 0.5 * (y0 + y1),
                        gap: f64::NAN,
                        cond_v: f64::NAN,
                        refined: false,
                    },
                }
            })
            .collect();
        layer_contours.sort_by(|a, b| {
            a.angle()
                .total_cmp(&b.angle())
                .then(a.m1.hypot(a.m2).total_cmp(&b.m1.hypot(b.m2)))
        });

        claims.push(fan_claims(gamma, &layer, &layer_contours, cfg.im_tol));
        points.extend(layer);
        contours.extend(layer_contours);
    }
    Ok(FanScan {
        points,
        contours,
        claims,
    })
}

fn fan_claims(gamma: f64, layer: &[FanPoint], contours: &[ContourPoint], im_tol: f64) -> FanClaims {
    let real = |p: &FanPoint| p.report.as_ref().map(|r| has_real_eigenvalue(&r.eigenvalues, im_tol));
    let same: Vec<_> = layer.iter().filter(|p| p.m1 * p.m2 > 0.0).collect();
    let opposite: Vec<_> = layer.iter().filter(|p| p.m1 * p.m2 < 0.0).collect();
    let opp_contours: Vec<f64> = contours
        .iter()
        .filter(|c| c.refined && c.m1 * c.m2 < 0.0)
        .map(|c| c.angle())
        .collect();
    // span within each of quadrants II and IV, taking the wider one
    let span = |lo: f64, hi: f64| {
        let inq: Vec<f64> = opp_contours.iter().copied().filter(|a| *a > lo && *a < hi).collect();
        if inq.is_empty() {
            0.0
        } else {
            inq.iter().cloned().fold(f64::MIN, f64::max) - inq.iter().cloned().fold(f64::MAX, f64::min)
        }
    };
    let half_pi = TAU / 4.0;
    FanClaims {
        gamma,
        same_sign_points: same.len(),
        same_sign_broken: same.iter().filter(|p| real(p) == Some(true)).count(),
        opposite_sign_points: opposite.len(),
        opposite_sign_unbroken: opposite.iter().filter(|p| real(p) == Some(false)).count(),
        opposite_sign_contour_points: opp_contours.len(),
        opposite_sign_angle_span: span(half_pi, 2.0 * half_pi).max(span(3.0 * half_pi, TAU)),
        origin_phase: layer
            .iter()
            .find(|p| p.m1 == 0.0 && p.m2 == 0.0)
            .and_then(|p| p.report.as_ref().map(|r| r.pt_phase)),
    }
}
