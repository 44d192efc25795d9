// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command dispatch. Every command returns a [`ScanResult`] whose row order
//! depends only on the configuration.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use sqbath::bath::BathMoments;
use sqbath::dynamics::{evolve_covariance_partial, single_mode_steady_closed_form, steady_state_lyapunov};
use sqbath::entropy::{
    entropy_shift_exact, entropy_shift_perturbative, entropy_shift_quartic, purity_vs_r_curve, renyi2_closed_form,
    renyi2_gaussian, thermal_current, thermal_current_from_covariance,
};
use sqbath::linalg::OdeOptions;
use sqbath::matrix::{c64, frobenius, CovarianceState};
use sqbath::perturbation::{
    alpha_beta_coefficients, exact_covariance, first_order_expansion, sigma14_closed_form, sigma23_closed_form,
    PerturbationInput,
};
use sqbath::spectral::{
    eigendecompose_with, ep_fan_scan, find_ep_on_ray, ray_scan, FanOptions, PtPhase, SpectralConfig, SpectralReport,
};
use sqbath::system::{diffusion, drift, ModeSpec, SystemSpec};
use sqbath::ComplexMatrix;

use crate::config::{Command, InitialState, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, ScanResult, Table};

pub const TOOL: &str = "sqbath";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs the configured command and attaches metadata.
pub fn run(cfg: &RunConfig) -> Result<ScanResult, CliError> {
    let start = Instant::now();
    let command = cfg.command();
    let mut result = match command {
        Command::SingleMode => single_mode(cfg),
        Command::TwoMode => two_mode(cfg),
        Command::Evolve => evolve(cfg),
        Command::EpScan => ep_scan(cfg),
        Command::PurityScan => purity_scan(cfg),
        Command::EntropyScan => entropy_scan(cfg),
    }
    .map_err(|e| CliError::compute(command.name(), e))?;
    let mut meta = std::mem::take(&mut result.metadata);
    meta.insert("tool".into(), json!(TOOL));
    meta.insert("version".into(), json!(VERSION));
    meta.insert("command".into(), json!(command.name()));
    meta.insert("config".into(), cfg.echo());
    meta.insert("failures".into(), json!(result.failures));
    meta.insert("duration_s".into(), json!(start.elapsed().as_secs_f64()));
    result.metadata = meta;
    Ok(result)
}

type Res<T> = sqbath::Result<T>;

fn spectral_config(cfg: &RunConfig) -> SpectralConfig {
    SpectralConfig {
        im_tol: cfg.tolerances.im_tol,
        gap_tol: cfg.tolerances.gap_tol,
        cond_threshold: cfg.tolerances.cond_threshold,
    }
}

fn modes(cfg: &RunConfig) -> Res<(ModeSpec, ModeSpec)> {
    Ok((ModeSpec::new(cfg.omega, cfg.gamma)?, ModeSpec::new(cfg.omega2(), cfg.gamma)?))
}

fn system(cfg: &RunConfig) -> Res<SystemSpec> {
    let (m1, m2) = modes(cfg)?;
    let b1 = BathMoments::new(cfg.n1, cfg.m1.0)?;
    if cfg.modes == 1 {
        return Ok(SystemSpec::single(m1, b1));
    }
    SystemSpec::two_mode(m1, m2, cfg.hopping, [b1, BathMoments::new(cfg.n2(), cfg.m2.0)?])
}

fn nan() -> Cell {
    Cell::Num(f64::NAN)
}

fn complex_cells(z: Complex64) -> [Cell; 2] {
    [Cell::Num(z.re), Cell::Num(z.im)]
}

fn complex_columns(name: &str) -> [String; 2] {
    [format!("{name}_re"), format!("{name}_im")]
}

fn eigen_columns(n: usize) -> Vec<String> {
    (1..=n).flat_map(|k| complex_columns(&format!("lambda{k}"))).collect()
}

fn sigma_columns(dim: usize) -> Vec<String> {
    (1..=dim)
        .flat_map(|i| (1..=dim).flat_map(move |j| complex_columns(&format!("s{i}{j}"))))
        .collect()
}

fn sigma_cells(s: Option<&ComplexMatrix>, dim: usize) -> Vec<Cell> {
    match s {
        Some(m) => m.transpose().iter().flat_map(|z| complex_cells(*z)).collect(),
        None => (0..2 * dim * dim).map(|_| nan()).collect(),
    }
}

fn spectral_cells(rep: Option<&SpectralReport>, n: usize) -> Vec<Cell> {
    match rep {
        Some(r) => {
            let mut v: Vec<Cell> = r.eigenvalues.iter().flat_map(|z| complex_cells(*z)).collect();
            v.extend([Cell::Num(r.cond_v), Cell::Num(r.gap()), Cell::text(r.pt_phase)]);
            v
        }
        None => {
            let mut v: Vec<Cell> = (0..2 * n).map(|_| nan()).collect();
            v.extend([nan(), nan(), Cell::text("failed")]);
            v
        }
    }
}

fn status(errors: &[&sqbath::Error]) -> Cell {
    match errors.first() {
        None => Cell::text("ok"),
        Some(e) => Cell::text(e.code()),
    }
}

fn single_mode(cfg: &RunConfig) -> Res<ScanResult> {
    let spec = system(cfg)?;
    let (mode, bath) = (spec.modes()[0], spec.baths()[0]);
    let conv = cfg.diffusion_convention;
    let mut cols: Vec<String> = ["omega", "gamma", "N", "M_re", "M_im", "physical", "occupation_closed"]
        .map(String::from)
        .to_vec();
    cols.extend(complex_columns("anomalous_closed"));
    cols.push("occupation_solver".into());
    cols.extend(complex_columns("anomalous_solver"));
    cols.push("closed_vs_solver".into());
    cols.extend(eigen_columns(2));
    cols.extend(["cond_V", "gap", "pt_phase", "status"].map(String::from));
    let mut table = Table::new(&cols);

    let cf = single_mode_steady_closed_form(&mode, &bath);
    let a = drift(&spec)?;
    let solved = steady_state_lyapunov(&a, &diffusion(&spec, conv));
    let rep = eigendecompose_with(&a, &spectral_config(cfg));
    let mut row = vec![
        Cell::Num(mode.omega()),
        Cell::Num(mode.gamma()),
        Cell::Num(bath.n()),
        Cell::Num(bath.m().re),
        Cell::Num(bath.m().im),
        Cell::flag(bath.is_physical(cfg.tolerances.physical)),
        Cell::Num(cf.occupation(0)),
    ];
    row.extend(complex_cells(cf.anomalous(0)));
    match &solved {
        Ok(s) => {
            row.push(Cell::Num(s.occupation(0)));
            row.extend(complex_cells(s.anomalous(0)));
            row.push(Cell::Num(frobenius(&(s.matrix() - cf.matrix()))));
        }
        Err(_) => row.extend([nan(), nan(), nan(), nan()]),
    }
    row.extend(spectral_cells(rep.as_ref().ok(), 2));
    let errs: Vec<&sqbath::Error> = [solved.as_ref().err(), rep.as_ref().err()].into_iter().flatten().collect();
    let failures = errs.len().min(1);
    row.push(status(&errs));
    table.push(row);
    let mut out = ScanResult::new(table);
    out.failures = failures;
    Ok(out)
}

fn two_mode(cfg: &RunConfig) -> Res<ScanResult> {
    let spec = system(cfg)?;
    let conv = cfg.diffusion_convention;
    let mut cols: Vec<String> = [
        "omega1", "omega2", "gamma", "J", "N1", "N2", "M1_re", "M1_im", "M2_re", "M2_im", "physical", "occupation1",
        "occupation2",
    ]
    .map(String::from)
    .to_vec();
    cols.extend(complex_columns("coherence12"));
    cols.extend(["current_solver", "current_closed", "S2"].map(String::from));
    cols.extend(eigen_columns(4));
    cols.extend(["cond_V", "gap", "pt_phase", "status"].map(String::from));
    cols.extend(sigma_columns(4));
    let mut table = Table::new(&cols);

    let a = drift(&spec)?;
    let solved = steady_state_lyapunov(&a, &diffusion(&spec, conv));
    let rep = eigendecompose_with(&a, &spectral_config(cfg));
    let (b1, b2) = (spec.baths()[0], spec.baths()[1]);
    let mut row: Vec<Cell> = vec![
        spec.modes()[0].omega().into(),
        spec.modes()[1].omega().into(),
        cfg.gamma.into(),
        cfg.hopping.into(),
        b1.n().into(),
        b2.n().into(),
        b1.m().re.into(),
        b1.m().im.into(),
        b2.m().re.into(),
        b2.m().im.into(),
        Cell::flag(spec.is_physical(cfg.tolerances.physical)),
    ];
    let mut errs: Vec<sqbath::Error> = Vec::new();
    let s = match solved {
        Ok(s) => Some(s),
        Err(e) => {
            errs.push(e);
            None
        }
    };
    match &s {
        Some(s) => {
            row.extend([s.occupation(0).into(), s.occupation(1).into()]);
            row.extend(complex_cells(s.coherence(0, 1)));
            row.push(thermal_current_from_covariance(s)?.into());
        }
        None => row.extend((0..5).map(|_| nan())),
    }
    row.push(thermal_current(cfg.hopping, cfg.gamma, b1.n(), b2.n())?.into());
    match s.as_ref().map(renyi2_gaussian) {
        Some(Ok(v)) => row.push(v.into()),
        Some(Err(e)) => {
            errs.push(e);
            row.push(nan())
        }
        None => row.push(nan()),
    }
    let rep = match rep {
        Ok(r) => Some(r),
        Err(e) => {
            errs.push(e);
            None
        }
    };
    row.extend(spectral_cells(rep.as_ref(), 4));
    row.push(status(&errs.iter().collect::<Vec<_>>()));
    row.extend(sigma_cells(s.as_ref().map(|s| s.matrix()), 4));
    table.push(row);
    let mut out = ScanResult::new(table);
    out.failures = errs.len().min(1);
    if b1.m().norm() > 0.0 || b2.m().norm() > 0.0 || spec.modes()[0].omega() != spec.modes()[1].omega() {
        out.metadata.insert(
            "notes".into(),
            json!(["current_closed assumes unsqueezed baths and equal frequencies"]),
        );
    }
    Ok(out)
}

fn evolve(cfg: &RunConfig) -> Res<ScanResult> {
    let spec = system(cfg)?;
    let dim = spec.dim();
    let a = drift(&spec)?;
    let d = diffusion(&spec, cfg.diffusion_convention) * c64(cfg.diffusion_scale, 0.0);
    let sigma0 = match cfg.initial_state {
        InitialState::Vacuum => CovarianceState::vacuum(spec.mode_count()),
        InitialState::Zero => CovarianceState::zeros(spec.mode_count()),
    };
    let times = cfg.t_grid.expect("validated").points();
    let opts = OdeOptions {
        atol: cfg.tolerances.ode_atol,
        rtol: cfg.tolerances.ode_rtol,
        ..OdeOptions::default()
    };
    let (traj, failure) = evolve_covariance_partial(&a, &d, &sigma0, &times, opts)?;

    let mut cols: Vec<String> = vec!["t".into()];
    cols.extend((1..=spec.mode_count()).map(|k| format!("occupation{k}")));
    cols.push("hermitization_correction".into());
    cols.push("status".into());
    cols.extend(sigma_columns(dim));
    let mut table = Table::new(&cols);
    for ((t, s), corr) in traj.iter().zip(traj.hermitization_corrections()) {
        let mut row: Vec<Cell> = vec![t.into()];
        row.extend((0..spec.mode_count()).map(|k| Cell::Num(s.occupation(k))));
        row.extend([Cell::Num(*corr), Cell::text("ok")]);
        row.extend(sigma_cells(Some(s.matrix()), dim));
        table.push(row);
    }
    let done = traj.len();
    for &t in &times[done..] {
        let mut row: Vec<Cell> = vec![t.into()];
        row.extend((0..spec.mode_count()).map(|_| nan()));
        row.extend([nan(), Cell::text(failure.as_ref().map_or("failed", |e| e.code()))]);
        row.extend(sigma_cells(None, dim));
        table.push(row);
    }
    let mut out = ScanResult::new(table);
    out.failures = times.len() - done;
    if let Some(e) = failure {
        out.metadata.insert("error".into(), json!(e.to_string()));
    }
    Ok(out)
}

fn ep_scan(cfg: &RunConfig) -> Res<ScanResult> {
    if cfg.m1_grid.is_some() {
        fan_scan(cfg)
    } else {
        ray(cfg)
    }
}

fn contour_table() -> Table {
    Table::new(&["gamma", "M1", "M2", "gap", "cond_V"])
}

fn ray(cfg: &RunConfig) -> Res<ScanResult> {
    let spec = system(cfg)?;
    let ray = cfg.ray.expect("validated");
    let scfg = spectral_config(cfg);
    let (c, s) = (ray.angle.cos(), ray.angle.sin());
    let two = spec.mode_count() == 2;
    let point = |x: f64| -> (f64, f64) { (x * c, x * s) };
    let build = |x: f64| -> Res<ComplexMatrix> {
        let (p, q) = point(x);
        if two {
            drift(&spec.with_anomalous(&[c64(p, 0.0), c64(q, 0.0)]))
        } else {
            drift(&spec.with_anomalous(&[c64(p, q)]))
        }
    };
    let grid: Vec<f64> = crate::config::Grid {
        min: ray.lo,
        max: ray.hi,
        count: ray.count,
    }
    .points();
    let n = spec.dim();
    let mut cols: Vec<String> = ["s", "M1", "M2"].map(String::from).to_vec();
    cols.extend(eigen_columns(n));
    cols.extend(["cond_V", "gap", "pt_phase", "status"].map(String::from));
    let mut table = Table::new(&cols);
    let mut failures = 0;
    for p in ray_scan(build, &grid, &scfg) {
        let (m1, m2) = point(p.s);
        let mut row: Vec<Cell> = vec![p.s.into(), m1.into(), m2.into()];
        match &p.error {
            None => {
                row.extend(p.branches.iter().flat_map(|z| complex_cells(*z)));
                row.extend([
                    Cell::Num(p.cond_v),
                    Cell::Num(p.gap),
                    Cell::text(p.pt_phase.expect("phase")),
                    Cell::text("ok"),
                ]);
            }
            Some(e) => {
                failures += 1;
                row.extend((0..2 * n + 2).map(|_| nan()));
                row.extend([Cell::text("failed"), Cell::text(e.code())]);
            }
        }
        table.push(row);
    }

    let mut contours = contour_table();
    let mut meta = serde_json::Map::new();
    match find_ep_on_ray(build, ray.lo, ray.hi, cfg.tolerances.bisection, ray.predicate, &scfg) {
        Ok(ep) => {
            let (m1, m2) = point(ep.s);
            contours.push(vec![cfg.gamma.into(), m1.into(), m2.into(), ep.gap.into(), ep.cond_v.into()]);
            meta.insert(
                "ep".into(),
                json!({ "s": ep.s, "bracket_width": ep.width, "within_gap_tol": ep.within_gap_tolerance(&scfg) }),
            );
        }
        Err(sqbath::Error::NoBracket { .. }) => {
            meta.insert("ep".into(), json!("no phase change between ray.lo and ray.hi"));
        }
        Err(e) => {
            failures += 1;
            let mid = point(0.5 * (ray.lo + ray.hi));
            contours.push(vec![cfg.gamma.into(), mid.0.into(), mid.1.into(), nan(), nan()]);
            meta.insert("ep".into(), json!({ "error": e.code(), "message": e.to_string() }));
        }
    }
    let mut out = ScanResult::new(table);
    out.sections.push(("contours".into(), contours));
    out.failures = failures;
    out.metadata = meta;
    Ok(out)
}

fn fan_scan(cfg: &RunConfig) -> Res<ScanResult> {
    let base = system(cfg)?;
    let m1 = cfg.m1_grid.expect("validated").points();
    let m2 = cfg.m2_grid.expect("validated").points();
    let opts = FanOptions {
        spectral: spectral_config(cfg),
        bisection_tol: cfg.tolerances.bisection,
        physical_tol: cfg.tolerances.physical,
    };
    let scan = ep_fan_scan(&base, &m1, &m2, &cfg.gammas(), &opts)?;

    let mut cols: Vec<String> = ["gamma", "M1", "M2"].map(String::from).to_vec();
    cols.extend(eigen_columns(4));
    cols.extend(["cond_V", "gap", "pt_phase", "physical", "status"].map(String::from));
    let mut table = Table::new(&cols);
    for p in &scan.points {
        let mut row: Vec<Cell> = vec![p.gamma.into(), p.m1.into(), p.m2.into()];
        row.extend(spectral_cells(p.report.as_ref(), 4));
        row.push(Cell::flag(p.physical));
        row.push(Cell::text(if p.report.is_some() { "ok" } else { "failed" }));
        table.push(row);
    }
    let mut contours = contour_table();
    for c in &scan.contours {
        contours.push(vec![c.gamma.into(), c.m1.into(), c.m2.into(), c.gap.into(), c.cond_v.into()]);
    }
    let mut claims = Table::new(&[
        "gamma",
        "same_sign_points",
        "same_sign_broken",
        "same_sign_broken_fraction",
        "opposite_sign_points",
        "opposite_sign_unbroken",
        "opposite_sign_contour_points",
        "opposite_sign_angle_span",
        "origin_phase",
    ]);
    let mut findings: Vec<Value> = Vec::new();
    for c in &scan.claims {
        claims.push(vec![
            c.gamma.into(),
            Cell::Int(c.same_sign_points as i64),
            Cell::Int(c.same_sign_broken as i64),
            c.same_sign_broken_fraction().into(),
            Cell::Int(c.opposite_sign_points as i64),
            Cell::Int(c.opposite_sign_unbroken as i64),
            Cell::Int(c.opposite_sign_contour_points as i64),
            c.opposite_sign_angle_span.into(),
            Cell::text(c.origin_phase.map_or("absent".to_string(), |p| p.to_string())),
        ]);
        if c.same_sign_points > 0 && c.same_sign_broken < c.same_sign_points {
            findings.push(json!({
                "gamma": c.gamma,
                "finding": "same-sign quadrants not fully broken",
                "broken_fraction": c.same_sign_broken_fraction(),
            }));
        }
        if c.opposite_sign_contour_points == 0 {
            findings.push(json!({ "gamma": c.gamma, "finding": "no phase boundary in opposite-sign quadrants" }));
        }
        if c.origin_phase == Some(PtPhase::Degenerate) {
            findings.push(json!({ "gamma": c.gamma, "finding": "origin is numerically defective" }));
        }
    }
    let mut out = ScanResult::new(table);
    out.sections.push(("contours".into(), contours));
    out.sections.push(("claims".into(), claims));
    out.failures = scan.failures();
    out.metadata.insert("findings".into(), Value::Array(findings));
    Ok(out)
}

fn purity_scan(cfg: &RunConfig) -> Res<ScanResult> {
    let rs = cfg.r_grid.expect("validated").points();
    let mut table = Table::new(&[
        "gamma",
        "R",
        "det_V",
        "S2",
        "purity",
        "det_V_closed_form",
        "purity_closed_form",
        "status",
    ]);
    let mut failures = 0;
    for g in cfg.gammas() {
        let mode = ModeSpec::new(cfg.omega, g)?;
        for p in purity_vs_r_curve(&mode, cfg.n1, &rs)? {
            let mut row: Vec<Cell> = vec![g.into(), p.r.into()];
            match &p.report {
                Ok(r) => {
                    let cf = renyi2_closed_form(&mode, cfg.n1, p.r);
                    row.extend([r.det_sigma.into(), r.s2.into(), r.purity.into()]);
                    match cf {
                        Ok(c) => row.extend([c.det_sigma.into(), c.purity.into()]),
                        Err(_) => row.extend([nan(), nan()]),
                    }
                    row.push(Cell::text("ok"));
                }
                Err(e) => {
                    failures += 1;
                    row.extend((0..5).map(|_| nan()));
                    row.push(Cell::text(e.code()));
                }
            }
            table.push(row);
        }
    }
    let mut out = ScanResult::new(table);
    out.failures = failures;
    out.metadata
        .insert("r_bound".into(), json!((cfg.n1 * (cfg.n1 + 1.0)).sqrt()));
    Ok(out)
}

fn entropy_scan(cfg: &RunConfig) -> Res<ScanResult> {
    let mode = ModeSpec::new(cfg.omega, cfg.gamma)?;
    let (n1, n2) = (cfg.n1, cfg.n2());
    let (n, dn) = ((n1 + n2) / 2.0, n1 - n2);
    let ms = cfg.m_grid.expect("validated").points();
    let dms = cfg.dm_grid.expect("validated").points();
    let conv = cfg.diffusion_convention;
    let j = cfg.hopping;

    let mut cols: Vec<String> = ["n", "dn", "m", "dm", "M1", "M2", "dS2_exact", "dS2_perturbative"]
        .map(String::from)
        .to_vec();
    cols.extend(complex_columns("first_order_trace"));
    cols.extend(["dS2_quartic", "alpha", "beta"].map(String::from));
    for name in ["sigma14_solver", "sigma14_closed", "sigma23_solver", "sigma23_closed"] {
        cols.extend(complex_columns(name));
    }
    cols.extend(["weak_squeezing_violated", "status"].map(String::from));

    let points: Vec<(f64, f64)> = ms.iter().flat_map(|&m| dms.iter().map(move |&dm| (m, dm))).collect();
    let rows: Vec<(Vec<Cell>, bool)> = points
        .par_iter()
        .map(|&(m, dm)| {
            let width = cols.len();
            let row = (|| -> Res<Vec<Cell>> {
                let p = PerturbationInput::new(n, dn, m, dm, 1.0)?;
                let fo = first_order_expansion(mode, j, &p, conv)?;
                let exact = exact_covariance(mode, j, &p, conv)?;
                let shift = entropy_shift_perturbative(&fo.sigma0, &fo.sigma1)?;
                let s1 = fo.sigma1.matrix();
                let (alpha, beta) = alpha_beta_coefficients(n, m, mode.gamma(), j, mode.omega())?;
                let mut row: Vec<Cell> = vec![
                    n.into(),
                    dn.into(),
                    m.into(),
                    dm.into(),
                    p.m1().into(),
                    p.m2().into(),
                    entropy_shift_exact(&fo.sigma0, &exact)?.into(),
                    shift.value.into(),
                ];
                row.extend(complex_cells(shift.first_order_trace));
                row.extend([entropy_shift_quartic(s1[(0, 3)]).into(), alpha.into(), beta.into()]);
                row.extend(complex_cells(s1[(0, 3)]));
                row.extend(complex_cells(sigma14_closed_form(&p, j, mode.gamma(), mode.omega())?));
                row.extend(complex_cells(s1[(1, 2)]));
                row.extend(complex_cells(sigma23_closed_form(&p, j, mode.gamma(), mode.omega())?));
                row.extend([Cell::flag(fo.weak_squeezing_violated), Cell::text("ok")]);
                Ok(row)
            })();
            match row {
                Ok(r) => (r, false),
                Err(e) => {
                    let mut r: Vec<Cell> = vec![n.into(), dn.into(), m.into(), dm.into()];
                    r.extend((4..width - 2).map(|_| nan()));
                    r.extend([Cell::Int(0), Cell::text(e.code())]);
                    (r, true)
                }
            }
        })
        .collect();
    let mut table = Table::new(&cols);
    let mut failures = 0;
    for (row, failed) in rows {
        failures += failed as usize;
        table.push(row);
    }
    let mut out = ScanResult::new(table);
    out.failures = failures;
    Ok(out)
}
