// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: JSON document, dotted `key=value` overrides, validation.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sqbath::spectral::EpPredicate;
use sqbath::system::DiffusionConvention;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SingleMode,
    TwoMode,
    Evolve,
    EpScan,
    PurityScan,
    EntropyScan,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Self::SingleMode,
        Self::TwoMode,
        Self::Evolve,
        Self::EpScan,
        Self::PurityScan,
        Self::EntropyScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::SingleMode => "single-mode",
            Self::TwoMode => "two-mode",
            Self::Evolve => "evolve",
            Self::EpScan => "ep-scan",
            Self::PurityScan => "purity-scan",
            Self::EntropyScan => "entropy-scan",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

/// A real number or an `[re, im]` pair on input; always `[re, im]` on output.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexValue(pub Complex64);

impl Serialize for ComplexValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
        }
        match Raw::deserialize(d).map_err(|_| serde::de::Error::custom("expected a number or [re, im]"))? {
            Raw::Real(x) => Ok(Self(Complex64::new(x, 0.0))),
            Raw::Pair([re, im]) => Ok(Self(Complex64::new(re, im))),
        }
    }
}

/// `count` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn single(x: f64) -> Self {
        Self { min: x, max: x, count: 1 }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.max } else { self.min + step * k as f64 })
            .collect()
    }

    fn validate(&self, key: &str) -> Result<(), CliError> {
        if self.count < 1 {
            return Err(CliError::config(format!("{key}.count"), "count >= 1"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(CliError::config(key, "min and max finite"));
        }
        if self.min > self.max {
            return Err(CliError::config(key, "min <= max"));
        }
        if self.count == 1 && self.min != self.max {
            return Err(CliError::config(format!("{key}.count"), "count >= 2 when min < max"));
        }
        Ok(())
    }
}

/// Parameter ray for `ep-scan`. Single mode: `M = s·e^{iθ}`. Two modes:
/// `(M1, M2) = s·(cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Ray {
    pub lo: f64,
    pub hi: f64,
    /// Samples in the dense scan written as rows.
    pub count: usize,
    pub angle: f64,
    pub predicate: EpPredicate,
}

impl Default for Ray {
    fn default() -> Self {
        Self {
            lo: 0.0,
            hi: 1.0,
            count: 101,
            angle: 0.0,
            predicate: EpPredicate::ImaginaryCrossing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    #[default]
    Vacuum,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub im_tol: f64,
    pub gap_tol: f64,
    pub cond_threshold: f64,
    pub bisection: f64,
    pub ode_atol: f64,
    pub ode_rtol: f64,
    /// Slack on `|M|² <= N(N+1)`.
    pub physical: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            im_tol: 1e-9,
            gap_tol: 1e-6,
            cond_threshold: 1e8,
            bisection: 1e-10,
            ode_atol: 1e-10,
            ode_rtol: 1e-10,
            physical: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub path: Option<String>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub modes: usize,
    pub omega: f64,
    /// Second-mode frequency; defaults to `omega`.
    pub omega2: Option<f64>,
    pub gamma: f64,
    /// Damping rates for ep-scan and purity-scan; defaults to `[gamma]`.
    pub gammas: Option<Vec<f64>>,
    #[serde(rename = "J")]
    pub hopping: f64,
    #[serde(rename = "N", alias = "N1")]
    pub n1: f64,
    #[serde(rename = "N2")]
    pub n2: Option<f64>,
    #[serde(rename = "M", alias = "M1")]
    pub m1: ComplexValue,
    #[serde(rename = "M2")]
    pub m2: ComplexValue,
    pub m1_grid: Option<Grid>,
    pub m2_grid: Option<Grid>,
    #[serde(rename = "R")]
    pub r_grid: Option<Grid>,
    #[serde(rename = "m")]
    pub m_grid: Option<Grid>,
    #[serde(rename = "dm")]
    pub dm_grid: Option<Grid>,
    #[serde(rename = "t")]
    pub t_grid: Option<Grid>,
    pub ray: Option<Ray>,
    pub initial_state: InitialState,
    /// Multiplies the diffusion matrix in `evolve`.
    pub diffusion_scale: f64,
    pub tolerances: Tolerances,
    pub diffusion_convention: DiffusionConvention,
    pub output: OutputSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            modes: 1,
            omega: 1.0,
            omega2: None,
            gamma: 0.5,
            gammas: None,
            hopping: 0.0,
            n1: 0.0,
            n2: None,
            m1: ComplexValue::default(),
            m2: ComplexValue::default(),
            m1_grid: None,
            m2_grid: None,
            r_grid: None,
            m_grid: None,
            dm_grid: None,
            t_grid: None,
            ray: None,
            initial_state: InitialState::Vacuum,
            diffusion_scale: 1.0,
            tolerances: Tolerances::default(),
            diffusion_convention: DiffusionConvention::ConsistencyCorrected,
            output: OutputSpec::default(),
        }
    }
}

fn positive(key: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(key, format!("{key} > 0")))
    }
}

fn non_negative(key: &str, x: f64) -> Result<(), CliError> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(key, format!("{key} >= 0")))
    }
}

impl RunConfig {
    pub fn command(&self) -> Command {
        self.command.expect("validated config has a command")
    }

    pub fn omega2(&self) -> f64 {
        self.omega2.unwrap_or(self.omega)
    }

    pub fn n2(&self) -> f64 {
        self.n2.unwrap_or(self.n1)
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.gammas.clone().unwrap_or_else(|| vec![self.gamma])
    }

    /// Fills command-dependent defaults and checks every range constraint.
    pub fn validate(mut self) -> Result<Self, CliError> {
        let command = self
            .command
            .ok_or_else(|| CliError::config("command", "a command is required"))?;
        if !(self.modes == 1 || self.modes == 2) {
            return Err(CliError::config("modes", "modes is 1 or 2"));
        }
        positive("omega", self.omega)?;
        if let Some(w) = self.omega2 {
            positive("omega2", w)?;
        }
        positive("gamma", self.gamma)?;
        if let Some(gs) = &self.gammas {
            if gs.is_empty() {
                return Err(CliError::config("gammas", "at least one gamma"));
            }
            for &g in gs {
                positive("gammas", g)?;
            }
        }
        if !self.hopping.is_finite() {
            return Err(CliError::config("J", "J finite"));
        }
        non_negative("N", self.n1)?;
        if let Some(n) = self.n2 {
            non_negative("N2", n)?;
        }
        for (key, m) in [("M", self.m1.0), ("M2", self.m2.0)] {
            if !(m.re.is_finite() && m.im.is_finite()) {
                return Err(CliError::config(key, format!("{key} finite")));
            }
        }
        for (key, grid) in [
            ("m1_grid", &self.m1_grid),
            ("m2_grid", &self.m2_grid),
            ("R", &self.r_grid),
            ("m", &self.m_grid),
            ("dm", &self.dm_grid),
            ("t", &self.t_grid),
        ] {
            if let Some(g) = grid {
                g.validate(key)?;
            }
        }
        if let Some(t) = &self.t_grid {
            non_negative("t.min", t.min)?;
        }
        if let Some(ray) = &self.ray {
            if !ray.lo.is_finite() || !ray.hi.is_finite() || ray.lo >= ray.hi {
                return Err(CliError::config("ray", "ray.lo < ray.hi"));
            }
            if ray.count < 2 {
                return Err(CliError::config("ray.count", "ray.count >= 2"));
            }
            if !ray.angle.is_finite() {
                return Err(CliError::config("ray.angle", "ray.angle finite"));
            }
        }
        non_negative("diffusion_scale", self.diffusion_scale)?;
        let t = &self.tolerances;
        for (key, x) in [
            ("tolerances.im_tol", t.im_tol),
            ("tolerances.gap_tol", t.gap_tol),
            ("tolerances.cond_threshold", t.cond_threshold),
            ("tolerances.bisection", t.bisection),
            ("tolerances.ode_atol", t.ode_atol),
            ("tolerances.ode_rtol", t.ode_rtol),
            ("tolerances.physical", t.physical),
        ] {
            positive(key, x)?;
        }

        match command {
            Command::Evolve => {
                if self.t_grid.is_none() {
                    self.t_grid = Some(Grid { min: 0.0, max: 10.0, count: 11 });
                }
            }
            Command::EpScan => match (self.m1_grid.is_some(), self.m2_grid.is_some()) {
                (true, true) if self.modes == 2 => {}
                (false, false) => {
                    if self.ray.is_none() {
                        return Err(CliError::config("ray", "ep-scan needs `ray` or both `m1_grid` and `m2_grid`"));
                    }
                }
                (true, true) => return Err(CliError::config("modes", "an (M1, M2) fan scan needs modes = 2")),
                _ => return Err(CliError::config("m1_grid", "m1_grid and m2_grid must be given together")),
            },
            Command::PurityScan => {
                let r = self.r_grid.ok_or_else(|| CliError::config("R", "purity-scan needs an R grid"))?;
                if r.min < 0.0 {
                    return Err(CliError::config("R.min", "R >= 0"));
                }
                // R beyond sqrt(N(N+1)) is reported per row, not rejected here
            }
            Command::EntropyScan => {
                if self.m_grid.is_none() {
                    return Err(CliError::config("m", "entropy-scan needs an m grid"));
                }
                if self.dm_grid.is_none() {
                    self.dm_grid = Some(Grid::single(0.0));
                }
            }
            Command::TwoMode => {
                if self.modes != 2 {
                    self.modes = 2;
                }
            }
            Command::SingleMode => {
                if self.modes != 1 {
                    return Err(CliError::config("modes", "single-mode needs modes = 1"));
                }
            }
        }
        if command == Command::EntropyScan && self.omega2.is_some_and(|w| w != self.omega) {
            return Err(CliError::config("omega2", "entropy-scan needs omega2 = omega"));
        }
        Ok(self)
    }

    /// Fully resolved configuration as JSON, for echoing into outputs.
    pub fn echo(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Parses a JSON document, applies `key=value` overrides and validates.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig, CliError> {
    let mut doc: Value = if text.trim().is_empty() {
        Value::Object(Default::default())
    } else {
        serde_json::from_str(text).map_err(|e| CliError::config("<document>", format!("valid JSON ({e})")))?
    };
    if !doc.is_object() {
        return Err(CliError::config("<document>", "a JSON object"));
    }
    for (key, raw) in overrides {
        set_dotted(&mut doc, key, parse_override_value(raw))?;
    }
    let de = doc;
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        let key = match path.as_str() {
            "." | "" => unknown_key(&inner).unwrap_or_else(|| "<document>".into()),
            p => p.to_string(),
        };
        CliError::config(key, inner)
    })?;
    cfg.validate()
}

fn unknown_key(msg: &str) -> Option<String> {
    let rest = msg.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

/// JSON literal if it parses, else a bare string.
fn parse_override_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

fn set_dotted(doc: &mut Value, key: &str, value: Value) -> Result<(), CliError> {
    let mut cur = doc;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(key, "override keys are dotted names"));
    }
    for part in &parts[..parts.len() - 1] {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| CliError::config(key, "override path through a non-object"))?;
        cur = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
        if cur.is_null() {
            *cur = Value::Object(Default::default());
        }
    }
    cur.as_object_mut()
        .ok_or_else(|| CliError::config(key, "override path through a non-object"))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
