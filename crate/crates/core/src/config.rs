//! Line-oriented run configuration.
//!
//! ```text
//! # strong-coupling displacement spectrum
//! kappa=24.3
//! delta_c=28700
//! omega_sw=140
//! sweep=omega
//! range=0,8,4001
//! outputs=spectrum
//! ```
//!
//! One `key=value` per line, `#` starts a comment, lists are comma
//! separated. Unset physical parameters take the values of
//! [`PhysicalParams::default`], except that `gamma` defaults to `0.001·kappa`.
//! For `sweep=omega` the range is given in units of the Bogoliubov frequency
//! ω_m, so `range=0,2,4001` spans the default spectrum window.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::error::Error as ModelError;
use crate::model::PhysicalParams;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ConfigError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        ConfigError::Parse {
            line,
            message: message.into(),
        }
    }

    fn validation(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    DeltaC,
    OmegaSw,
    Temperature,
    /// Spectrum frequency, in units of ω_m.
    Omega,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::DeltaC => "delta_c",
            SweepVariable::OmegaSw => "omega_sw",
            SweepVariable::Temperature => "temperature",
            SweepVariable::Omega => "omega",
        }
    }
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "delta_c" => Ok(SweepVariable::DeltaC),
            "omega_sw" => Ok(SweepVariable::OmegaSw),
            "temperature" => Ok(SweepVariable::Temperature),
            "omega" => Ok(SweepVariable::Omega),
            other => Err(format!("unknown sweep variable `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepRange {
    pub fn values(&self) -> Vec<f64> {
        crate::spectrum::uniform_grid(self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub range: SweepRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Steady,
    Resonance,
    Fluctuations,
    Entanglement,
    Spectrum,
}

impl Output {
    pub fn name(self) -> &'static str {
        match self {
            Output::Steady => "steady",
            Output::Resonance => "resonance",
            Output::Fluctuations => "fluctuations",
            Output::Entanglement => "entanglement",
            Output::Spectrum => "spectrum",
        }
    }
}

impl FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "steady" => Ok(Output::Steady),
            "resonance" => Ok(Output::Resonance),
            "fluctuations" => Ok(Output::Fluctuations),
            "entanglement" => Ok(Output::Entanglement),
            "spectrum" => Ok(Output::Spectrum),
            other => Err(format!("unknown output `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub sweep: Option<Sweep>,
    pub outputs: BTreeSet<Output>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: PhysicalParams::default(),
            sweep: None,
            outputs: BTreeSet::from([Output::Steady]),
            output_path: None,
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate().map_err(|e| match e {
            ModelError::InvalidParameter { field, reason } => {
                ConfigError::validation(field, reason)
            }
            other => ConfigError::validation("params", other.to_string()),
        })?;
        if self.outputs.is_empty() {
            return Err(ConfigError::validation(
                "outputs",
                "at least one output is required",
            ));
        }
        let spectrum = self.outputs.contains(&Output::Spectrum);
        if let Some(Sweep { variable, range }) = self.sweep {
            if range.count < 2 {
                return Err(ConfigError::validation(
                    "range",
                    "sweep needs at least 2 points",
                ));
            }
            if !(range.start.is_finite() && range.stop.is_finite()) {
                return Err(ConfigError::validation("range", "bounds must be finite"));
            }
            if range.stop < range.start {
                return Err(ConfigError::validation(
                    "range",
                    "stop must not be below start",
                ));
            }
            match variable {
                SweepVariable::Omega if !spectrum => {
                    return Err(ConfigError::validation(
                        "sweep",
                        "an omega sweep requires the spectrum output",
                    ))
                }
                SweepVariable::Temperature if range.start < 0.0 => {
                    return Err(ConfigError::validation(
                        "range",
                        "temperatures must be non-negative",
                    ))
                }
                SweepVariable::OmegaSw if range.start < 0.0 => {
                    return Err(ConfigError::validation(
                        "range",
                        "omega_sw must be non-negative",
                    ))
                }
                SweepVariable::Omega => {}
                _ if spectrum => {
                    return Err(ConfigError::validation(
                        "outputs",
                        "the spectrum output is only available with sweep=omega or no sweep",
                    ))
                }
                _ => {}
            }
        }
        if let Some(path) = &self.output_path {
            let text = path.to_string_lossy();
            if text.is_empty() || text.contains(['#', '\n', '\r']) || text.trim() != text {
                return Err(ConfigError::validation(
                    "output",
                    "path must be non-empty, without `#`, line breaks or surrounding whitespace",
                ));
            }
        }
        Ok(())
    }

    /// Renders the configuration so that [`parse_config`] reproduces it exactly.
    pub fn serialize(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let mut line = |key: &str, value: String| {
            let _ = writeln!(out, "{key}={value}");
        };
        line("n_atoms", num(p.n_atoms));
        line("u0", num(p.u0));
        line("kappa", num(p.kappa));
        line("gamma", num(p.gamma));
        line("eta", num(p.eta));
        line("delta_c", num(p.delta_c));
        line("omega_sw", num(p.omega_sw));
        line("temperature", num(p.temperature));
        line("omega_r_hz", num(p.omega_r_hz));
        line("n_periods", p.n_periods.to_string());
        line("n_ph_thermal", num(p.n_ph_thermal));
        if let Some(sweep) = &self.sweep {
            line("sweep", sweep.variable.name().to_string());
            line(
                "range",
                format!(
                    "{},{},{}",
                    num(sweep.range.start),
                    num(sweep.range.stop),
                    sweep.range.count
                ),
            );
        }
        let outputs: Vec<&str> = self.outputs.iter().map(|o| o.name()).collect();
        line("outputs", outputs.join(","));
        if let Some(path) = &self.output_path {
            line("output", path.to_string_lossy().into_owned());
        }
        line("format", self.format.to_string());
        out
    }
}

/// Shortest representation that parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    let mut gamma_set = false;
    let mut sweep_variable: Option<(usize, SweepVariable)> = None;
    let mut range: Option<(usize, SweepRange)> = None;
    let mut seen = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            ConfigError::parse(line_no, format!("expected key=value, got `{content}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::parse(
                line_no,
                format!("missing value for `{key}`"),
            ));
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::parse(
                line_no,
                format!("duplicate key `{key}`"),
            ));
        }
        let float = || -> Result<f64, ConfigError> {
            value.parse::<f64>().map_err(|_| {
                ConfigError::parse(line_no, format!("`{key}`: `{value}` is not a number"))
            })
        };
        let p = &mut config.params;
        match key {
            "n_atoms" => p.n_atoms = float()?,
            "u0" => p.u0 = float()?,
            "kappa" => p.kappa = float()?,
            "gamma" => {
                p.gamma = float()?;
                gamma_set = true;
            }
            "eta" => p.eta = float()?,
            "delta_c" => p.delta_c = float()?,
            "omega_sw" => p.omega_sw = float()?,
            "temperature" => p.temperature = float()?,
            "omega_r_hz" => p.omega_r_hz = float()?,
            "n_ph_thermal" => p.n_ph_thermal = float()?,
            "n_periods" => {
                p.n_periods = value.parse().map_err(|_| {
                    ConfigError::parse(
                        line_no,
                        format!("`n_periods`: `{value}` is not a non-negative integer"),
                    )
                })?
            }
            "sweep" => {
                let variable = value.parse().map_err(|e| ConfigError::parse(line_no, e))?;
                sweep_variable = Some((line_no, variable));
            }
            "range" => range = Some((line_no, parse_range(line_no, value)?)),
            "outputs" => {
                let mut outputs = BTreeSet::new();
                for item in value.split(',').map(str::trim) {
                    outputs.insert(item.parse().map_err(|e| ConfigError::parse(line_no, e))?);
                }
                config.outputs = outputs;
            }
            "output" => config.output_path = Some(PathBuf::from(value)),
            "format" => {
                config.format = value.parse().map_err(|e| ConfigError::parse(line_no, e))?
            }
            other => {
                return Err(ConfigError::parse(
                    line_no,
                    format!("unknown key `{other}`"),
                ))
            }
        }
    }

    if !gamma_set {
        config.params.gamma = 1e-3 * config.params.kappa;
    }
    config.sweep = match (sweep_variable, range) {
        (Some((_, variable)), Some((_, range))) => Some(Sweep { variable, range }),
        (None, None) => None,
        (Some(_), None) => {
            return Err(ConfigError::validation(
                "range",
                "sweep is set but range is missing",
            ))
        }
        (None, Some(_)) => {
            return Err(ConfigError::validation(
                "sweep",
                "range is set but sweep is missing",
            ))
        }
    };
    config.validate()?;
    Ok(config)
}

fn parse_range(line: usize, value: &str) -> Result<SweepRange, ConfigError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(ConfigError::parse(line, "range must be start,stop,count"));
    };
    let number = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| ConfigError::parse(line, format!("range bound `{s}` is not a number")))
    };
    Ok(SweepRange {
        start: number(start)?,
        stop: number(stop)?,
        count: count.parse().map_err(|_| {
            ConfigError::parse(line, format!("range count `{count}` is not an integer"))
        })?,
    })
}
