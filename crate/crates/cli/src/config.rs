//! Run configuration.
//!
//! Config files are flat `key = value` lines grouped under `[model]`,
//! `[initial]`, `[integrator]` and `[output]`. `#` starts a comment. Vector
//! values (`q`, `p`) are comma separated. Example:
//!
//! ```text
//! [model]
//! kind = DampedHO_Linear
//! omega = 1.0
//! gamma = 0.1
//!
//! [initial]
//! q = 1.0
//! p = 0.0
//! z = 1.0
//! lambda = 1.0
//!
//! [integrator]
//! h = 0.01
//! t_end = 50
//! scheme = HybridLeapfrog
//!
//! [output]
//! csv = damped.csv
//! svg = damped.svg
//! ```

use std::path::{Path, PathBuf};

use contact_core::models::{default_experiment, ModelKind, ModelSpec};
use contact_core::{ContactState, IntegratorConfig, Scheme};

use crate::error::CliError;

/// Environment variable overriding the output directory.
pub const OUT_DIR_ENV: &str = "CONTACT_OUT_DIR";

/// Scalar parameters accepted by [`RunConfig::set_param`].
pub const PARAM_NAMES: [&str; 12] = [
    "omega", "gamma", "a", "omega1_sq", "omega2_sq", "g", "h", "t_end", "q0", "p0", "z0", "lambda0",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl OutputConfig {
    fn resolve(&self, file: &Path) -> PathBuf {
        match &self.dir {
            Some(dir) if file.is_relative() => dir.join(file),
            _ => file.to_path_buf(),
        }
    }

    pub fn csv_path(&self, default_name: &str) -> PathBuf {
        self.resolve(self.csv.as_deref().unwrap_or(Path::new(default_name)))
    }

    pub fn svg_path(&self) -> Option<PathBuf> {
        self.svg.as_deref().map(|p| self.resolve(p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub initial: ContactState,
    pub integ: IntegratorConfig,
    pub outputs: OutputConfig,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| bad(format!("`{key}`: cannot parse `{value}` as a number")))?;
    if !v.is_finite() {
        return Err(bad(format!("`{key}`: value must be finite")));
    }
    Ok(v)
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value.split(',').map(|v| parse_f64(key, v)).collect()
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| bad(format!("`{key}`: cannot parse `{value}` as a non-negative integer")))
}

impl RunConfig {
    /// Default experiment for `kind` (the first variant where there are two).
    pub fn preset(kind: ModelKind) -> Self {
        let exp = default_experiment(kind);
        Self {
            model: exp.spec,
            initial: exp.initial,
            integ: exp.config,
            outputs: OutputConfig::default(),
        }
    }

    pub fn t_end(&self) -> f64 {
        self.integ.h * self.integ.n_steps as f64
    }

    /// Sets one scalar parameter by name. Changing `h` keeps the horizon.
    pub fn set_param(&mut self, key: &str, value: f64) -> Result<(), CliError> {
        match key {
            "omega" | "gamma" | "a" | "omega1_sq" | "omega2_sq" | "g" => {
                self.model.set(key, value)?;
            }
            "h" => {
                if !(value > 0.0) {
                    return Err(bad(format!("`h` must be positive, got {value}")));
                }
                let t_end = self.t_end();
                self.integ.h = value;
                self.set_t_end(t_end)?;
            }
            "t_end" => self.set_t_end(value)?,
            "q0" => self.initial.q[0] = value,
            "p0" => self.initial.p[0] = value,
            "z0" => self.initial.z = value,
            "lambda0" => self.initial.lambda = value,
            _ => return Err(bad(format!("unknown parameter `{key}`"))),
        }
        Ok(())
    }

    fn set_t_end(&mut self, t_end: f64) -> Result<(), CliError> {
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(bad(format!("`t_end` must be >= 0, got {t_end}")));
        }
        self.integ.n_steps = (t_end / self.integ.h).round() as usize;
        self.clamp_record_every();
        Ok(())
    }

    fn clamp_record_every(&mut self) {
        if self.integ.n_steps > 0 {
            self.integ.record_every = self.integ.record_every.min(self.integ.n_steps);
        }
    }

    /// Applies a config file on top of `self`. A `kind` key in `[model]`
    /// first resets everything to that kind's preset.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        let mut section = String::new();
        let mut t_end = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| bad(format!("line {}: {msg}", lineno + 1));
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                if !matches!(section.as_str(), "model" | "initial" | "integrator" | "output") {
                    return Err(at(format!("unknown section `[{section}]`")));
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let value = value.trim_matches('"');
            match (section.as_str(), key) {
                ("model", "kind") => {
                    let kind: ModelKind = value.parse().map_err(|e| at(format!("{e}")))?;
                    let outputs = std::mem::take(&mut self.outputs);
                    *self = RunConfig::preset(kind);
                    self.outputs = outputs;
                }
                ("model", k) => {
                    let v = parse_f64(k, value).map_err(|e| at(e.to_string()))?;
                    self.model.set(k, v).map_err(|e| at(e.to_string()))?;
                }
                ("initial", "q") => self.initial.q = parse_list(key, value)?,
                ("initial", "p") => self.initial.p = parse_list(key, value)?,
                ("initial", "z") => self.initial.z = parse_f64(key, value)?,
                ("initial", "lambda") => self.initial.lambda = parse_f64(key, value)?,
                ("initial", "t") => self.initial.t = parse_f64(key, value)?,
                ("integrator", "h") => self.integ.h = parse_f64(key, value)?,
                ("integrator", "steps") => self.integ.n_steps = parse_usize(key, value)?,
                ("integrator", "t_end") => t_end = Some(parse_f64(key, value)?),
                ("integrator", "record_every") => {
                    self.integ.record_every = parse_usize(key, value)?
                }
                ("integrator", "scheme") => {
                    self.integ.scheme = Scheme::parse(value)
                        .ok_or_else(|| at(format!("unknown scheme `{value}`")))?
                }
                ("output", "dir") => self.outputs.dir = Some(PathBuf::from(value)),
                ("output", "csv") => self.outputs.csv = Some(PathBuf::from(value)),
                ("output", "svg") => self.outputs.svg = Some(PathBuf::from(value)),
                ("", _) => return Err(at(format!("key `{key}` outside of a section"))),
                (s, k) => return Err(at(format!("unknown key `{k}` in [{s}]"))),
            }
        }
        if let Some(t) = t_end {
            self.set_t_end(t)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::preset(ModelKind::DampedHoLinear);
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.model.validate()?;
        self.initial.validate()?;
        self.integ.validate()?;
        let n = self.model.kind.dof();
        if self.initial.dof() != n {
            return Err(bad(format!(
                "{} needs {n} degrees of freedom, initial state has {}",
                self.model.kind,
                self.initial.dof()
            )));
        }
        Ok(())
    }
}
