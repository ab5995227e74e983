//! JSON run configuration.
//!
//! ```json
//! {
//!   "n": 1,
//!   "structure": 4,
//!   "lagrangian": { "template": "isotropic", "params": { "m": 1.0 } },
//!   "x0": [1, 0, 0, 0, 0, 0, 0, 0],
//!   "dt": 0.001,
//!   "steps": 10000,
//!   "output": "trajectory.csv"
//! }
//! ```
//!
//! `lagrangian` may instead be `{ "text": "0.5*(x0^2 + x4^2) + ..." }`.
//! A relative `output` is resolved against the config file's directory.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use clifford_dynamics::expr::LagrangianError;
use clifford_dynamics::structures::BLOCKS;
use clifford_dynamics::{builtin_lagrangian, Lagrangian, StructureId};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: usize,
    structure: i64,
    lagrangian: RawLagrangian,
    x0: Vec<f64>,
    dt: f64,
    steps: usize,
    #[serde(default)]
    output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLagrangian {
    #[serde(default)]
    template: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    #[serde(default)]
    text: Option<String>,
}

/// A failed load, tagged with the config field it concerns (empty when
/// the file could not be read or is not JSON at all).
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn at(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "config error: {}", self.message)
        } else {
            write!(f, "config error at `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub structure: StructureId,
    pub lagrangian: Lagrangian,
    pub x0: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn dim(&self) -> usize {
        BLOCKS * self.n
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::at("", format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(out) = cfg.output.take() {
            let base = path.parent().unwrap_or(Path::new(""));
            cfg.output = Some(base.join(out));
        }
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." || path == "?" { String::new() } else { path };
            ConfigError::at(path, e.into_inner())
        })?;
        raw.validate()
    }
}

impl RawConfig {
    fn validate(self) -> Result<RunConfig, ConfigError> {
        if self.n == 0 {
            return Err(ConfigError::at("n", "block size must be at least 1"));
        }
        let structure = StructureId::new(self.structure)
            .map_err(|_| ConfigError::at("structure", format!("must be 1..6, got {}", self.structure)))?;
        let dim = BLOCKS * self.n;
        if self.x0.len() != dim {
            return Err(ConfigError::at(
                "x0",
                format!("expected {dim} values (8n with n = {}), got {}", self.n, self.x0.len()),
            ));
        }
        if let Some(i) = self.x0.iter().position(|v| !v.is_finite()) {
            return Err(ConfigError::at(format!("x0[{i}]"), "must be finite"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ConfigError::at("dt", format!("must be positive and finite, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(ConfigError::at("steps", "must be at least 1"));
        }
        let lagrangian = self.lagrangian.build(self.n)?;
        Ok(RunConfig {
            n: self.n,
            structure,
            lagrangian,
            x0: self.x0,
            dt: self.dt,
            steps: self.steps,
            output: self.output,
        })
    }
}

impl RawLagrangian {
    fn build(self, n: usize) -> Result<Lagrangian, ConfigError> {
        match (self.template, self.text) {
            (Some(name), None) => builtin_lagrangian(&name, n, &self.params).map_err(|e| {
                let path = match &e {
                    LagrangianError::MissingParam { param, .. } => format!("lagrangian.params.{param}"),
                    LagrangianError::UnknownParam { param, .. }
                    | LagrangianError::InvalidParam { param, .. } => format!("lagrangian.params.{param}"),
                    _ => "lagrangian.template".to_string(),
                };
                ConfigError::at(path, e)
            }),
            (None, Some(text)) => {
                if !self.params.is_empty() {
                    return Err(ConfigError::at("lagrangian.params", "only allowed with a template"));
                }
                Lagrangian::from_text(&text, n).map_err(|e| ConfigError::at("lagrangian.text", e))
            }
            (Some(_), Some(_)) => Err(ConfigError::at(
                "lagrangian",
                "give either `template` or `text`, not both",
            )),
            (None, None) => Err(ConfigError::at("lagrangian", "needs `template` or `text`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> serde_json::Value {
        serde_json::json!({
            "n": 1,
            "structure": 4,
            "lagrangian": { "template": "isotropic" },
            "x0": [1, 0, 0, 0, 0, 0, 0, 0],
            "dt": 0.001,
            "steps": 10,
            "output": "out.csv"
        })
    }

    fn err_path(v: serde_json::Value) -> String {
        RunConfig::from_json(&v.to_string()).unwrap_err().path
    }

    #[test]
    fn valid_config() {
        let cfg = RunConfig::from_json(&base().to_string()).unwrap();
        assert_eq!(cfg.structure.get(), 4);
        assert_eq!(cfg.dim(), 8);
    }

    #[test]
    fn field_paths() {
        let mut v = base();
        v["x0"] = serde_json::json!([1, 2]);
        assert_eq!(err_path(v), "x0");

        let mut v = base();
        v["x0"][3] = serde_json::json!("a");
        assert_eq!(err_path(v), "x0[3]");

        let mut v = base();
        v.as_object_mut().unwrap().remove("dt");
        let e = RunConfig::from_json(&v.to_string()).unwrap_err();
        assert!(e.message.contains("dt"), "{e}");

        let mut v = base();
        v["structure"] = serde_json::json!(7);
        assert_eq!(err_path(v), "structure");

        let mut v = base();
        v["dt"] = serde_json::json!(-1.0);
        assert_eq!(err_path(v), "dt");

        let mut v = base();
        v["lagrangian"] = serde_json::json!({ "template": "free" });
        assert_eq!(err_path(v), "lagrangian.params.g");

        let mut v = base();
        v["lagrangian"] = serde_json::json!({ "text": "x9" });
        assert_eq!(err_path(v), "lagrangian.text");

        let mut v = base();
        v["lagrangian"]["bogus"] = serde_json::json!(1);
        assert_eq!(err_path(v), "lagrangian.bogus");

        let mut v = base();
        v["steps"] = serde_json::json!(0);
        assert_eq!(err_path(v), "steps");
    }

    #[test]
    fn syntax_error_has_no_path() {
        let e = RunConfig::from_json("{ nope").unwrap_err();
        assert_eq!(e.path, "");
    }
}
