//! TOML configuration: defaults, then a file, then `key=value` overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::control::{ControllerParams, CriParams};
use crate::error::{Error, Result};
use crate::geometry::EnvelopeParams;
use crate::metrics::ScoringParams;
use crate::risk::RiskParams;
use crate::sim::SimParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FusionParams {
    pub beta: f64,
}

impl Default for FusionParams {
    fn default() -> Self {
        Self {
            beta: CriParams::default().beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceVerbosity {
    /// CSV columns `t,speed,cri_final,mode`.
    Series,
    /// One JSON record per tick with sector risks, commands and timings.
    #[default]
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceParams {
    pub verbosity: TraceVerbosity,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub risk: RiskParams,
    pub envelope: EnvelopeParams,
    pub fusion: FusionParams,
    pub controller: ControllerParams,
    pub sim: SimParams,
    pub scoring: ScoringParams,
    pub trace: TraceParams,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text).map_err(|e| Error::Config(toml_error(&e, text)))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// `None` gives pure defaults.
    pub fn resolve(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut config = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        for o in overrides {
            config = config.with_override(o)?;
        }
        Ok(config)
    }

    /// Applies one `dotted.key=value` override; the value is read as a TOML
    /// literal, falling back to a bare string.
    pub fn with_override(&self, assignment: &str) -> Result<Self> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {assignment:?} must look like key=value")))?;
        let key = key.trim();
        let value = parse_literal(raw.trim());

        let mut doc = toml::Value::try_from(self).expect("config serializes");
        let mut parts: Vec<&str> = key.split('.').collect();
        let leaf = parts
            .pop()
            .filter(|l| !l.is_empty())
            .ok_or_else(|| Error::Config(format!("empty override key in {assignment:?}")))?;
        let mut table = doc.as_table_mut().expect("config is a table");
        for p in parts {
            table = table
                .get_mut(p)
                .and_then(toml::Value::as_table_mut)
                .ok_or_else(|| Error::Config(format!("unknown config section {p:?} in override {key}")))?;
        }
        table.insert(leaf.to_string(), value);

        let config: Config = doc
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("override {key}: {}", e.message())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.cri().validate()?;
        self.sim.validate()?;
        self.scoring.validate()
    }

    pub fn cri(&self) -> CriParams {
        CriParams {
            risk: self.risk,
            envelope: self.envelope,
            beta: self.fusion.beta,
            controller: self.controller,
        }
    }

    /// Effective configuration as TOML; also the input to [`Config::hash`].
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML form, hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn parse_literal(raw: &str) -> toml::Value {
    #[derive(Deserialize)]
    struct Probe {
        v: toml::Value,
    }
    toml::from_str::<Probe>(&format!("v = {raw}"))
        .map(|p| p.v)
        .unwrap_or_else(|_| toml::Value::String(raw.to_string()))
}

fn toml_error(e: &toml::de::Error, text: &str) -> String {
    match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            format!("line {line} column {col}: {}", e.message())
        }
        None => e.message().to_string(),
    }
}
