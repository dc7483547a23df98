//! Run configuration files.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "id": "fig2",
//!   "scenario": {
//!     "target":      { "kind": "tls", "frequency": 1.0 },
//!     "bath_unit":   { "kind": "tls", "frequency": 1.0, "temperature": 0.2 },
//!     "cluster":     { "n_units": 1, "mode": "exact-tensor" },
//!     "interaction": { "f1": 0.4242640687, "f2": 0.6, "form": "rwa" },
//!     "collision":   { "tau": 0.051, "n_max": 5000 }
//!   },
//!   "sweep":  { "parameter": "temperature", "from": 0.05, "to": 3.0, "points": 60 },
//!   "series": { "parameter": "cluster_size", "values": [1, 2, 3, 8] }
//! }
//! ```
//!
//! Only `schema` and `scenario.interaction.{f1,f2}` are required. Defaults:
//! `ω = ω_B = 1`, two-level target and units, ground-state bath (`temperature: 0`),
//! one unit in exact-tensor mode, rotating coupling form, `τ = 0.051`,
//! `n_max = 5000`. An oscillator target must give `truncation`; oscillator bath
//! units fall back to the default truncation rule. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use repcoh::model::ScenarioConfig;

use crate::error::{CliError, CliResult};
use crate::sweep::SweepSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(default = "default_id")]
    pub id: String,
    pub scenario: ScenarioConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    /// Secondary axis for figure presets (one curve per value).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SweepSpec>,
}

fn default_id() -> String {
    "scenario".to_string()
}

/// Maps core validation errors onto the config-file field path.
pub(crate) fn scenario_error(e: repcoh::Error) -> CliError {
    match e {
        repcoh::Error::InvalidConfig { field, reason } => CliError::invalid(format!("scenario.{field}"), reason),
        other => CliError::Model(other),
    }
}

impl RunConfig {
    pub fn new(id: impl Into<String>, scenario: ScenarioConfig) -> Self {
        RunConfig { schema: SCHEMA_VERSION, id: id.into(), scenario, sweep: None, series: None }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(CliError::invalid("schema", format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema)));
        }
        if self.id.is_empty() || self.id.contains([',', '\n', '\r']) {
            return Err(CliError::invalid("id", "must be non-empty without commas or newlines"));
        }
        self.scenario.validate().map_err(scenario_error)?;
        if let Some(s) = &self.sweep {
            s.validate(&self.scenario).map_err(|e| prefix(e, "sweep"))?;
        }
        if let Some(s) = &self.series {
            s.validate(&self.scenario).map_err(|e| prefix(e, "series"))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical (key-sorted) JSON form.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

fn prefix(e: CliError, section: &str) -> CliError {
    match e {
        CliError::Invalid { field, reason } => CliError::invalid(format!("{section}.{field}"), reason),
        other => other,
    }
}

/// Parses and validates a configuration held in memory; `origin` names it in
/// error messages.
pub fn parse_config(text: &str, origin: &str) -> CliResult<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Parse {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{ "schema": 1, "scenario": { "interaction": { "f1": 0.1, "f2": 0.2 } } }"#;

    #[test]
    fn defaults_fill_the_scenario() {
        let cfg = parse_config(MINIMAL, "inline").unwrap();
        let s = &cfg.scenario;
        assert_eq!((s.target.frequency, s.bath_unit.frequency, s.bath_unit.temperature), (1.0, 1.0, 0.0));
        assert_eq!((s.cluster.n_units, s.collision.tau, s.collision.n_max), (1, 0.051, 5000));
        assert_eq!(cfg.id, "scenario");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "{\n  \"schema\": 1,\n  \"scenario\": {\n    \"interaction\": { \"f1\": 0.1, \"f2\": }\n  }\n}";
        match parse_config(text, "bad.json") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{ "schema": 1, "scenario": { "interaction": { "f1": 0.1, "f2": 0.2, "f3": 1 } } }"#;
        assert!(matches!(parse_config(text, "x"), Err(CliError::Parse { .. })));
    }

    #[test]
    fn validation_names_the_field() {
        let neg = r#"{ "schema": 1, "scenario": { "target": { "frequency": -1 }, "interaction": { "f1": 0.1, "f2": 0.2 } } }"#;
        match parse_config(neg, "x") {
            Err(CliError::Invalid { field, .. }) => assert_eq!(field, "scenario.target.frequency"),
            other => panic!("{other:?}"),
        }
        let osc = r#"{ "schema": 1, "scenario": { "target": { "kind": "lho" }, "interaction": { "f1": 0.1, "f2": 0.2, "form": "c-r" } } }"#;
        match parse_config(osc, "x") {
            Err(CliError::Invalid { field, .. }) => assert_eq!(field, "scenario.target.truncation"),
            other => panic!("{other:?}"),
        }
        let schema = MINIMAL.replace("\"schema\": 1", "\"schema\": 7");
        assert!(matches!(parse_config(&schema, "x"), Err(CliError::Invalid { field, .. }) if field == "schema"));
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = parse_config(MINIMAL, "x").unwrap();
        assert_eq!(a.hash(), parse_config(MINIMAL, "y").unwrap().hash());
        let mut b = a.clone();
        b.scenario.interaction.f1 = 0.11;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
