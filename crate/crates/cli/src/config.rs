//! Scenario files: JSON with a versioned `schema` field.

use std::fs;
use std::path::Path;

use matdelay_core::{HistoryFunction, ModelSpec, StepperConfig};
use matdelay_core::model::Profile;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const SCHEMA: &str = "matdelay/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub schema: String,
    pub spec: ModelSpec,
    pub history: HistoryDoc,
    #[serde(default)]
    pub stepper: StepperConfig,
    #[serde(default)]
    pub output: OutputDoc,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub verify: VerifyDoc,
    #[serde(default)]
    pub sweep: Option<SweepDoc>,
}

fn default_seed() -> u64 {
    42
}

/// Initial history descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HistoryDoc {
    /// Constant prey and predator levels; `yj` defaults to the consistent
    /// value.
    Constant { x: f64, y: f64, yj: Option<f64> },
    /// Arbitrary prey and predator profiles (constant, sine or tabulated);
    /// `juvenile` defaults to the consistent constant.
    Profiles { prey: Profile, predator: Profile, juvenile: Option<Profile> },
}

impl HistoryDoc {
    pub fn materialize(&self, spec: &ModelSpec) -> HistoryFunction {
        match self {
            Self::Constant { x, y, yj } => {
                let h = HistoryFunction::constant(*x, *y, yj.unwrap_or(0.0));
                if yj.is_some() {
                    h
                } else {
                    h.with_consistent_juveniles(spec)
                }
            }
            Self::Profiles { prey, predator, juvenile } => {
                let h = HistoryFunction {
                    prey: prey.clone(),
                    predator: predator.clone(),
                    juvenile: juvenile.clone().unwrap_or(Profile::Constant { value: 0.0 }),
                };
                if juvenile.is_some() {
                    h
                } else {
                    h.with_consistent_juveniles(spec)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputDoc {
    /// Write every `stride`-th accepted node.
    pub stride: usize,
    pub csv: String,
    pub svg: Option<String>,
}

impl Default for OutputDoc {
    fn default() -> Self {
        Self { stride: 1, csv: "trajectory.csv".into(), svg: Some("trajectory.svg".into()) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyDoc {
    /// Histories for the permanence/extinction probe.
    pub dichotomy_histories: usize,
    /// Random histories for the attraction probe.
    pub attraction_histories: usize,
    /// Horizon for the attraction probe; `500 / d` when absent.
    pub attraction_horizon: Option<f64>,
    pub tail_fraction: f64,
}

impl Default for VerifyDoc {
    fn default() -> Self {
        Self { dichotomy_histories: 6, attraction_histories: 10, attraction_horizon: None, tail_fraction: 0.25 }
    }
}

/// Grid axes; an absent axis keeps the scenario's value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepDoc {
    pub k2: Option<Vec<f64>>,
    pub d: Option<Vec<f64>>,
    pub tau_m: Option<Vec<f64>>,
    #[serde(rename = "tau_M")]
    pub tau_max: Option<Vec<f64>>,
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Scenario, CliError> {
    let raw: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
    match raw.get("schema").and_then(Value::as_str) {
        Some(SCHEMA) => {}
        Some(other) => return Err(CliError::Config(format!("unsupported schema {other:?}, expected {SCHEMA:?}"))),
        None => return Err(CliError::Config("missing \"schema\" field".into())),
    }
    let scenario: Scenario =
        serde_json::from_value(raw.clone()).map_err(|e| CliError::Config(format!("config: {e}")))?;
    // Every recognized key survives a serialize round trip; anything else
    // was ignored by the deserializer.
    let echo = serde_json::to_value(&scenario).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(path) = unknown_key(&raw, &echo, String::new()) {
        return Err(CliError::UnknownKey(path));
    }
    Ok(scenario)
}

fn unknown_key(raw: &Value, known: &Value, prefix: String) -> Option<String> {
    match (raw, known) {
        (Value::Object(r), Value::Object(k)) => r.iter().find_map(|(key, v)| {
            let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
            match k.get(key) {
                None => Some(path),
                Some(kv) => unknown_key(v, kv, path),
            }
        }),
        (Value::Array(r), Value::Array(k)) => r
            .iter()
            .zip(k)
            .enumerate()
            .find_map(|(i, (a, b))| unknown_key(a, b, format!("{prefix}[{i}]"))),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "schema": "matdelay/1",
        "spec": {
            "params": {"r": 1.0, "K": 2.0, "n": 1.0, "dj": 0.5, "d": 1.0},
            "delay": {"kind": "constant", "coefficients": {"c": 0.5}, "tau_m": 0.5, "tau_M": 0.5},
            "response": {"kind": "linear", "coefficients": {"b": 1.0}}
        },
        "history": {"kind": "constant", "x": 1.0, "y": 0.5}
    }"#;

    #[test]
    fn minimal_scenario_parses_with_defaults() {
        let s = parse(BASE).unwrap();
        assert_eq!(s.seed, 42);
        assert_eq!(s.output.stride, 1);
        let h = s.history.materialize(&s.spec);
        assert!(h.check(&s.spec).consistent);
    }

    #[test]
    fn unknown_keys_are_reported_with_their_path() {
        let mut v: Value = serde_json::from_str(BASE).unwrap();
        v["spec"]["params"]["q"] = 1.0.into();
        match parse(&v.to_string()) {
            Err(CliError::UnknownKey(p)) => assert_eq!(p, "spec.params.q"),
            other => panic!("{other:?}"),
        }
        let mut v: Value = serde_json::from_str(BASE).unwrap();
        v["spec"]["response"]["coefficients"]["h"] = 1.0.into();
        assert!(matches!(parse(&v.to_string()), Err(CliError::UnknownKey(p)) if p == "spec.response.coefficients.h"));
    }

    #[test]
    fn schema_is_required() {
        let v = BASE.replace("matdelay/1", "matdelay/0");
        assert!(matches!(parse(&v), Err(CliError::Config(_))));
    }
}
