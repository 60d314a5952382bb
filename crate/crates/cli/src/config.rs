//! Scenario configuration, schema version 1.
//!
//! A config is a JSON object with the common fields `schema`, `id`, `kind`,
//! `seed`, `checks` and a kind-specific `params` object. Overrides of the
//! form `a.b.c=value` are applied to the raw JSON before validation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::{kind_info, KindInfo};
use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u64 = 1;

/// Pass criterion of one check: an upper bound on its value, a closed
/// interval, or both.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema: u64,
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "empty_object")]
    pub params: Value,
    pub checks: BTreeMap<String, CheckSpec>,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

impl Config {
    pub fn kind_info(&self) -> &'static KindInfo {
        kind_info(&self.kind).expect("kind validated on load")
    }

    /// Deserializes `params` into the kind's parameter struct.
    pub fn params<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.params.clone())
            .map_err(|e| CliError::schema(format!("params: {e}")))
    }
}

/// Reads, overrides and validates a config file.
pub fn load(path: &Path, overrides: &[String], seed: Option<u64>) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, overrides, seed)
}

pub fn parse(text: &str, overrides: &[String], seed: Option<u64>) -> Result<Config> {
    let mut raw: Value =
        serde_json::from_str(text).map_err(|e| CliError::schema(format!("not valid JSON: {e}")))?;
    for o in overrides {
        apply_override(&mut raw, o)?;
    }
    match raw.get("schema") {
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(other) => {
            return Err(CliError::schema(format!(
                "unsupported schema {other}, expected {SCHEMA_VERSION}"
            )))
        }
        None => return Err(CliError::schema("missing field `schema`")),
    }
    let kind = raw
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::schema("missing string field `kind`"))?;
    let info = kind_info(kind).ok_or_else(|| CliError::UnknownKind(kind.to_string()))?;
    let mut cfg: Config =
        serde_json::from_value(raw).map_err(|e| CliError::schema(e.to_string()))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if cfg.checks.is_empty() {
        return Err(CliError::schema("`checks` lists no checks"));
    }
    for (name, spec) in &cfg.checks {
        if !info.checks.iter().any(|c| c.name == name) {
            return Err(CliError::schema(format!(
                "check `{name}` is not available for kind `{}`",
                info.name
            )));
        }
        if spec.tol.is_some_and(|t| !(t >= 0.0)) {
            return Err(CliError::schema(format!(
                "check `{name}`: tol must be >= 0"
            )));
        }
        if let Some([lo, hi]) = spec.range {
            if !(lo <= hi) {
                return Err(CliError::schema(format!("check `{name}`: empty range")));
            }
        }
    }
    (info.validate)(&cfg)?;
    Ok(cfg)
}

/// Applies `path=value`, where `path` is dot-separated and `value` is JSON
/// (bare words are taken as strings).
pub fn apply_override(root: &mut Value, spec: &str) -> Result<()> {
    let (path, value) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override `{spec}` is not key=value")))?;
    if path.is_empty() {
        return Err(CliError::Usage(format!(
            "override `{spec}` has an empty key"
        )));
    }
    let value: Value =
        serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    let mut node = root;
    for (i, key) in keys.iter().enumerate() {
        let last = i + 1 == keys.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), value);
                    return Ok(());
                }
                map.entry(key.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = key.parse().map_err(|_| {
                    CliError::schema(format!("override `{path}`: `{key}` is not an index"))
                })?;
                let len = items.len();
                let slot = items.get_mut(idx).ok_or_else(|| {
                    CliError::schema(format!("override `{path}`: index {idx} out of {len}"))
                })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(CliError::schema(format!(
                    "override `{path}`: `{key}` is inside a non-object value"
                )))
            }
        };
    }
    unreachable!("loop returns on the last key")
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryConfig {
    Periodic,
    OneSided,
}

/// A uniform grid with `n` nodes per axis.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    /// Node spacing; for periodic grids defaults to `length / n`.
    #[serde(default)]
    pub h: Option<f64>,
    /// Period of a periodic grid.
    #[serde(default)]
    pub length: Option<f64>,
    #[serde(default)]
    pub origin: f64,
    pub boundary: BoundaryConfig,
}

impl GridConfig {
    pub fn spacing(&self) -> Result<f64> {
        match (self.h, self.length, &self.boundary) {
            (Some(h), None, _) => Ok(h),
            (None, Some(l), BoundaryConfig::Periodic) => Ok(l / self.n as f64),
            (None, None, BoundaryConfig::Periodic) => Ok(std::f64::consts::TAU / self.n as f64),
            (None, _, BoundaryConfig::OneSided) => {
                Err(CliError::schema("grid: one_sided grids need `h`"))
            }
            (Some(_), Some(_), _) => Err(CliError::schema("grid: give either `h` or `length`")),
        }
    }

    pub fn refined(&self) -> Result<GridConfig> {
        let h = self.spacing()?;
        Ok(GridConfig {
            n: match self.boundary {
                BoundaryConfig::Periodic => 2 * self.n,
                BoundaryConfig::OneSided => 2 * self.n - 1,
            },
            h: Some(h / 2.0),
            length: None,
            origin: self.origin,
            boundary: self.boundary.clone(),
        })
    }

    pub fn build(&self, r: usize) -> Result<liefield_core::GridSpec> {
        let boundary = match self.boundary {
            BoundaryConfig::Periodic => liefield_core::Boundary::Periodic,
            BoundaryConfig::OneSided => liefield_core::Boundary::OneSided,
        };
        Ok(liefield_core::GridSpec::uniform(
            r,
            self.n,
            self.spacing()?,
            self.origin,
            boundary,
        )?)
    }
}

/// Seeded random smooth field built from sine modes.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_modes() -> usize {
    2
}

fn default_amplitude() -> f64 {
    0.5
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            modes: default_modes(),
            amplitude: default_amplitude(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_sets_nested_values() {
        let mut v: Value = serde_json::json!({"params": {"dt": 0.1}, "checks": {}});
        apply_override(&mut v, "params.dt=0.5").unwrap();
        apply_override(&mut v, "checks.energy_drift.tol=0").unwrap();
        apply_override(&mut v, "id=name").unwrap();
        assert_eq!(v["params"]["dt"], 0.5);
        assert_eq!(v["checks"]["energy_drift"]["tol"], 0);
        assert_eq!(v["id"], "name");
    }

    #[test]
    fn override_without_equals_is_usage_error() {
        let mut v = serde_json::json!({});
        assert!(matches!(
            apply_override(&mut v, "dt"),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn schema_and_kind_errors_are_distinguished() {
        let bad_schema = r#"{"schema": 2, "id": "x", "kind": "rigid_body", "checks": {}}"#;
        assert!(matches!(
            parse(bad_schema, &[], None),
            Err(CliError::Schema(_))
        ));
        let bad_kind = r#"{"schema": 1, "id": "x", "kind": "warp_drive", "checks": {}}"#;
        assert!(matches!(
            parse(bad_kind, &[], None),
            Err(CliError::UnknownKind(_))
        ));
        assert!(matches!(parse("{", &[], None), Err(CliError::Schema(_))));
    }

    #[test]
    fn unknown_check_is_rejected() {
        let cfg = r#"{"schema": 1, "id": "x", "kind": "rigid_body", "checks": {"nope": {}}}"#;
        assert!(matches!(parse(cfg, &[], None), Err(CliError::Schema(_))));
    }

    #[test]
    fn refined_grid_halves_spacing() {
        let g = GridConfig {
            n: 11,
            h: Some(0.1),
            length: None,
            origin: 0.0,
            boundary: BoundaryConfig::OneSided,
        };
        let f = g.refined().unwrap();
        assert_eq!((f.n, f.h), (21, Some(0.05)));
    }
}
