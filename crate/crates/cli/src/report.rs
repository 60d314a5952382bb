//! Run reports (`report.json`) and CSV tables.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::config::{CheckSpec, Config, SCHEMA_VERSION};
use crate::error::{CliError, Result};

/// What a runner measured for one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    /// The quantity compared against the criterion.
    pub value: f64,
    pub max_norm: f64,
    pub l2_norm: Option<f64>,
    /// Criterion used when the config gives neither `tol` nor `range`.
    pub default: CheckSpec,
}

impl Measurement {
    pub fn bounded(value: f64, l2_norm: Option<f64>, tol: f64) -> Self {
        Self {
            value,
            max_norm: value,
            l2_norm,
            default: CheckSpec {
                tol: Some(tol),
                range: None,
            },
        }
    }

    pub fn ratio(value: f64, range: [f64; 2]) -> Self {
        Self {
            value,
            max_norm: value,
            l2_norm: None,
            default: CheckSpec {
                tol: None,
                range: Some(range),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub step: f64,
    pub value: f64,
}

/// Residual versus grid spacing or time step, with successive ratios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub check: String,
    /// `"h"` or `"dt"`.
    pub variable: String,
    pub rows: Vec<ConvergenceRow>,
    pub ratios: Vec<f64>,
}

impl ConvergenceTable {
    pub fn new(check: &str, variable: &str, rows: Vec<(f64, f64)>) -> Self {
        let ratios = rows.windows(2).map(|w| w[0].1 / w[1].1).collect();
        Self {
            check: check.to_string(),
            variable: variable.to_string(),
            rows: rows
                .into_iter()
                .map(|(step, value)| ConvergenceRow { step, value })
                .collect(),
            ratios,
        }
    }

    pub fn last_ratio(&self) -> f64 {
        self.ratios.last().copied().unwrap_or(f64::NAN)
    }
}

/// A CSV table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write(&self, path: &Path) -> Result<()> {
        let io = |e: csv::Error| CliError::io(path, std::io::Error::other(e));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}")))
                .map_err(io)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }
}

/// Everything a scenario runner produces.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub measurements: BTreeMap<String, Measurement>,
    pub convergence: Vec<ConvergenceTable>,
    pub tables: Vec<(String, Table)>,
    pub sections: Vec<(String, liefield_core::DiscretizedSection)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub max_norm: f64,
    pub l2_norm: Option<f64>,
    #[serde(flatten)]
    pub criterion: CheckSpec,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u64,
    pub scenario: String,
    pub kind: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub convergence: Vec<ConvergenceTable>,
    pub failures: usize,
}

fn passes(value: f64, spec: &CheckSpec) -> bool {
    value.is_finite()
        && spec.tol.is_none_or(|t| value <= t)
        && spec.range.is_none_or(|[lo, hi]| lo <= value && value <= hi)
}

impl RunReport {
    /// Scores every configured check; each appears exactly once.
    pub fn assemble(cfg: &Config, out: &RunOutput) -> Self {
        let checks: Vec<CheckResult> = cfg
            .checks
            .iter()
            .map(|(name, spec)| {
                let m = out
                    .measurements
                    .get(name)
                    .unwrap_or_else(|| panic!("runner did not measure `{name}`"));
                let criterion = if spec.tol.is_none() && spec.range.is_none() {
                    m.default.clone()
                } else {
                    spec.clone()
                };
                CheckResult {
                    name: name.clone(),
                    value: m.value,
                    max_norm: m.max_norm,
                    l2_norm: m.l2_norm,
                    pass: passes(m.value, &criterion),
                    criterion,
                }
            })
            .collect();
        let failures = checks.iter().filter(|c| !c.pass).count();
        Self {
            schema: SCHEMA_VERSION,
            scenario: cfg.id.clone(),
            kind: cfg.kind.clone(),
            seed: cfg.seed,
            checks,
            convergence: out.convergence.clone(),
            failures,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria() {
        let tol = CheckSpec {
            tol: Some(1.0),
            range: None,
        };
        let range = CheckSpec {
            tol: None,
            range: Some([3.5, 4.5]),
        };
        assert!(passes(1.0, &tol));
        assert!(!passes(1.5, &tol));
        assert!(!passes(f64::NAN, &tol));
        assert!(passes(4.0, &range));
        assert!(!passes(3.0, &range));
    }

    #[test]
    fn zero_tolerance_fails_any_discretization_error() {
        let zero = CheckSpec {
            tol: Some(0.0),
            range: None,
        };
        assert!(!passes(1e-17, &zero));
    }

    #[test]
    fn convergence_ratios() {
        let t = ConvergenceTable::new("m", "h", vec![(0.2, 4.0), (0.1, 1.0)]);
        assert_eq!(t.ratios, vec![4.0]);
    }
}
