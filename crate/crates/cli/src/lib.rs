//! Config-driven scenario runner for `liefield-core`.
//!
//! A run reads a JSON scenario config, evaluates the requested checks and
//! writes `report.json`, `timing.json`, CSV tables and binary section files
//! into an output directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod config;
pub mod error;
pub mod report;
pub mod runners;
pub mod section_io;

use std::path::Path;
use std::time::Instant;

pub use config::Config;
pub use error::{exit, CliError, Result};
pub use report::RunReport;

/// Runs an already parsed config and writes its artifacts into `outdir`.
pub fn run_config(cfg: &Config, outdir: &Path) -> Result<RunReport> {
    std::fs::create_dir_all(outdir).map_err(|e| CliError::io(outdir, e))?;
    let start = Instant::now();
    let out = (cfg.kind_info().run)(cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    let report = RunReport::assemble(cfg, &out);
    write(&outdir.join("report.json"), report.to_json())?;
    let timing = serde_json::json!({ "scenario": cfg.id, "wall_seconds": seconds });
    write(
        &outdir.join("timing.json"),
        format!(
            "{}\n",
            serde_json::to_string_pretty(&timing).expect("timing serializes")
        ),
    )?;
    for (name, table) in &out.tables {
        table.write(&outdir.join(name))?;
    }
    for (name, phi) in &out.sections {
        section_io::save(&outdir.join(name), phi)?;
    }
    Ok(report)
}

/// Loads `config` (with `key=value` overrides and an optional seed) and runs it.
pub fn run_scenario(
    config: &Path,
    outdir: &Path,
    seed: Option<u64>,
    overrides: &[String],
) -> Result<RunReport> {
    let cfg = config::load(config, overrides, seed)?;
    run_config(&cfg, outdir)
}

fn write(path: &Path, text: String) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
