//! Run-directory files: `results.csv`, `summary.csv` and the `config.json`
//! sidecar.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use opmeasure_core::estimate::EstimatorConfig;
use opmeasure_core::{Result, SimulationConfig};

use crate::sweep::{AggregateRow, ResultRow, SweepResult, RESULT_COLUMNS};

pub const RESULTS_SCHEMA_VERSION: &str = "opmeasure-results/1";

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: String,
    pub experiment: String,
    pub sweep_var: String,
    pub sweep_values: Vec<u64>,
    pub estimators: Vec<EstimatorConfig>,
    pub config: SimulationConfig,
    pub columns: Vec<String>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(
        result: &SweepResult,
        config: &SimulationConfig,
        sweep_values: &[u64],
        estimators: &[EstimatorConfig],
    ) -> Self {
        RunManifest {
            schema_version: RESULTS_SCHEMA_VERSION.to_string(),
            experiment: result.experiment.clone(),
            sweep_var: result.sweep_var.clone(),
            sweep_values: sweep_values.to_vec(),
            estimators: estimators.to_vec(),
            config: config.clone(),
            columns: RESULT_COLUMNS.iter().map(|c| c.to_string()).collect(),
            diagnostics: result.diagnostics.clone(),
        }
    }
}

pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(RESULT_COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| Ok(row?)).collect()
}

pub fn write_summary_csv(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| Ok(row?)).collect()
}

/// Write all three files into `dir`, replacing earlier ones.
pub fn write_run(dir: &Path, result: &SweepResult, manifest: &RunManifest) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_results_csv(&dir.join(RESULTS_FILE), &result.rows)?;
    write_summary_csv(&dir.join(SUMMARY_FILE), &result.aggregates)?;
    fs::write(dir.join(CONFIG_FILE), serde_json::to_string_pretty(manifest)? + "\n")?;
    Ok(())
}
