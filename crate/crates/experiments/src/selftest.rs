//! Run the exactness checks and a one-replication grid sweep twice, once on
//! the current pool and once single-threaded, and compare the files byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use opmeasure_core::{Error, Result, SimulationConfig};

use crate::checks::{case_reductions, operator_exactness, render_reports};
use crate::output::{write_run, RunManifest};
use crate::sweep::{run_grid_sweep, DEFAULT_GRID_VALUES};

pub const EXACTNESS_TRIALS: usize = 1_000;
pub const REDUCTION_TRIALS: usize = 200;
pub const CHECKS_FILE: &str = "checks.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct FileComparison {
    pub file: String,
    pub identical: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub exactness_max_abs_diff: f64,
    pub reduction_mismatches: usize,
    pub files: Vec<FileComparison>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.exactness_max_abs_diff <= 1e-12
            && self.reduction_mismatches == 0
            && !self.files.is_empty()
            && self.files.iter().all(|f| f.identical)
    }
}

fn one_pass(config: &SimulationConfig, dir: &Path) -> Result<(f64, usize)> {
    fs::create_dir_all(dir)?;
    let exact = operator_exactness(config.base_seed, EXACTNESS_TRIALS)?;
    let cases = case_reductions(config.base_seed, REDUCTION_TRIALS)?;
    fs::write(dir.join(CHECKS_FILE), render_reports(&exact, &cases))?;

    let res = run_grid_sweep(config, &DEFAULT_GRID_VALUES)?;
    let manifest = RunManifest::new(
        &res,
        config,
        &DEFAULT_GRID_VALUES,
        std::slice::from_ref(&config.estimator),
    );
    write_run(dir, &res, &manifest)?;
    Ok((exact.max_abs_diff, cases.iter().map(|c| c.mismatches).sum()))
}

fn sorted_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = fs::read_dir(dir)?
        .map(|e| Ok(e?.path()))
        .collect::<Result<Vec<_>>>()?;
    files.sort();
    Ok(files)
}

/// Writes `dir/run-a` and `dir/run-b`.
pub fn run_selftest(config: &SimulationConfig, dir: &Path) -> Result<SelftestReport> {
    let mut cfg = config.clone();
    cfg.reps = 1;
    let a = dir.join("run-a");
    let b = dir.join("run-b");
    let (max_diff, mismatches) = one_pass(&cfg, &a)?;
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    single.install(|| one_pass(&cfg, &b))?;

    let mut files = Vec::new();
    for path in sorted_files(&a)? {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let other = b.join(&name);
        let identical = other.exists() && fs::read(&path)? == fs::read(&other)?;
        files.push(FileComparison {
            file: name,
            identical,
        });
    }
    Ok(SelftestReport {
        exactness_max_abs_diff: max_diff,
        reduction_mismatches: mismatches,
        files,
    })
}
