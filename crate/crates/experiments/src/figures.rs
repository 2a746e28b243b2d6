//! Figure data: true and estimated surfaces, and a few test curves.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use opmeasure_core::estimate::{build_design, build_test_design, predict, recover_beta};
use opmeasure_core::operator::{write_tabulated_csv, TabulatedSurface};
use opmeasure_core::simulate::DataGenerator;
use opmeasure_core::{Error, Result, SimulationConfig};

use crate::output::RESULTS_SCHEMA_VERSION;

pub const DEFAULT_CURVES: usize = 3;

pub const BETA_TRUE_FILE: &str = "beta_true.csv";
pub const BETA_HAT_FILE: &str = "beta_hat.csv";
pub const CURVES_FILE: &str = "curves.csv";
pub const FIGURES_FILE: &str = "figures.json";
pub const DATASET_DIR: &str = "dataset";

/// One line of `curves.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub sample: usize,
    pub t: f64,
    pub y_noisy: f64,
    pub y_signal: f64,
    pub y_pred: f64,
}

/// `figures.json`: what is needed to recompute the curves independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureManifest {
    pub schema_version: String,
    pub config: SimulationConfig,
    pub seed: u64,
    pub sigma: f64,
    pub effective_rank: usize,
    pub input_points: Vec<f64>,
    pub output_points: Vec<f64>,
    /// KL coefficients of the exported test samples, in `curves.csv` order.
    pub curve_xi: Vec<Vec<f64>>,
}

/// Fit the configured estimator on one dataset (seeded by `config.base_seed`)
/// and write the figure files plus the dataset itself into `dir`.
pub fn export_figure_data(config: &SimulationConfig, dir: &Path, curves: usize) -> Result<FigureManifest> {
    config.validate()?;
    if curves > config.n_test {
        return Err(Error::Config(format!(
            "asked for {curves} curves but only {} test samples are drawn",
            config.n_test
        )));
    }
    let truth = config.beta.build();
    let data = DataGenerator::new(config, &truth)?.generate(config.base_seed)?;
    let fit = config.estimator.build()?.fit(&build_design(&data)?, &data.train_y)?;
    let y_pred = predict(&fit.coefficients, build_test_design(&data)?.matrix())?;

    let s = data.input_measure.points().to_vec();
    let t = data.output_measure.points().to_vec();
    let beta_true = TabulatedSurface::new(s.clone(), t.clone(), truth.tabulate(&s, &t)?)?;
    let beta_hat = recover_beta(&fit.coefficients, &data.input_measure)?;

    fs::create_dir_all(dir)?;
    write_tabulated_csv(&beta_true, &dir.join(BETA_TRUE_FILE))?;
    write_tabulated_csv(
        beta_hat.as_tabulated().expect("recovered surfaces are tabulated"),
        &dir.join(BETA_HAT_FILE),
    )?;

    let mut w = csv::Writer::from_path(dir.join(CURVES_FILE))?;
    for i in 0..curves {
        for (j, &tj) in t.iter().enumerate() {
            w.serialize(CurveRow {
                sample: i,
                t: tj,
                y_noisy: data.test_y[(i, j)],
                y_signal: data.test_signal[(i, j)],
                y_pred: y_pred[(i, j)],
            })?;
        }
    }
    w.flush()?;

    let manifest = FigureManifest {
        schema_version: RESULTS_SCHEMA_VERSION.to_string(),
        config: config.clone(),
        seed: data.seed,
        sigma: data.sigma,
        effective_rank: fit.effective_rank,
        input_points: s,
        output_points: t,
        curve_xi: (0..curves)
            .map(|i| data.test_xi.row(i).iter().copied().collect())
            .collect(),
    };
    fs::write(
        dir.join(FIGURES_FILE),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    data.export(&dir.join(DATASET_DIR))?;
    Ok(manifest)
}

pub fn read_curves(path: &Path) -> Result<Vec<CurveRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| Ok(row?)).collect()
}
