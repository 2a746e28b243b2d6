use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::kl::{draw_predictor, KlProcess};
use super::seed::{substream, TEST_STREAM, TRAIN_STREAM};
use super::{calibrate_noise, NoiseCalibration};
use crate::config::SimulationConfig;
use crate::error::Result;
use crate::measures::GridMeasure;
use crate::operator::{CoefficientSurface, Kernel};

pub const DATASET_SCHEMA_VERSION: &str = "opmeasure-dataset/1";

/// Train/test samples drawn from the operator model.
///
/// `*_x` hold `X_k(s_i)` on the input grid, `*_signal` the noiseless reference
/// operator output at the output grid, `*_y` the noisy responses and `*_xi`
/// the KL coefficients (one row per sample) so predictors can be evaluated on
/// any grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train_x: DMatrix<f64>,
    pub train_y: DMatrix<f64>,
    pub train_signal: DMatrix<f64>,
    pub train_xi: DMatrix<f64>,
    pub test_x: DMatrix<f64>,
    pub test_y: DMatrix<f64>,
    pub test_signal: DMatrix<f64>,
    pub test_xi: DMatrix<f64>,
    pub input_measure: GridMeasure,
    pub output_measure: GridMeasure,
    pub sigma: f64,
    pub zero_variance_signal: bool,
    pub seed: u64,
    pub config: SimulationConfig,
}

/// Precomputed pieces shared by every dataset with the same grids and truth.
///
/// The expensive part is the reference operator applied to each basis
/// function, `G[k, j] = Σ_r w_r·β(r, t_j)·φ_k(r)` over the reference grid; a
/// predictor's noiseless response is then `Σ_k ξ_k G[k, j]`.
#[derive(Debug, Clone)]
pub struct DataGenerator {
    config: SimulationConfig,
    process: KlProcess,
    input: GridMeasure,
    output: GridMeasure,
    coarse_basis: DMatrix<f64>,
    reference_response: DMatrix<f64>,
}

impl DataGenerator {
    pub fn new<K: Kernel + ?Sized>(config: &SimulationConfig, beta: &K) -> Result<Self> {
        config.validate()?;
        let process = KlProcess::new(config.k)?;
        let input = GridMeasure::uniform_midpoint(config.p, 0.0, 1.0)?;
        let output = GridMeasure::uniform_midpoint(config.output_size(), 0.0, 1.0)?;
        let reference = GridMeasure::uniform_midpoint(config.p_ref, 0.0, 1.0)?;
        let coarse_basis = process.basis_table(input.points());
        let ref_basis = process.basis_table(reference.points());

        let k = process.truncation();
        let mut reference_response = DMatrix::zeros(k, output.len());
        for (j, &t) in output.points().iter().enumerate() {
            let column = reference
                .points()
                .iter()
                .map(|&r| beta.eval(r, t))
                .collect::<Result<Vec<_>>>()?;
            for kk in 0..k {
                let mut acc = 0.0;
                for (r, &w) in reference.weights().iter().enumerate() {
                    acc += w * (column[r] * ref_basis[(kk, r)]);
                }
                reference_response[(kk, j)] = acc;
            }
        }
        Ok(DataGenerator {
            config: config.clone(),
            process,
            input,
            output,
            coarse_basis,
            reference_response,
        })
    }

    pub fn process(&self) -> &KlProcess {
        &self.process
    }

    pub fn input_measure(&self) -> &GridMeasure {
        &self.input
    }

    pub fn output_measure(&self) -> &GridMeasure {
        &self.output
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    /// Noiseless reference-operator response for each row of `xi`.
    pub fn signal(&self, xi: &DMatrix<f64>) -> DMatrix<f64> {
        let g = &self.reference_response;
        DMatrix::from_fn(xi.nrows(), g.ncols(), |row, j| {
            let mut acc = 0.0;
            for kk in 0..g.nrows() {
                acc += xi[(row, kk)] * g[(kk, j)];
            }
            acc
        })
    }

    /// Predictor values on the input grid for each row of `xi`.
    pub fn sample_grid(&self, xi: &DMatrix<f64>) -> DMatrix<f64> {
        let phi = &self.coarse_basis;
        DMatrix::from_fn(xi.nrows(), phi.ncols(), |row, i| {
            let mut acc = 0.0;
            for kk in 0..phi.nrows() {
                acc += xi[(row, kk)] * phi[(kk, i)];
            }
            acc
        })
    }

    fn draw_xi(&self, rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let mut xi = DMatrix::zeros(n, self.process.truncation());
        for row in 0..n {
            for (kk, v) in draw_predictor(rng, &self.process).into_iter().enumerate() {
                xi[(row, kk)] = v;
            }
        }
        xi
    }

    fn add_noise(rng: &mut ChaCha8Rng, signal: &DMatrix<f64>, sigma: f64) -> DMatrix<f64> {
        let mut y = signal.clone();
        for row in 0..y.nrows() {
            for j in 0..y.ncols() {
                let z: f64 = rng.sample(StandardNormal);
                y[(row, j)] += sigma * z;
            }
        }
        y
    }

    /// Draw a dataset. Training draws come from stream 0 of `seed`, test draws
    /// from stream 1; σ is calibrated on the training signal and reused for test.
    pub fn generate(&self, seed: u64) -> Result<Dataset> {
        let mut train_rng = substream(seed, TRAIN_STREAM);
        let train_xi = self.draw_xi(&mut train_rng, self.config.n);
        let train_signal = self.signal(&train_xi);
        let NoiseCalibration {
            sigma,
            zero_variance,
        } = calibrate_noise(&train_signal, self.config.snr)?;
        let train_y = Self::add_noise(&mut train_rng, &train_signal, sigma);

        let mut test_rng = substream(seed, TEST_STREAM);
        let test_xi = self.draw_xi(&mut test_rng, self.config.n_test);
        let test_signal = self.signal(&test_xi);
        let test_y = Self::add_noise(&mut test_rng, &test_signal, sigma);

        Ok(Dataset {
            train_x: self.sample_grid(&train_xi),
            train_y,
            train_signal,
            train_xi,
            test_x: self.sample_grid(&test_xi),
            test_y,
            test_signal,
            test_xi,
            input_measure: self.input.clone(),
            output_measure: self.output.clone(),
            sigma,
            zero_variance_signal: zero_variance,
            seed,
            config: self.config.clone(),
        })
    }
}

/// One dataset from `config`, seeded by `config.base_seed`.
pub fn generate_dataset(config: &SimulationConfig, beta: &CoefficientSurface) -> Result<Dataset> {
    DataGenerator::new(config, beta)?.generate(config.base_seed)
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().copied().collect())
        .collect()
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema_version: &'static str,
    config: &'a SimulationConfig,
    seed: u64,
    sigma: f64,
    zero_variance_signal: bool,
    input_measure: &'a GridMeasure,
    output_measure: &'a GridMeasure,
    train_xi: Vec<Vec<f64>>,
    test_xi: Vec<Vec<f64>>,
}

fn write_matrix(path: &Path, grid: &[f64], m: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["sample".to_string()];
    header.extend(grid.iter().map(|g| g.to_string()));
    w.write_record(&header)?;
    for r in 0..m.nrows() {
        let mut rec = vec![r.to_string()];
        rec.extend(m.row(r).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

impl Dataset {
    pub fn n_train(&self) -> usize {
        self.train_x.nrows()
    }

    pub fn n_test(&self) -> usize {
        self.test_x.nrows()
    }

    /// Test predictors as KL coefficient vectors.
    pub fn test_predictors(&self) -> Vec<Vec<f64>> {
        rows(&self.test_xi)
    }

    pub fn train_predictors(&self) -> Vec<Vec<f64>> {
        rows(&self.train_xi)
    }

    /// `train_X.csv`, `train_Y.csv`, `test_X.csv`, `test_Y.csv` (one row per
    /// sample, one column per grid point) plus `dataset.json`.
    pub fn export(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let s = self.input_measure.points();
        let t = self.output_measure.points();
        write_matrix(&dir.join("train_X.csv"), s, &self.train_x)?;
        write_matrix(&dir.join("train_Y.csv"), t, &self.train_y)?;
        write_matrix(&dir.join("test_X.csv"), s, &self.test_x)?;
        write_matrix(&dir.join("test_Y.csv"), t, &self.test_y)?;
        let sidecar = Sidecar {
            schema_version: DATASET_SCHEMA_VERSION,
            config: &self.config,
            seed: self.seed,
            sigma: self.sigma,
            zero_variance_signal: self.zero_variance_signal,
            input_measure: &self.input_measure,
            output_measure: &self.output_measure,
            train_xi: rows(&self.train_xi),
            test_xi: rows(&self.test_xi),
        };
        std::fs::write(
            dir.join("dataset.json"),
            serde_json::to_string_pretty(&sidecar)?,
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::apply_operator;

    fn small() -> SimulationConfig {
        SimulationConfig {
            p: 8,
            n: 30,
            n_test: 10,
            k: 5,
            p_ref: 64,
            ..SimulationConfig::default()
        }
    }

    #[test]
    fn zero_operator_noiseless_gives_zero_responses() {
        let mut c = small();
        c.snr = f64::INFINITY;
        let d = generate_dataset(&c, &CoefficientSurface::Constant(0.0)).unwrap();
        assert!(d.train_y.iter().all(|&v| v == 0.0));
        assert!(d.test_y.iter().all(|&v| v == 0.0));
        assert_eq!(d.sigma, 0.0);
        assert!(d.zero_variance_signal);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let c = small();
        let b = CoefficientSurface::default_truth();
        let a = generate_dataset(&c, &b).unwrap();
        let again = generate_dataset(&c, &b).unwrap();
        assert_eq!(a, again);
        let mut c2 = c.clone();
        c2.base_seed += 1;
        assert_ne!(generate_dataset(&c2, &b).unwrap().train_y, a.train_y);
    }

    #[test]
    fn dimensions_follow_config() {
        let mut c = small();
        c.q = Some(5);
        let d = generate_dataset(&c, &CoefficientSurface::default_truth()).unwrap();
        assert_eq!(d.train_x.shape(), (30, 8));
        assert_eq!(d.train_y.shape(), (30, 5));
        assert_eq!(d.test_x.shape(), (10, 8));
        assert_eq!(d.test_y.shape(), (10, 5));
        assert_eq!(d.test_xi.shape(), (10, 5));
        assert!(d.sigma > 0.0);
    }

    #[test]
    fn coarse_equals_reference_when_grids_coincide() {
        let mut c = small();
        c.p = 64;
        c.q = Some(7);
        c.snr = f64::INFINITY;
        let beta = CoefficientSurface::default_truth();
        let d = generate_dataset(&c, &beta).unwrap();
        let process = KlProcess::new(c.k).unwrap();
        for (row, xi) in d.train_predictors().iter().enumerate() {
            for (j, &t) in d.output_measure.points().iter().enumerate() {
                let direct =
                    apply_operator(&beta, |s| process.evaluate(xi, s), &d.input_measure, t).unwrap();
                assert!((d.train_y[(row, j)] - direct).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn grid_values_match_pointwise_evaluation() {
        let d = generate_dataset(&small(), &CoefficientSurface::default_truth()).unwrap();
        let process = KlProcess::new(5).unwrap();
        let xi = d.train_predictors();
        for (i, &s) in d.input_measure.points().iter().enumerate() {
            assert_eq!(d.train_x[(3, i)], process.evaluate(&xi[3], s));
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let mut c = small();
        c.k = 0;
        assert!(generate_dataset(&c, &CoefficientSurface::default_truth()).is_err());
    }

    #[test]
    fn export_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let d = generate_dataset(&small(), &CoefficientSurface::default_truth()).unwrap();
        d.export(dir.path()).unwrap();
        for f in ["train_X.csv", "train_Y.csv", "test_X.csv", "test_Y.csv", "dataset.json"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let text = std::fs::read_to_string(dir.path().join("test_Y.csv")).unwrap();
        assert_eq!(text.lines().count(), 11);
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("dataset.json")).unwrap())
                .unwrap();
        assert_eq!(json["schema_version"], DATASET_SCHEMA_VERSION);
        assert_eq!(json["test_xi"].as_array().unwrap().len(), 10);
    }
}
