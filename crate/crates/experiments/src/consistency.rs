//! Empirical consistency of the coefficient-matrix estimate as `n` grows.

use rayon::prelude::*;

use opmeasure_core::estimate::build_design;
use opmeasure_core::metrics::loglog_slope;
use opmeasure_core::operator::{discretize_kernel, Convention};
use opmeasure_core::simulate::seed::cell_seed;
use opmeasure_core::simulate::DataGenerator;
use opmeasure_core::{Error, Result, SimulationConfig};

pub const DEFAULT_CONSISTENCY_VALUES: [u64; 3] = [100, 1_000, 10_000];

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyPoint {
    pub n: u64,
    /// Mean over replications of `‖B̂ − B_true‖_F`, `√w`-weighted convention.
    pub mean_frobenius: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyResult {
    pub points: Vec<ConsistencyPoint>,
    pub slope: f64,
}

impl ConsistencyResult {
    pub fn strictly_decreasing(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].mean_frobenius < w[0].mean_frobenius)
    }

    /// Last mean divided by the first.
    pub fn final_ratio(&self) -> f64 {
        self.points.last().map_or(f64::NAN, |l| l.mean_frobenius) / self.points[0].mean_frobenius
    }
}

/// Fit the configured estimator at each `n` and compare with the discretized
/// truth `B_ij = √w_i·β(s_i, t_j)`.
pub fn run_consistency(config: &SimulationConfig, n_values: &[u64]) -> Result<ConsistencyResult> {
    if n_values.len() < 2 {
        return Err(Error::Config("consistency slope: need >= 2 points".into()));
    }
    config.validate()?;
    let truth = config.beta.build();
    let estimator = config.estimator.build()?;
    let generators = n_values
        .iter()
        .map(|&n| {
            let mut c = config.clone();
            c.n = n as usize;
            DataGenerator::new(&c, &truth)
        })
        .collect::<Result<Vec<_>>>()?;
    let output_points = generators[0].output_measure().points().to_vec();
    let b_true = discretize_kernel(
        &truth,
        generators[0].input_measure(),
        &output_points,
        Convention::SqrtWWeighted,
    )?;

    let cells: Vec<(usize, usize)> = (0..n_values.len())
        .flat_map(|i| (0..config.reps).map(move |r| (i, r)))
        .collect();
    let errors = cells
        .par_iter()
        .map(|&(i, rep)| {
            let seed = cell_seed(config.base_seed, n_values[i], rep as u64);
            let data = generators[i].generate(seed)?;
            let fit = estimator.fit(&build_design(&data)?, &data.train_y)?;
            Ok((fit.coefficients.values() - b_true.values()).norm())
        })
        .collect::<Result<Vec<f64>>>()?;

    let points: Vec<ConsistencyPoint> = n_values
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let chunk = &errors[i * config.reps..(i + 1) * config.reps];
            ConsistencyPoint {
                n,
                mean_frobenius: chunk.iter().sum::<f64>() / config.reps as f64,
                reps: config.reps,
            }
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_frobenius).collect();
    let slope = loglog_slope(&xs, &ys)?;
    Ok(ConsistencyResult { points, slope })
}
