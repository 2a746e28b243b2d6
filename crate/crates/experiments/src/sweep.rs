//! Replicated sweeps over grid size or sample size.
//!
//! Cells run in parallel on the current rayon pool. Each cell `(value, rep)`
//! draws from its own seed `cell_seed(base_seed, value, rep)`, and rows are
//! gathered back in `(value, rep, estimator)` order, so output does not depend
//! on the number of threads.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use opmeasure_core::estimate::{Estimator, EstimatorConfig};
use opmeasure_core::metrics::loglog_slope;
use opmeasure_core::simulate::seed::cell_seed;
use opmeasure_core::{Error, Result, SimulationConfig};

use crate::cell::{run_cell, CellContext};

pub const DEFAULT_GRID_VALUES: [u64; 6] = [10, 20, 40, 80, 160, 320];
pub const DEFAULT_SAMPLE_VALUES: [u64; 6] = [50, 100, 200, 400, 800, 1600];
pub const DEFAULT_CONDITIONING_VALUES: [u64; 4] = [10, 20, 40, 80];
pub const DEFAULT_RIDGE_LAMBDA: f64 = 1e-3;

/// One line of `results.csv`, columns in file order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub sweep_var: String,
    pub sweep_value: u64,
    pub estimator: String,
    pub lambda: f64,
    pub rep: usize,
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub sigma: f64,
    pub disc_err: f64,
    pub op_err: f64,
    pub ise: f64,
    pub rmse: f64,
    pub cond_number: f64,
    pub effective_rank: usize,
    pub seed: u64,
}

pub const RESULT_COLUMNS: [&str; 17] = [
    "experiment",
    "sweep_var",
    "sweep_value",
    "estimator",
    "lambda",
    "rep",
    "p",
    "q",
    "n",
    "sigma",
    "disc_err",
    "op_err",
    "ise",
    "rmse",
    "cond_number",
    "effective_rank",
    "seed",
];

/// Replication means for one `(sweep value, estimator)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub sweep_value: u64,
    pub estimator: String,
    pub lambda: f64,
    pub reps: usize,
    pub sigma: f64,
    pub sigma_sq: f64,
    pub disc_err: f64,
    pub op_err: f64,
    pub op_err_sq: f64,
    pub ise: f64,
    pub rmse: f64,
    pub rmse_sq: f64,
    pub cond_number: f64,
    pub effective_rank: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub experiment: String,
    pub sweep_var: String,
    pub rows: Vec<ResultRow>,
    pub aggregates: Vec<AggregateRow>,
    /// Study-specific summary numbers (fitted slopes, noise floor, ...).
    pub diagnostics: BTreeMap<String, f64>,
}

impl SweepResult {
    pub fn aggregates_for(&self, estimator: &str, lambda: f64) -> Vec<&AggregateRow> {
        self.aggregates
            .iter()
            .filter(|a| a.estimator == estimator && a.lambda == lambda)
            .collect()
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    sum / count as f64
}

/// Means over replications, in ascending replication order.
pub fn aggregate(rows: &[ResultRow]) -> Vec<AggregateRow> {
    type Key = (u64, String, u64);
    let mut groups: Vec<(Key, Vec<&ResultRow>)> = Vec::new();
    for r in rows {
        let key = (r.sweep_value, r.estimator.clone(), r.lambda.to_bits());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|((value, estimator, _), mut g)| {
            g.sort_by_key(|r| r.rep);
            AggregateRow {
                sweep_value: value,
                estimator,
                lambda: g[0].lambda,
                reps: g.len(),
                sigma: mean(g.iter().map(|r| r.sigma)),
                sigma_sq: mean(g.iter().map(|r| r.sigma * r.sigma)),
                disc_err: mean(g.iter().map(|r| r.disc_err)),
                op_err: mean(g.iter().map(|r| r.op_err)),
                op_err_sq: mean(g.iter().map(|r| r.op_err * r.op_err)),
                ise: mean(g.iter().map(|r| r.ise)),
                rmse: mean(g.iter().map(|r| r.rmse)),
                rmse_sq: mean(g.iter().map(|r| r.rmse * r.rmse)),
                cond_number: mean(g.iter().map(|r| r.cond_number)),
                effective_rank: mean(g.iter().map(|r| r.effective_rank as f64)),
            }
        })
        .collect()
}

fn build_estimators(list: &[EstimatorConfig]) -> Result<Vec<(EstimatorConfig, Box<dyn Estimator>)>> {
    list.iter().map(|c| Ok((c.clone(), c.build()?))).collect()
}

/// Generic replicated sweep. `apply` sets the swept quantity on a copy of the
/// base config for each value.
pub fn run_sweep<F>(
    experiment: &str,
    sweep_var: &str,
    base: &SimulationConfig,
    values: &[u64],
    estimators: &[EstimatorConfig],
    apply: F,
) -> Result<SweepResult>
where
    F: Fn(&mut SimulationConfig, u64) + Sync,
{
    if values.is_empty() {
        return Err(Error::Config("sweep has no values".into()));
    }
    if estimators.is_empty() {
        return Err(Error::Config("no estimators given".into()));
    }
    base.validate()?;
    let ests = build_estimators(estimators)?;
    let contexts = values
        .par_iter()
        .map(|&v| {
            let mut cfg = base.clone();
            apply(&mut cfg, v);
            CellContext::new(cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|vi| (0..base.reps).map(move |r| (vi, r)))
        .collect();
    let per_cell = cells
        .par_iter()
        .map(|&(vi, rep)| {
            let ctx = &contexts[vi];
            let value = values[vi];
            let seed = cell_seed(base.base_seed, value, rep as u64);
            let (data, outcomes) = run_cell(ctx, &ests, seed)?;
            Ok(outcomes
                .into_iter()
                .map(|o| ResultRow {
                    experiment: experiment.to_string(),
                    sweep_var: sweep_var.to_string(),
                    sweep_value: value,
                    estimator: o.estimator.name.clone(),
                    lambda: o.estimator.reported_lambda(),
                    rep,
                    p: ctx.config.p,
                    q: ctx.config.output_size(),
                    n: data.n_train(),
                    sigma: o.metrics.sigma,
                    disc_err: o.metrics.disc_err,
                    op_err: o.metrics.op_err,
                    ise: o.metrics.ise,
                    rmse: o.metrics.rmse,
                    cond_number: o.metrics.cond_number,
                    effective_rank: o.metrics.effective_rank,
                    seed,
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ResultRow> = per_cell.into_iter().flatten().collect();
    let aggregates = aggregate(&rows);
    Ok(SweepResult {
        experiment: experiment.to_string(),
        sweep_var: sweep_var.to_string(),
        rows,
        aggregates,
        diagnostics: BTreeMap::new(),
    })
}

fn check_reference(config: &SimulationConfig, largest_p: u64) -> Result<()> {
    if (config.p_ref as u64) < 4 * largest_p {
        return Err(Error::Config(format!(
            "reference grid p_ref = {} must be at least 4 x the largest p ({largest_p})",
            config.p_ref
        )));
    }
    Ok(())
}

fn slope_of(aggs: &[&AggregateRow], f: impl Fn(&AggregateRow) -> f64) -> Result<f64> {
    let xs: Vec<f64> = aggs.iter().map(|a| a.sweep_value as f64).collect();
    let ys: Vec<f64> = aggs.iter().map(|a| f(a)).collect();
    loglog_slope(&xs, &ys)
}

/// DiscErr, OpErr, ISE and RMSE as the grid is refined (`q = p` unless fixed).
pub fn run_grid_sweep(config: &SimulationConfig, p_values: &[u64]) -> Result<SweepResult> {
    let largest = p_values.iter().copied().max().unwrap_or(0);
    check_reference(config, largest)?;
    let mut res = run_sweep(
        "grid-sweep",
        "p",
        config,
        p_values,
        std::slice::from_ref(&config.estimator),
        |c, v| c.p = v as usize,
    )?;
    if p_values.len() >= 2 {
        let aggs: Vec<&AggregateRow> = res.aggregates.iter().collect();
        if aggs.iter().all(|a| a.disc_err > 0.0) {
            res.diagnostics
                .insert("disc_err_slope".into(), slope_of(&aggs, |a| a.disc_err)?);
        }
    }
    Ok(res)
}

/// OpErr and RMSE as the training sample grows at fixed `p`.
pub fn run_sample_sweep(config: &SimulationConfig, n_values: &[u64]) -> Result<SweepResult> {
    check_reference(config, config.p as u64)?;
    if n_values.len() < 2 {
        return Err(Error::Config("sample sweep slope: need >= 2 points".into()));
    }
    let mut res = run_sweep(
        "sample-sweep",
        "n",
        config,
        n_values,
        std::slice::from_ref(&config.estimator),
        |c, v| c.n = v as usize,
    )?;
    let aggs: Vec<&AggregateRow> = res.aggregates.iter().collect();
    let slope = slope_of(&aggs, |a| a.op_err)?;
    let last = aggs.last().expect("at least two sweep values");
    res.diagnostics.insert("op_err_slope".into(), slope);
    res.diagnostics.insert("noise_floor".into(), last.sigma);
    res.diagnostics.insert("rmse_at_largest_n".into(), last.rmse);
    Ok(res)
}

/// Paired OLS / ridge fits on the same datasets across grid sizes.
pub fn run_conditioning(
    config: &SimulationConfig,
    p_values: &[u64],
    estimators: &[EstimatorConfig],
) -> Result<SweepResult> {
    let largest = p_values.iter().copied().max().unwrap_or(0);
    check_reference(config, largest)?;
    if !estimators.iter().any(|e| e.name == "ols") || !estimators.iter().any(|e| e.name == "ridge") {
        return Err(Error::Config(
            "conditioning study needs ols and at least one ridge estimator".into(),
        ));
    }
    run_sweep("conditioning", "p", config, p_values, estimators, |c, v| {
        c.p = v as usize
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SimulationConfig {
        SimulationConfig {
            n: 40,
            n_test: 10,
            k: 6,
            p_ref: 256,
            reps: 3,
            ..SimulationConfig::default()
        }
    }

    #[test]
    fn grid_sweep_shape() {
        let res = run_grid_sweep(&tiny(), &[8, 16]).unwrap();
        assert_eq!(res.rows.len(), 6);
        assert_eq!(res.aggregates.len(), 2);
        assert_eq!(res.rows[0].sweep_value, 8);
        assert_eq!(res.rows[3].sweep_value, 16);
        assert!(res.rows.iter().all(|r| r.p == r.q));
        assert!(res.diagnostics.contains_key("disc_err_slope"));
    }

    #[test]
    fn reference_grid_must_be_fine_enough() {
        let err = run_grid_sweep(&tiny(), &[8, 128]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn sample_sweep_needs_two_points() {
        let err = run_sample_sweep(&tiny(), &[50]).unwrap_err();
        assert!(err.to_string().contains("need >= 2 points"));
    }

    #[test]
    fn conditioning_needs_both_estimators() {
        assert!(run_conditioning(&tiny(), &[8], &[EstimatorConfig::ols()]).is_err());
        let res = run_conditioning(
            &tiny(),
            &[8],
            &[EstimatorConfig::ols(), EstimatorConfig::ridge(1e-3)],
        )
        .unwrap();
        assert_eq!(res.rows.len(), 6);
        assert_eq!(res.rows[0].estimator, "ols");
        assert_eq!(res.rows[1].estimator, "ridge");
        assert_eq!(res.rows[0].seed, res.rows[1].seed);
        assert_eq!(res.aggregates.len(), 2);
    }

    #[test]
    fn aggregates_are_row_means() {
        let res = run_grid_sweep(&tiny(), &[8]).unwrap();
        let a = &res.aggregates[0];
        let m = res.rows.iter().map(|r| r.op_err).sum::<f64>() / 3.0;
        assert_eq!(a.op_err, m);
        assert_eq!(a.reps, 3);
    }
}
