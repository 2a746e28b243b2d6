//! Error measures for a fitted operator: coefficient error (ISE), operator
//! error (OpErr), discretization error (DiscErr), prediction error (RMSE),
//! plus the log–log slope used to read off convergence rates.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::GridMeasure;
use crate::operator::{CoefficientSurface, Kernel, TabulatedSurface};
use crate::simulate::KlProcess;

/// Per-fit metrics. `cond_number` may be `+∞`; every other field is finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub ise: f64,
    pub op_err: f64,
    pub disc_err: f64,
    pub rmse: f64,
    pub cond_number: f64,
    pub sigma: f64,
    pub effective_rank: usize,
}

fn on_grid<'a>(
    beta_hat: &'a CoefficientSurface,
    input: &GridMeasure,
    output: &GridMeasure,
) -> Result<&'a TabulatedSurface> {
    let tab = beta_hat.as_tabulated().ok_or_else(|| {
        Error::InvalidArgument("estimated surface must be tabulated".into())
    })?;
    if tab.inputs() != input.points() || tab.outputs() != output.points() {
        return Err(Error::DimensionMismatch(
            "estimated surface is not tabulated on the measure grids".into(),
        ));
    }
    Ok(tab)
}

fn difference_table<K: Kernel + ?Sized>(tab: &TabulatedSurface, beta: &K) -> Result<DMatrix<f64>> {
    let mut d = tab.values().clone();
    for (i, &s) in tab.inputs().iter().enumerate() {
        for (j, &t) in tab.outputs().iter().enumerate() {
            d[(i, j)] -= beta.eval(s, t)?;
        }
    }
    Ok(d)
}

/// `Σ_{i,j} w_i v_j (β̂(s_i,t_j) − β(s_i,t_j))²`.
pub fn ise<K: Kernel + ?Sized>(
    beta_hat: &CoefficientSurface,
    beta: &K,
    input: &GridMeasure,
    output: &GridMeasure,
) -> Result<f64> {
    let tab = on_grid(beta_hat, input, output)?;
    let d = difference_table(tab, beta)?;
    let mut acc = 0.0;
    for (i, &w) in input.weights().iter().enumerate() {
        for (j, &v) in output.weights().iter().enumerate() {
            acc += w * v * d[(i, j)] * d[(i, j)];
        }
    }
    Ok(acc)
}

/// Root mean over test predictors of `Σ_j v_j (Ŷ_signal(t_j) − Y_signal(t_j))²`,
/// both signals taken under the same coarse input measure.
pub fn op_err<K: Kernel + ?Sized>(
    beta_hat: &CoefficientSurface,
    beta: &K,
    test_predictors: &[Vec<f64>],
    process: &KlProcess,
    input: &GridMeasure,
    output: &GridMeasure,
) -> Result<f64> {
    let fns: Vec<_> = test_predictors
        .iter()
        .map(|xi| move |s: f64| process.evaluate(xi, s))
        .collect();
    op_err_direct(beta_hat, beta, &fns, input, output)
}

/// [`op_err`] for arbitrary predictor functions.
pub fn op_err_direct<K, X>(
    beta_hat: &CoefficientSurface,
    beta: &K,
    predictors: &[X],
    input: &GridMeasure,
    output: &GridMeasure,
) -> Result<f64>
where
    K: Kernel + ?Sized,
    X: Fn(f64) -> f64,
{
    if predictors.is_empty() {
        return Err(Error::InvalidArgument("empty test set".into()));
    }
    let tab = on_grid(beta_hat, input, output)?;
    let d = difference_table(tab, beta)?;
    let mut total = 0.0;
    let mut x = vec![0.0; input.len()];
    for f in predictors {
        for (slot, &s) in x.iter_mut().zip(input.points()) {
            *slot = f(s);
        }
        for (j, &v) in output.weights().iter().enumerate() {
            let mut diff = 0.0;
            for (i, &w) in input.weights().iter().enumerate() {
                diff += w * d[(i, j)] * x[i];
            }
            total += v * diff * diff;
        }
    }
    Ok((total / predictors.len() as f64).sqrt())
}

/// Gap between the reference and coarse operators applied to each KL basis
/// function, tabulated at the output points. Reusable across test sets that
/// share grids, truth and process.
#[derive(Debug, Clone)]
pub struct DiscretizationGap {
    gap: DMatrix<f64>,
}

impl DiscretizationGap {
    pub fn new<K: Kernel + ?Sized>(
        beta: &K,
        process: &KlProcess,
        coarse: &GridMeasure,
        reference: &GridMeasure,
        output_points: &[f64],
    ) -> Result<Self> {
        if beta.is_tabulated() {
            return Err(Error::InvalidArgument(
                "discretization error needs an analytic surface".into(),
            ));
        }
        if output_points.is_empty() {
            return Err(Error::InvalidArgument("no output points".into()));
        }
        let k = process.truncation();
        let project = |m: &GridMeasure| -> Result<DMatrix<f64>> {
            let basis = process.basis_table(m.points());
            let mut g = DMatrix::zeros(k, output_points.len());
            for (j, &t) in output_points.iter().enumerate() {
                let column = m
                    .points()
                    .iter()
                    .map(|&s| beta.eval(s, t))
                    .collect::<Result<Vec<_>>>()?;
                for kk in 0..k {
                    let mut acc = 0.0;
                    for (i, &w) in m.weights().iter().enumerate() {
                        acc += w * (column[i] * basis[(kk, i)]);
                    }
                    g[(kk, j)] = acc;
                }
            }
            Ok(g)
        };
        let gap = project(reference)? - project(coarse)?;
        Ok(DiscretizationGap { gap })
    }

    pub fn disc_err(&self, test_predictors: &[Vec<f64>]) -> Result<f64> {
        if test_predictors.is_empty() {
            return Err(Error::InvalidArgument("empty test set".into()));
        }
        let m = self.gap.ncols() as f64;
        let mut total = 0.0;
        for xi in test_predictors {
            if xi.len() != self.gap.nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "predictor has {} coefficients, process has {}",
                    xi.len(),
                    self.gap.nrows()
                )));
            }
            for j in 0..self.gap.ncols() {
                let mut diff = 0.0;
                for (kk, &c) in xi.iter().enumerate() {
                    diff += c * self.gap[(kk, j)];
                }
                total += diff * diff / m;
            }
        }
        Ok((total / test_predictors.len() as f64).sqrt())
    }
}

/// Root mean over test predictors of `(1/m) Σ_j ((T^{ref} X)(t_j) − (T^{coarse} X)(t_j))²`
/// over the `m` output points (the reference output grid in the studies).
pub fn disc_err<K: Kernel + ?Sized>(
    beta: &K,
    test_predictors: &[Vec<f64>],
    process: &KlProcess,
    coarse: &GridMeasure,
    reference: &GridMeasure,
    output_points: &[f64],
) -> Result<f64> {
    DiscretizationGap::new(beta, process, coarse, reference, output_points)?.disc_err(test_predictors)
}

/// [`disc_err`] for arbitrary predictor functions, by direct summation.
pub fn disc_err_direct<K, X>(
    beta: &K,
    predictors: &[X],
    coarse: &GridMeasure,
    reference: &GridMeasure,
    output_points: &[f64],
) -> Result<f64>
where
    K: Kernel + ?Sized,
    X: Fn(f64) -> f64,
{
    if beta.is_tabulated() {
        return Err(Error::InvalidArgument(
            "discretization error needs an analytic surface".into(),
        ));
    }
    if predictors.is_empty() || output_points.is_empty() {
        return Err(Error::InvalidArgument("empty test set or output grid".into()));
    }
    let m = output_points.len() as f64;
    let mut total = 0.0;
    for x in predictors {
        for &t in output_points {
            let fine = crate::operator::apply_operator(beta, x, reference, t)?;
            let rough = crate::operator::apply_operator(beta, x, coarse, t)?;
            total += (fine - rough) * (fine - rough) / m;
        }
    }
    Ok((total / predictors.len() as f64).sqrt())
}

/// Root mean square over every entry.
pub fn rmse(y: &DMatrix<f64>, y_hat: &DMatrix<f64>) -> Result<f64> {
    if y.shape() != y_hat.shape() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            y.shape(),
            y_hat.shape()
        )));
    }
    if y.is_empty() {
        return Err(Error::InvalidArgument("empty response matrix".into()));
    }
    let ss: f64 = y.iter().zip(y_hat.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((ss / y.len() as f64).sqrt())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} x values, {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("need >= 2 points for a slope".into()));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "log-log slope needs finite positive values".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("x values are all equal".into()));
    }
    Ok(sxy / sxx)
}
