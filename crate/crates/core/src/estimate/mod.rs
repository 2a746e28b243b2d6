//! Least-squares estimation of the discretized operator.
//!
//! Samples are turned into a `√w`-scaled design so that `XᵀX / n` is the
//! empirical Gram operator in `L²(μ_X)`. Estimators live behind the
//! [`Estimator`] trait and are looked up by name in an [`EstimatorRegistry`];
//! both builtin estimators return coefficients in the `√w`-weighted convention.

mod ols;
mod ridge;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use ols::Ols;
pub use ridge::Ridge;

use crate::error::{Error, Result};
use crate::measures::GridMeasure;
use crate::operator::{CoefficientMatrix, CoefficientSurface, Convention, TabulatedSurface};
use crate::simulate::Dataset;

pub const DEFAULT_PINV_RTOL: f64 = 1e-12;

/// A `√w`-scaled design together with the grids it lives on.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    matrix: DMatrix<f64>,
    input_measure: GridMeasure,
    output_points: Vec<f64>,
}

impl Design {
    /// Wrap an already-scaled design matrix.
    pub fn new(matrix: DMatrix<f64>, input_measure: GridMeasure, output_points: Vec<f64>) -> Result<Self> {
        if matrix.ncols() != input_measure.len() {
            return Err(Error::DimensionMismatch(format!(
                "design has {} columns, measure has {} atoms",
                matrix.ncols(),
                input_measure.len()
            )));
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidArgument("design has no rows".into()));
        }
        Ok(Design {
            matrix,
            input_measure,
            output_points,
        })
    }

    /// Scale raw samples `X_k(s_i)` into entries `√w_i·X_k(s_i)`.
    pub fn from_samples(samples: &DMatrix<f64>, input_measure: &GridMeasure, output_points: &[f64]) -> Result<Self> {
        if samples.ncols() != input_measure.len() {
            return Err(Error::DimensionMismatch(format!(
                "samples have {} columns, measure has {} atoms",
                samples.ncols(),
                input_measure.len()
            )));
        }
        let mut m = samples.clone();
        for (i, &w) in input_measure.weights().iter().enumerate() {
            m.column_mut(i).scale_mut(w.sqrt());
        }
        Design::new(m, input_measure.clone(), output_points.to_vec())
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn input_measure(&self) -> &GridMeasure {
        &self.input_measure
    }

    pub fn output_points(&self) -> &[f64] {
        &self.output_points
    }

    fn check_response(&self, y: &DMatrix<f64>) -> Result<()> {
        if y.nrows() != self.matrix.nrows() || y.ncols() != self.output_points.len() {
            return Err(Error::DimensionMismatch(format!(
                "response is {}x{}, expected {}x{}",
                y.nrows(),
                y.ncols(),
                self.matrix.nrows(),
                self.output_points.len()
            )));
        }
        Ok(())
    }
}

/// Training design of a dataset.
pub fn build_design(dataset: &Dataset) -> Result<Design> {
    Design::from_samples(
        &dataset.train_x,
        &dataset.input_measure,
        dataset.output_measure.points(),
    )
}

/// Test design of a dataset, scaled the same way.
pub fn build_test_design(dataset: &Dataset) -> Result<Design> {
    Design::from_samples(
        &dataset.test_x,
        &dataset.input_measure,
        dataset.output_measure.points(),
    )
}

/// An estimate plus the diagnostics that came with it.
#[derive(Debug, Clone)]
pub struct Fit {
    pub coefficients: CoefficientMatrix,
    /// Singular directions used. Ridge never truncates and reports the column count.
    pub effective_rank: usize,
    /// Design singular values when the estimator computed them (OLS), else empty.
    pub singular_values: Vec<f64>,
}

pub trait Estimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn fit(&self, design: &Design, y: &DMatrix<f64>) -> Result<Fit>;
}

/// Serializable estimator choice, resolved through [`EstimatorRegistry`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub name: String,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_rtol")]
    pub pinv_rtol: f64,
}

fn default_rtol() -> f64 {
    DEFAULT_PINV_RTOL
}

impl EstimatorConfig {
    pub fn ols() -> Self {
        EstimatorConfig {
            name: "ols".into(),
            lambda: 0.0,
            pinv_rtol: DEFAULT_PINV_RTOL,
        }
    }

    pub fn ridge(lambda: f64) -> Self {
        EstimatorConfig {
            name: "ridge".into(),
            lambda,
            pinv_rtol: DEFAULT_PINV_RTOL,
        }
    }

    pub fn with_rtol(mut self, pinv_rtol: f64) -> Self {
        self.pinv_rtol = pinv_rtol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }

    pub fn build(&self) -> Result<Box<dyn Estimator>> {
        EstimatorRegistry::builtin().build(self)
    }

    /// Penalty as reported in result tables (0 for unpenalized estimators).
    pub fn reported_lambda(&self) -> f64 {
        if self.name == "ridge" {
            self.lambda
        } else {
            0.0
        }
    }
}

pub type EstimatorFactory = fn(&EstimatorConfig) -> Result<Box<dyn Estimator>>;

fn make_ols(cfg: &EstimatorConfig) -> Result<Box<dyn Estimator>> {
    if !(cfg.pinv_rtol > 0.0 && cfg.pinv_rtol < 1.0) {
        return Err(Error::Config(format!(
            "pinv_rtol must lie in (0, 1), got {}",
            cfg.pinv_rtol
        )));
    }
    Ok(Box::new(Ols {
        pinv_rtol: cfg.pinv_rtol,
    }))
}

fn make_ridge(cfg: &EstimatorConfig) -> Result<Box<dyn Estimator>> {
    Ridge::new(cfg.lambda)
        .map(|r| Box::new(r) as Box<dyn Estimator>)
        .map_err(|e| Error::Config(e.to_string()))
}

/// Name → estimator factory.
#[derive(Clone, Default)]
pub struct EstimatorRegistry {
    factories: BTreeMap<&'static str, EstimatorFactory>,
}

impl EstimatorRegistry {
    pub fn builtin() -> Self {
        let mut r = EstimatorRegistry::default();
        r.register("ols", make_ols);
        r.register("ridge", make_ridge);
        r
    }

    pub fn register(&mut self, name: &'static str, factory: EstimatorFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn build(&self, cfg: &EstimatorConfig) -> Result<Box<dyn Estimator>> {
        let factory = self
            .factories
            .get(cfg.name.as_str())
            .ok_or_else(|| Error::Config(format!("unknown estimator `{}`", cfg.name)))?;
        factory(cfg)
    }
}

/// OLS with the configured truncation threshold.
pub fn ols_fit(design: &Design, y: &DMatrix<f64>, config: &EstimatorConfig) -> Result<Fit> {
    make_ols(config)?.fit(design, y)
}

pub fn ridge_fit(design: &Design, y: &DMatrix<f64>, lambda: f64) -> Result<Fit> {
    Ridge::new(lambda)?.fit(design, y)
}

/// `β̂(s_i, t_j) = B̂_ij / √w_i` as a tabulated surface on the estimation grid.
pub fn recover_beta(b_hat: &CoefficientMatrix, input_measure: &GridMeasure) -> Result<CoefficientSurface> {
    if b_hat.convention() != Convention::SqrtWWeighted {
        return Err(Error::ConventionMismatch {
            expected: Convention::SqrtWWeighted.name(),
            found: b_hat.convention().name(),
        });
    }
    if b_hat.input_measure() != input_measure {
        return Err(Error::DimensionMismatch(
            "coefficient matrix was estimated under a different input measure".into(),
        ));
    }
    let raw = b_hat.convert(Convention::Raw);
    let tab = TabulatedSurface::new(
        input_measure.points().to_vec(),
        b_hat.output_points().to_vec(),
        raw.into_values(),
    )?;
    Ok(CoefficientSurface::Tabulated(tab))
}

/// `Ŷ = X_test·B̂` for a `√w`-scaled test design.
pub fn predict(b_hat: &CoefficientMatrix, design_test: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if b_hat.convention() != Convention::SqrtWWeighted {
        return Err(Error::ConventionMismatch {
            expected: Convention::SqrtWWeighted.name(),
            found: b_hat.convention().name(),
        });
    }
    if design_test.ncols() != b_hat.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "test design has {} columns, coefficients have {} rows",
            design_test.ncols(),
            b_hat.nrows()
        )));
    }
    Ok(design_test * b_hat.values())
}

/// `κ(XᵀX) = (σ_max / σ_min)²` over every singular value of the design, with
/// no truncation. Returns `f64::INFINITY` when the Gram is exactly singular:
/// `σ_min = 0`, fewer rows than columns, or a zero or repeated column.
pub fn condition_number(design: &DMatrix<f64>) -> Result<f64> {
    if design.is_empty() {
        return Err(Error::InvalidArgument("design is empty".into()));
    }
    if exactly_singular_gram(design) {
        return Ok(f64::INFINITY);
    }
    let dec = ols::svd(design, false)?;
    Ok(condition_from_singular_values(dec.singular_values.as_slice()))
}

/// [`condition_number`] with the design's singular values already at hand.
pub fn condition_number_given(design: &DMatrix<f64>, singular_values: &[f64]) -> f64 {
    if exactly_singular_gram(design) {
        f64::INFINITY
    } else {
        condition_from_singular_values(singular_values)
    }
}

/// `(σ_max / σ_min)²`, infinite when `σ_min` is exactly zero.
pub fn condition_from_singular_values(sv: &[f64]) -> f64 {
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smin == 0.0 || sv.is_empty() {
        f64::INFINITY
    } else {
        let r = smax / smin;
        r * r
    }
}

fn exactly_singular_gram(m: &DMatrix<f64>) -> bool {
    if m.nrows() < m.ncols() {
        return true;
    }
    let cols = m.ncols();
    for i in 0..cols {
        if m.column(i).iter().all(|&v| v == 0.0) {
            return true;
        }
        for j in (i + 1)..cols {
            if m.column(i) == m.column(j) {
                return true;
            }
        }
    }
    false
}
