//! One Monte Carlo cell: simulate, fit, score.

use opmeasure_core::estimate::{
    build_design, build_test_design, condition_number, condition_number_given, predict,
    recover_beta, Estimator, EstimatorConfig,
};
use opmeasure_core::metrics::{ise, op_err, rmse, DiscretizationGap, MetricsRecord};
use opmeasure_core::operator::CoefficientSurface;
use opmeasure_core::simulate::{DataGenerator, Dataset};
use opmeasure_core::{GridMeasure, Result, SimulationConfig};

/// Everything shared by the replications of one sweep value.
pub struct CellContext {
    pub config: SimulationConfig,
    pub truth: CoefficientSurface,
    pub generator: DataGenerator,
    pub gap: DiscretizationGap,
}

impl CellContext {
    pub fn new(config: SimulationConfig) -> Result<Self> {
        config.validate()?;
        let truth = config.beta.build();
        let generator = DataGenerator::new(&config, &truth)?;
        let reference = GridMeasure::uniform_midpoint(config.p_ref, 0.0, 1.0)?;
        let gap = DiscretizationGap::new(
            &truth,
            generator.process(),
            generator.input_measure(),
            &reference,
            reference.points(),
        )?;
        Ok(CellContext {
            config,
            truth,
            generator,
            gap,
        })
    }
}

/// Scores of one estimator on one dataset.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub estimator: EstimatorConfig,
    pub metrics: MetricsRecord,
}

/// Metrics of `est` fitted to `data`; `disc_err` is shared because it does
/// not depend on the fit.
pub fn score(
    ctx: &CellContext,
    data: &Dataset,
    est: &dyn Estimator,
    disc_err: f64,
) -> Result<MetricsRecord> {
    let design = build_design(data)?;
    let fit = est.fit(&design, &data.train_y)?;
    let beta_hat = recover_beta(&fit.coefficients, &data.input_measure)?;
    let test_design = build_test_design(data)?;
    let y_hat = predict(&fit.coefficients, test_design.matrix())?;
    let test_predictors = data.test_predictors();

    let x = design.matrix();
    let cond_number = if fit.singular_values.is_empty() {
        condition_number(x)?
    } else {
        condition_number_given(x, &fit.singular_values)
    };

    Ok(MetricsRecord {
        ise: ise(&beta_hat, &ctx.truth, &data.input_measure, &data.output_measure)?,
        op_err: op_err(
            &beta_hat,
            &ctx.truth,
            &test_predictors,
            ctx.generator.process(),
            &data.input_measure,
            &data.output_measure,
        )?,
        disc_err,
        rmse: rmse(&data.test_y, &y_hat)?,
        cond_number,
        sigma: data.sigma,
        effective_rank: fit.effective_rank,
    })
}

/// Generate the dataset for `seed` and score every estimator on it.
pub fn run_cell(
    ctx: &CellContext,
    estimators: &[(EstimatorConfig, Box<dyn Estimator>)],
    seed: u64,
) -> Result<(Dataset, Vec<CellOutcome>)> {
    let data = ctx.generator.generate(seed)?;
    let disc_err = ctx.gap.disc_err(&data.test_predictors())?;
    let outcomes = estimators
        .iter()
        .map(|(cfg, est)| {
            Ok(CellOutcome {
                estimator: cfg.clone(),
                metrics: score(ctx, &data, est.as_ref(), disc_err)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((data, outcomes))
}
