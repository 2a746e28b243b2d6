//! The sweep studies behind a common trait, looked up by subcommand name.

use std::collections::BTreeMap;

use opmeasure_core::estimate::EstimatorConfig;
use opmeasure_core::{Error, Result, SimulationConfig};

use crate::sweep::{
    run_conditioning, run_grid_sweep, run_sample_sweep, SweepResult, DEFAULT_CONDITIONING_VALUES,
    DEFAULT_GRID_VALUES, DEFAULT_RIDGE_LAMBDA, DEFAULT_SAMPLE_VALUES,
};

/// Inputs to one study run.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyPlan {
    pub config: SimulationConfig,
    pub values: Vec<u64>,
    pub estimators: Vec<EstimatorConfig>,
}

pub trait Study: Send + Sync {
    fn name(&self) -> &'static str;

    fn default_values(&self) -> &'static [u64];

    /// Estimators used when the caller does not list any.
    fn default_estimators(&self, config: &SimulationConfig) -> Vec<EstimatorConfig> {
        vec![config.estimator.clone()]
    }

    fn run(&self, plan: &StudyPlan) -> Result<SweepResult>;
}

pub struct GridSweep;
pub struct SampleSweep;
pub struct Conditioning;

impl Study for GridSweep {
    fn name(&self) -> &'static str {
        "grid-sweep"
    }
    fn default_values(&self) -> &'static [u64] {
        &DEFAULT_GRID_VALUES
    }
    fn run(&self, plan: &StudyPlan) -> Result<SweepResult> {
        run_grid_sweep(&plan.config, &plan.values)
    }
}

impl Study for SampleSweep {
    fn name(&self) -> &'static str {
        "sample-sweep"
    }
    fn default_values(&self) -> &'static [u64] {
        &DEFAULT_SAMPLE_VALUES
    }
    fn run(&self, plan: &StudyPlan) -> Result<SweepResult> {
        run_sample_sweep(&plan.config, &plan.values)
    }
}

impl Study for Conditioning {
    fn name(&self) -> &'static str {
        "conditioning"
    }
    fn default_values(&self) -> &'static [u64] {
        &DEFAULT_CONDITIONING_VALUES
    }
    fn default_estimators(&self, config: &SimulationConfig) -> Vec<EstimatorConfig> {
        let rtol = config.estimator.pinv_rtol;
        let lambda = if config.estimator.name == "ridge" {
            config.estimator.lambda
        } else {
            DEFAULT_RIDGE_LAMBDA
        };
        vec![
            EstimatorConfig::ols().with_rtol(rtol),
            EstimatorConfig::ridge(lambda),
        ]
    }
    fn run(&self, plan: &StudyPlan) -> Result<SweepResult> {
        run_conditioning(&plan.config, &plan.values, &plan.estimators)
    }
}

#[derive(Default)]
pub struct StudyRegistry {
    studies: BTreeMap<&'static str, Box<dyn Study>>,
}

impl StudyRegistry {
    pub fn builtin() -> Self {
        let mut r = Self::default();
        r.register(Box::new(GridSweep));
        r.register(Box::new(SampleSweep));
        r.register(Box::new(Conditioning));
        r
    }

    pub fn register(&mut self, study: Box<dyn Study>) {
        self.studies.insert(study.name(), study);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Study> {
        self.studies
            .get(name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::Config(format!("unknown study `{name}`")))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.studies.keys().copied()
    }

    /// Build a plan from optional overrides and run it.
    pub fn run(
        &self,
        name: &str,
        config: SimulationConfig,
        values: Option<Vec<u64>>,
    ) -> Result<(StudyPlan, SweepResult)> {
        let study = self.get(name)?;
        let plan = StudyPlan {
            values: values.unwrap_or_else(|| study.default_values().to_vec()),
            estimators: study.default_estimators(&config),
            config,
        };
        let result = study.run(&plan)?;
        Ok((plan, result))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names() {
        let r = StudyRegistry::builtin();
        let names: Vec<_> = r.names().collect();
        assert_eq!(names, ["conditioning", "grid-sweep", "sample-sweep"]);
        assert!(r.get("figures").is_err());
    }

    #[test]
    fn conditioning_pairs_ols_with_ridge() {
        let c = SimulationConfig::default();
        let e = Conditioning.default_estimators(&c);
        assert_eq!(e[0].name, "ols");
        assert_eq!(e[1], EstimatorConfig::ridge(DEFAULT_RIDGE_LAMBDA));
    }
}
