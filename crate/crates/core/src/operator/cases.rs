//! The regression taxonomy as choices of input and output measure.
//!
//! Each [`RegressionCase`] only decides which measure pairs it accepts and
//! whether its response is a scalar. Evaluation is always the same operator,
//! [`apply_operator`], under the configured measures.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{apply_operator, Kernel};
use crate::error::{Error, Result};
use crate::measures::{GridMeasure, MeasureKind};

pub trait RegressionCase: Send + Sync {
    fn name(&self) -> &'static str;

    /// Reject measure pairs that do not describe this case.
    fn check(&self, input: &GridMeasure, output: &GridMeasure) -> std::result::Result<(), String>;

    fn scalar_response(&self) -> bool;
}

fn lebesgue_stand_in(m: &GridMeasure, which: &str) -> std::result::Result<(), String> {
    if m.kind() == MeasureKind::UniformMidpoint {
        Ok(())
    } else {
        Err(format!(
            "{which} measure must be a uniform-midpoint reference grid, got {:?}",
            m.kind()
        ))
    }
}

fn dirac(m: &GridMeasure, which: &str) -> std::result::Result<(), String> {
    if m.is_dirac() {
        Ok(())
    } else {
        Err(format!(
            "{which} measure must be a unit point mass, got {} atoms of mass {}",
            m.len(),
            m.total_mass()
        ))
    }
}

pub struct FunctionOnFunction;
pub struct ScalarOnFunction;
pub struct FunctionOnVector;
pub struct Multivariate;
pub struct ScalarScalar;

impl RegressionCase for FunctionOnFunction {
    fn name(&self) -> &'static str {
        "function-on-function"
    }
    fn check(&self, input: &GridMeasure, output: &GridMeasure) -> std::result::Result<(), String> {
        lebesgue_stand_in(input, "input")?;
        lebesgue_stand_in(output, "output")
    }
    fn scalar_response(&self) -> bool {
        false
    }
}

impl RegressionCase for ScalarOnFunction {
    fn name(&self) -> &'static str {
        "scalar-on-function"
    }
    fn check(&self, _input: &GridMeasure, output: &GridMeasure) -> std::result::Result<(), String> {
        dirac(output, "output")
    }
    fn scalar_response(&self) -> bool {
        true
    }
}

impl RegressionCase for FunctionOnVector {
    fn name(&self) -> &'static str {
        "function-on-vector"
    }
    fn check(&self, input: &GridMeasure, output: &GridMeasure) -> std::result::Result<(), String> {
        if !input.is_counting() {
            return Err("input measure must put unit mass on every point".into());
        }
        lebesgue_stand_in(output, "output")
    }
    fn scalar_response(&self) -> bool {
        false
    }
}

impl RegressionCase for Multivariate {
    fn name(&self) -> &'static str {
        "multivariate"
    }
    fn check(&self, _input: &GridMeasure, _output: &GridMeasure) -> std::result::Result<(), String> {
        Ok(())
    }
    fn scalar_response(&self) -> bool {
        false
    }
}

impl RegressionCase for ScalarScalar {
    fn name(&self) -> &'static str {
        "scalar-scalar"
    }
    fn check(&self, input: &GridMeasure, output: &GridMeasure) -> std::result::Result<(), String> {
        dirac(input, "input")?;
        dirac(output, "output")
    }
    fn scalar_response(&self) -> bool {
        true
    }
}

/// Response of a configured case: a scalar, or values at the output support points.
#[derive(Debug, Clone, PartialEq)]
pub enum CaseResponse {
    Scalar(f64),
    Function { points: Vec<f64>, values: Vec<f64> },
}

/// A regression case bound to its measures.
#[derive(Clone)]
pub struct CaseEvaluator {
    case: Arc<dyn RegressionCase>,
    input: GridMeasure,
    output: GridMeasure,
}

impl std::fmt::Debug for CaseEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CaseEvaluator")
            .field("case", &self.case.name())
            .field("inputs", &self.input.len())
            .field("outputs", &self.output.len())
            .finish()
    }
}

impl CaseEvaluator {
    pub fn case_name(&self) -> &'static str {
        self.case.name()
    }

    pub fn input_measure(&self) -> &GridMeasure {
        &self.input
    }

    pub fn output_measure(&self) -> &GridMeasure {
        &self.output
    }

    pub fn evaluate<K, X>(&self, beta: &K, x: X) -> Result<CaseResponse>
    where
        K: Kernel + ?Sized,
        X: Fn(f64) -> f64,
    {
        let values = self
            .output
            .points()
            .iter()
            .map(|&t| apply_operator(beta, &x, &self.input, t))
            .collect::<Result<Vec<_>>>()?;
        if self.case.scalar_response() {
            Ok(CaseResponse::Scalar(values[0]))
        } else {
            Ok(CaseResponse::Function {
                points: self.output.points().to_vec(),
                values,
            })
        }
    }
}

/// Name → case lookup. [`CaseRegistry::builtin`] holds the five classical cases.
#[derive(Clone, Default)]
pub struct CaseRegistry {
    cases: BTreeMap<&'static str, Arc<dyn RegressionCase>>,
}

impl CaseRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(FunctionOnFunction));
        r.register(Arc::new(ScalarOnFunction));
        r.register(Arc::new(FunctionOnVector));
        r.register(Arc::new(Multivariate));
        r.register(Arc::new(ScalarScalar));
        r
    }

    pub fn register(&mut self, case: Arc<dyn RegressionCase>) {
        self.cases.insert(case.name(), case);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn RegressionCase>> {
        self.cases.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.cases.keys().copied()
    }

    pub fn configure(
        &self,
        name: &str,
        input: GridMeasure,
        output: GridMeasure,
    ) -> Result<CaseEvaluator> {
        let case = self
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown regression case `{name}`")))?;
        case.check(&input, &output).map_err(|reason| Error::CaseMismatch {
            case: case.name(),
            reason,
        })?;
        Ok(CaseEvaluator {
            case,
            input,
            output,
        })
    }
}

/// Configure one of the builtin cases by name.
pub fn reduce_case(name: &str, input: GridMeasure, output: GridMeasure) -> Result<CaseEvaluator> {
    CaseRegistry::builtin().configure(name, input, output)
}
