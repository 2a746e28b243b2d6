//! The integral operator `(T_β X)(t) = ∫ β(s, t) X(s) dμ_X(s)` and its
//! discretizations.

mod cases;
mod io;
mod matrix;
mod surface;

pub use cases::{
    reduce_case, CaseEvaluator, CaseRegistry, CaseResponse, FunctionOnFunction, FunctionOnVector,
    Multivariate, RegressionCase, ScalarOnFunction, ScalarScalar,
};
pub use io::{read_tabulated_csv, tabulated_from_csv, tabulated_to_csv, write_tabulated_csv};
pub use matrix::{apply_matrix, discretize_kernel, CoefficientMatrix, Convention};
pub use surface::{CoefficientSurface, Kernel, SurfaceSpec, TabulatedSurface};

use crate::error::Result;
use crate::measures::GridMeasure;

/// Operator output at `t`: `Σ_i w_i·(β(s_i, t)·X(s_i))`, summed in ascending `i`.
pub fn apply_operator<K, X>(beta: &K, x: X, input_measure: &GridMeasure, t: f64) -> Result<f64>
where
    K: Kernel + ?Sized,
    X: Fn(f64) -> f64,
{
    input_measure.try_integrate(|s| Ok(beta.eval(s, t)? * x(s)))
}
