use nalgebra::DMatrix;

use super::{Design, Estimator, Fit};
use crate::error::{Error, Result};
use crate::operator::{CoefficientMatrix, Convention};

/// `B̂ = (XᵀX + λI)⁻¹ XᵀY`, solved by Cholesky on the regularized Gram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ridge {
    pub lambda: f64,
}

impl Ridge {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ridge penalty must be positive, got {lambda}"
            )));
        }
        Ok(Ridge { lambda })
    }
}

impl Estimator for Ridge {
    fn name(&self) -> &'static str {
        "ridge"
    }

    fn fit(&self, design: &Design, y: &DMatrix<f64>) -> Result<Fit> {
        Ridge::new(self.lambda)?;
        design.check_response(y)?;
        let x = design.matrix();
        let xt = x.transpose();
        let mut gram = &xt * x;
        for i in 0..gram.nrows() {
            gram[(i, i)] += self.lambda;
        }
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::Numerical("regularized Gram is not positive definite".into()))?;
        let b = chol.solve(&(&xt * y));
        let coefficients = CoefficientMatrix::new(
            b,
            Convention::SqrtWWeighted,
            design.input_measure().clone(),
            design.output_points().to_vec(),
        )?;
        Ok(Fit {
            coefficients,
            effective_rank: x.ncols(),
            singular_values: Vec::new(),
        })
    }
}
