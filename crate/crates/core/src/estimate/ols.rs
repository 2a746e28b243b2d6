use nalgebra::{DMatrix, SVD};

use super::{Design, Estimator, Fit};
use crate::error::{Error, Result};
use crate::operator::{CoefficientMatrix, Convention};

/// Minimum-norm least squares through a truncated SVD pseudo-inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ols {
    /// Singular values below `pinv_rtol · σ_max` are treated as zero.
    pub pinv_rtol: f64,
}

impl Default for Ols {
    fn default() -> Self {
        Ols {
            pinv_rtol: super::DEFAULT_PINV_RTOL,
        }
    }
}

pub(crate) fn svd(m: &DMatrix<f64>, vectors: bool) -> Result<SVD<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    SVD::try_new(m.clone(), vectors, vectors, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))
}

impl Estimator for Ols {
    fn name(&self) -> &'static str {
        "ols"
    }

    fn fit(&self, design: &Design, y: &DMatrix<f64>) -> Result<Fit> {
        design.check_response(y)?;
        let x = design.matrix();
        let dec = svd(x, true)?;
        let sv = dec.singular_values.as_slice().to_vec();
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let cutoff = self.pinv_rtol * smax;
        let keep: Vec<usize> = (0..sv.len())
            .filter(|&i| smax > 0.0 && sv[i] > cutoff)
            .collect();
        if keep.is_empty() {
            return Err(Error::DegenerateDesign);
        }
        let u = dec.u.as_ref().expect("left singular vectors requested");
        let v_t = dec.v_t.as_ref().expect("right singular vectors requested");

        // B = Σ_r v_r (u_rᵀ Y) / σ_r over the kept directions
        let mut b = DMatrix::zeros(x.ncols(), y.ncols());
        for &r in &keep {
            let proj = (u.column(r).transpose() * y) / sv[r];
            b += v_t.row(r).transpose() * proj;
        }
        let coefficients = CoefficientMatrix::new(
            b,
            Convention::SqrtWWeighted,
            design.input_measure().clone(),
            design.output_points().to_vec(),
        )?;
        Ok(Fit {
            coefficients,
            effective_rank: keep.len(),
            singular_values: sv,
        })
    }
}
