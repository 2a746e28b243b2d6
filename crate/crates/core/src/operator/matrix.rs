use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::surface::{tabulate, Kernel};
use crate::error::{Error, Result};
use crate::measures::GridMeasure;

/// Scaling convention of a discretized coefficient matrix.
///
/// * `Raw` holds `β(s_i, t_j)`.
/// * `WWeighted` holds `w_i·β(s_i, t_j)`, the matrix of the discrete operator.
/// * `SqrtWWeighted` holds `√w_i·β(s_i, t_j)`, what least squares on a
///   `√w`-scaled design estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    Raw,
    WWeighted,
    SqrtWWeighted,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Raw => "raw",
            Convention::WWeighted => "w-weighted",
            Convention::SqrtWWeighted => "sqrtw-weighted",
        }
    }

    fn row_scale(self, w: f64) -> f64 {
        match self {
            Convention::Raw => 1.0,
            Convention::WWeighted => w,
            Convention::SqrtWWeighted => w.sqrt(),
        }
    }
}

/// A `p × q` coefficient matrix together with the measure that gives its rows meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    values: DMatrix<f64>,
    convention: Convention,
    input_measure: GridMeasure,
    output_points: Vec<f64>,
}

impl CoefficientMatrix {
    pub fn new(
        values: DMatrix<f64>,
        convention: Convention,
        input_measure: GridMeasure,
        output_points: Vec<f64>,
    ) -> Result<Self> {
        if values.nrows() != input_measure.len() || values.ncols() != output_points.len() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient matrix is {}x{}, measure has {} atoms and {} output points",
                values.nrows(),
                values.ncols(),
                input_measure.len(),
                output_points.len()
            )));
        }
        Ok(CoefficientMatrix {
            values,
            convention,
            input_measure,
            output_points,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn input_measure(&self) -> &GridMeasure {
        &self.input_measure
    }

    pub fn output_points(&self) -> &[f64] {
        &self.output_points
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    /// Same coefficients expressed in another convention. Rows are rescaled by
    /// the ratio of the two conventions' weight factors.
    pub fn convert(&self, to: Convention) -> CoefficientMatrix {
        let mut values = self.values.clone();
        if to != self.convention {
            for (i, &w) in self.input_measure.weights().iter().enumerate() {
                let from = self.convention.row_scale(w);
                let into = to.row_scale(w);
                let mut row = values.row_mut(i);
                if self.convention != Convention::Raw {
                    row /= from;
                }
                if to != Convention::Raw {
                    row *= into;
                }
            }
        }
        CoefficientMatrix {
            values,
            convention: to,
            input_measure: self.input_measure.clone(),
            output_points: self.output_points.clone(),
        }
    }
}

/// Tabulate `β` on `μ_X × output_points` in the requested convention.
pub fn discretize_kernel<K: Kernel + ?Sized>(
    beta: &K,
    input_measure: &GridMeasure,
    output_points: &[f64],
    convention: Convention,
) -> Result<CoefficientMatrix> {
    let raw = tabulate(beta, input_measure.points(), output_points)?;
    let m = CoefficientMatrix::new(
        raw,
        Convention::Raw,
        input_measure.clone(),
        output_points.to_vec(),
    )?;
    Ok(m.convert(convention))
}

/// Noiseless action of the discretized operator: `y_j = Σ_i B_ij x_i` with `B`
/// in the w-weighted convention, `x_i = X(s_i)`.
pub fn apply_matrix(b: &CoefficientMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "predictor has {} values, coefficient matrix has {} rows",
            x.len(),
            b.nrows()
        )));
    }
    let weighted;
    let vals = if b.convention == Convention::WWeighted {
        &b.values
    } else {
        weighted = b.convert(Convention::WWeighted);
        &weighted.values
    };
    let out = (0..vals.ncols())
        .map(|j| {
            let mut acc = 0.0;
            for (i, &xi) in x.iter().enumerate() {
                acc += vals[(i, j)] * xi;
            }
            acc
        })
        .collect();
    Ok(out)
}
