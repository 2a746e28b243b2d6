use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything that can be evaluated as a kernel `β(s, t)`.
///
/// Implemented for [`CoefficientSurface`] and for plain closures, so tests and
/// callers can use ad hoc kernels such as `|s, t| s + t`.
pub trait Kernel: Send + Sync {
    fn eval(&self, s: f64, t: f64) -> Result<f64>;

    /// Tabulated kernels only answer on their own grid.
    fn is_tabulated(&self) -> bool {
        false
    }
}

impl<F> Kernel for F
where
    F: Fn(f64, f64) -> f64 + Send + Sync,
{
    fn eval(&self, s: f64, t: f64) -> Result<f64> {
        Ok(self(s, t))
    }
}

/// A coefficient surface tabulated on a product grid. Evaluation off the grid is
/// an error: the grid is the model, and nothing is interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSurface {
    inputs: Vec<f64>,
    outputs: Vec<f64>,
    values: DMatrix<f64>,
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} grid is empty")));
    }
    for (i, w) in grid.windows(2).enumerate() {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "{name} grid not strictly increasing at index {}",
                i + 1
            )));
        }
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} grid has non-finite entries")));
    }
    Ok(())
}

impl TabulatedSurface {
    pub fn new(inputs: Vec<f64>, outputs: Vec<f64>, values: DMatrix<f64>) -> Result<Self> {
        check_grid("input", &inputs)?;
        check_grid("output", &outputs)?;
        if values.nrows() != inputs.len() || values.ncols() != outputs.len() {
            return Err(Error::DimensionMismatch(format!(
                "value matrix is {}x{} but grids are {}x{}",
                values.nrows(),
                values.ncols(),
                inputs.len(),
                outputs.len()
            )));
        }
        Ok(TabulatedSurface {
            inputs,
            outputs,
            values,
        })
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn eval(&self, s: f64, t: f64) -> Result<f64> {
        let i = self.inputs.binary_search_by(|x| x.total_cmp(&s));
        let j = self.outputs.binary_search_by(|x| x.total_cmp(&t));
        match (i, j) {
            (Ok(i), Ok(j)) => Ok(self.values[(i, j)]),
            _ => Err(Error::OffGrid { s, t }),
        }
    }
}

/// The kernel `β(s, t)` of the regression operator.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSurface {
    /// `exp(−(s−t)² / (2·variance)) + wave_amplitude·sin(2πs)·cos(2πt)`.
    GaussianBump { variance: f64, wave_amplitude: f64 },
    /// `amplitude·sin(2π·s_freq·s)·cos(2π·t_freq·t)`.
    SeparableSin {
        amplitude: f64,
        s_freq: f64,
        t_freq: f64,
    },
    Constant(f64),
    Tabulated(TabulatedSurface),
}

impl CoefficientSurface {
    /// Ground truth used by the simulation studies.
    pub fn default_truth() -> Self {
        CoefficientSurface::GaussianBump {
            variance: 0.04,
            wave_amplitude: 0.5,
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, CoefficientSurface::Tabulated(_))
    }

    pub fn as_tabulated(&self) -> Option<&TabulatedSurface> {
        match self {
            CoefficientSurface::Tabulated(t) => Some(t),
            _ => None,
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> Result<f64> {
        match self {
            CoefficientSurface::GaussianBump {
                variance,
                wave_amplitude,
            } => {
                let d = s - t;
                Ok((-d * d / (2.0 * variance)).exp()
                    + wave_amplitude * (2.0 * PI * s).sin() * (2.0 * PI * t).cos())
            }
            CoefficientSurface::SeparableSin {
                amplitude,
                s_freq,
                t_freq,
            } => Ok(amplitude * (2.0 * PI * s_freq * s).sin() * (2.0 * PI * t_freq * t).cos()),
            CoefficientSurface::Constant(c) => Ok(*c),
            CoefficientSurface::Tabulated(tab) => tab.eval(s, t),
        }
    }

    /// Values on the product grid `inputs × outputs`, row `i` for `s_i`.
    pub fn tabulate(&self, inputs: &[f64], outputs: &[f64]) -> Result<DMatrix<f64>> {
        tabulate(self, inputs, outputs)
    }
}

impl Kernel for CoefficientSurface {
    fn eval(&self, s: f64, t: f64) -> Result<f64> {
        CoefficientSurface::eval(self, s, t)
    }

    fn is_tabulated(&self) -> bool {
        !self.is_analytic()
    }
}

pub(crate) fn tabulate<K: Kernel + ?Sized>(
    kernel: &K,
    inputs: &[f64],
    outputs: &[f64],
) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(inputs.len(), outputs.len());
    for (i, &s) in inputs.iter().enumerate() {
        for (j, &t) in outputs.iter().enumerate() {
            m[(i, j)] = kernel.eval(s, t)?;
        }
    }
    Ok(m)
}

/// Serializable descriptor of an analytic surface, as recorded in run configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SurfaceSpec {
    GaussianBump { variance: f64, wave_amplitude: f64 },
    SeparableSin { amplitude: f64, s_freq: f64, t_freq: f64 },
    Constant { value: f64 },
}

impl Default for SurfaceSpec {
    fn default() -> Self {
        SurfaceSpec::GaussianBump {
            variance: 0.04,
            wave_amplitude: 0.5,
        }
    }
}

impl SurfaceSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SurfaceSpec::GaussianBump {
                variance,
                wave_amplitude,
            } => variance.is_finite() && variance > 0.0 && wave_amplitude.is_finite(),
            SurfaceSpec::SeparableSin {
                amplitude,
                s_freq,
                t_freq,
            } => amplitude.is_finite() && s_freq.is_finite() && t_freq.is_finite(),
            SurfaceSpec::Constant { value } => value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid surface parameters {self:?}")))
        }
    }

    pub fn build(&self) -> CoefficientSurface {
        match *self {
            SurfaceSpec::GaussianBump {
                variance,
                wave_amplitude,
            } => CoefficientSurface::GaussianBump {
                variance,
                wave_amplitude,
            },
            SurfaceSpec::SeparableSin {
                amplitude,
                s_freq,
                t_freq,
            } => CoefficientSurface::SeparableSin {
                amplitude,
                s_freq,
                t_freq,
            },
            SurfaceSpec::Constant { value } => CoefficientSurface::Constant(value),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_truth_values() {
        let b = CoefficientSurface::default_truth();
        assert_eq!(b.eval(0.3, 0.3).unwrap(), 1.0 + 0.5 * (0.6 * PI).sin() * (0.6 * PI).cos());
        let far = b.eval(0.0, 1.0).unwrap();
        assert!((far - (-1.0f64 / 0.08).exp()).abs() < 1e-15);
    }

    #[test]
    fn tabulated_on_and_off_grid() {
        let tab = TabulatedSurface::new(
            vec![0.25, 0.75],
            vec![0.5],
            DMatrix::from_row_slice(2, 1, &[1.0, 2.0]),
        )
        .unwrap();
        let s = CoefficientSurface::Tabulated(tab);
        assert_eq!(s.eval(0.75, 0.5).unwrap(), 2.0);
        assert_eq!(s.eval(0.5, 0.5), Err(Error::OffGrid { s: 0.5, t: 0.5 }));
        assert!(!s.is_analytic());
    }

    #[test]
    fn tabulated_rejects_bad_shapes() {
        assert!(TabulatedSurface::new(vec![0.1], vec![0.2], DMatrix::zeros(2, 1)).is_err());
        assert!(TabulatedSurface::new(vec![0.2, 0.1], vec![0.2], DMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn descriptor_builds_matching_surface() {
        let spec = SurfaceSpec::default();
        assert_eq!(spec.build(), CoefficientSurface::default_truth());
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("gaussian-bump"));
        assert!(SurfaceSpec::GaussianBump {
            variance: 0.0,
            wave_amplitude: 1.0
        }
        .validate()
        .is_err());
    }
}
