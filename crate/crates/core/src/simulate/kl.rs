use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Truncated Karhunen–Loève process on `[0, 1]` with sine basis
/// `φ_k(s) = √2·sin(kπs)` and eigenvalues `λ_k = k⁻²`, `k = 1..K`.
#[derive(Debug, Clone, PartialEq)]
pub struct KlProcess {
    eigenvalues: Vec<f64>,
}

impl KlProcess {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("truncation level K must be >= 1".into()));
        }
        let eigenvalues = (1..=k).map(|j| 1.0 / (j as f64 * j as f64)).collect();
        Ok(KlProcess { eigenvalues })
    }

    pub fn truncation(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `φ_k(s)` for a 1-based index `k`.
    pub fn basis(&self, k: usize, s: f64) -> f64 {
        SQRT_2 * (k as f64 * PI * s).sin()
    }

    /// `X(s) = Σ_k ξ_k φ_k(s)`, summed in ascending `k`.
    pub fn evaluate(&self, xi: &[f64], s: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &c) in xi.iter().enumerate() {
            acc += c * self.basis(j + 1, s);
        }
        acc
    }

    /// `K × m` table of `φ_k` at the given points.
    pub fn basis_table(&self, points: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.truncation(), points.len(), |k, i| {
            self.basis(k + 1, points[i])
        })
    }

    /// Pointwise variance `Σ_k λ_k φ_k(s)²`.
    pub fn variance_at(&self, s: f64) -> f64 {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(j, &l)| l * self.basis(j + 1, s).powi(2))
            .sum()
    }
}

/// Draw `ξ_k ~ N(0, λ_k)` independently, in ascending `k`.
pub fn draw_predictor<R: Rng + ?Sized>(rng: &mut R, process: &KlProcess) -> Vec<f64> {
    process
        .eigenvalues
        .iter()
        .map(|&l| {
            let z: f64 = rng.sample(StandardNormal);
            l.sqrt() * z
        })
        .collect()
}

/// `X(s)` for a coefficient vector; see [`KlProcess::evaluate`].
pub fn evaluate_predictor(xi: &[f64], process: &KlProcess, s: f64) -> f64 {
    process.evaluate(xi, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::seed::substream;

    #[test]
    fn eigenvalues_decrease() {
        let p = KlProcess::new(5).unwrap();
        assert_eq!(p.eigenvalues()[0], 1.0);
        assert_eq!(p.eigenvalues()[1], 0.25);
        assert!(p.eigenvalues().windows(2).all(|w| w[0] > w[1] && w[1] > 0.0));
        assert!(KlProcess::new(0).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let p = KlProcess::new(4).unwrap();
        assert_eq!(evaluate_predictor(&[0.3, -1.2, 2.0, 0.7], &p, 0.0), 0.0);
        let v = evaluate_predictor(&[1.0, 0.0, 0.0, 0.0], &p, 0.5);
        assert!((v - SQRT_2).abs() < 1e-15);
        assert_eq!(evaluate_predictor(&[0.0; 4], &p, 0.37), 0.0);
    }

    #[test]
    fn same_seed_same_draw() {
        let p = KlProcess::new(12).unwrap();
        let a = draw_predictor(&mut substream(99, 0), &p);
        let b = draw_predictor(&mut substream(99, 0), &p);
        assert_eq!(a, b);
        let c = draw_predictor(&mut substream(99, 1), &p);
        assert_ne!(a, c);
    }

    #[test]
    fn sample_variances_match_eigenvalues() {
        let p = KlProcess::new(3).unwrap();
        let mut rng = substream(7, 0);
        let draws = 100_000;
        let mut sq = [0.0; 3];
        for _ in 0..draws {
            let xi = draw_predictor(&mut rng, &p);
            for k in 0..3 {
                sq[k] += xi[k] * xi[k];
            }
        }
        for k in 0..3 {
            let var = sq[k] / draws as f64;
            let target = p.eigenvalues()[k];
            assert!((var / target - 1.0).abs() < 0.05, "k={k}: {var} vs {target}");
        }
    }

    #[test]
    fn pointwise_variance_matches_closed_form() {
        let p = KlProcess::new(12).unwrap();
        let mut rng = substream(11, 0);
        let s = 0.3;
        let draws = 100_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..draws {
            let x = evaluate_predictor(&draw_predictor(&mut rng, &p), &p, s);
            sum += x;
            sq += x * x;
        }
        let mean = sum / draws as f64;
        let var = sq / draws as f64 - mean * mean;
        let mut oracle = 0.0;
        for k in 1..=12 {
            let phi = SQRT_2 * (k as f64 * PI * s).sin();
            oracle += phi * phi / (k * k) as f64;
        }
        assert!((var / oracle - 1.0).abs() < 0.05, "{var} vs {oracle}");
        assert!((p.variance_at(s) - oracle).abs() < 1e-12);
    }
}
