use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::estimate::EstimatorConfig;
use crate::measures::DEFAULT_REFERENCE_POINTS;
use crate::operator::SurfaceSpec;

/// Everything that determines a simulated dataset and its fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Input grid size.
    pub p: usize,
    /// Output grid size; `None` means "same as `p`".
    pub q: Option<usize>,
    pub n: usize,
    pub n_test: usize,
    /// KL truncation level.
    pub k: usize,
    /// Signal-to-noise ratio; `f64::INFINITY` means noiseless.
    #[serde(serialize_with = "ser_snr", deserialize_with = "de_snr")]
    pub snr: f64,
    pub p_ref: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub estimator: EstimatorConfig,
    pub beta: SurfaceSpec,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            p: 20,
            q: None,
            n: 200,
            n_test: 100,
            k: 12,
            snr: 5.0,
            p_ref: DEFAULT_REFERENCE_POINTS,
            reps: 100,
            base_seed: 20_240_601,
            estimator: EstimatorConfig::ols(),
            beta: SurfaceSpec::default(),
        }
    }
}

impl SimulationConfig {
    pub fn output_size(&self) -> usize {
        self.q.unwrap_or(self.p)
    }

    /// Checks that make a single dataset well defined. Sweep-level rules (such
    /// as the reference grid being 4× the largest swept `p`) live with the sweeps.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("p", self.p),
            ("q", self.output_size()),
            ("n", self.n),
            ("n_test", self.n_test),
            ("k", self.k),
            ("p_ref", self.p_ref),
            ("reps", self.reps),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.snr.is_nan() || self.snr <= 0.0 {
            return Err(Error::Config(format!("snr must be positive, got {}", self.snr)));
        }
        if self.p_ref < self.p {
            return Err(Error::Config(format!(
                "reference grid ({}) is coarser than the input grid ({})",
                self.p_ref, self.p
            )));
        }
        self.estimator.validate()?;
        self.beta.validate()
    }
}

fn ser_snr<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_snr<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Snr {
        Num(f64),
        Text(String),
    }
    match Snr::deserialize(d)? {
        Snr::Num(v) => Ok(v),
        Snr::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Snr::Text(t) => Err(serde::de::Error::custom(format!("bad snr `{t}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SimulationConfig::default().validate().unwrap();
        assert_eq!(SimulationConfig::default().output_size(), 20);
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = SimulationConfig::default();
        c.n = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = SimulationConfig::default();
        c.snr = 0.0;
        assert!(c.validate().is_err());
        let mut c = SimulationConfig::default();
        c.p_ref = 10;
        assert!(c.validate().is_err());
    }

    #[test]
    fn infinite_snr_round_trips() {
        let mut c = SimulationConfig::default();
        c.snr = f64::INFINITY;
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"snr\":\"inf\""));
        let back: SimulationConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
