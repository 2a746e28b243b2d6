//! Finite grid measures `μ = Σ w_i δ_{s_i}` and exact integration against them.
//!
//! A [`GridMeasure`] is the only notion of measure in this crate. Lebesgue
//! measure on an interval is represented by a fine uniform-midpoint grid
//! (see [`DEFAULT_REFERENCE_POINTS`]), Dirac measures by a single unit atom.
//! Integration is a plain weighted sum taken in ascending point order, so
//! results are bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid size of the fine reference measure standing in for Lebesgue measure.
pub const DEFAULT_REFERENCE_POINTS: usize = 2048;

/// How a measure was constructed. Used by the regression-case reductions to
/// tell a Lebesgue stand-in apart from an arbitrary discrete measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    UniformMidpoint,
    Dirac,
    Weighted,
}

/// Closed interval `[a, b]` carrying a measure's support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub a: f64,
    pub b: f64,
}

impl Domain {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(Error::InvalidArgument(format!(
                "domain [{a}, {b}] must be finite with a <= b"
            )));
        }
        Ok(Domain { a, b })
    }

    pub fn unit() -> Self {
        Domain { a: 0.0, b: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }
}

#[derive(Deserialize)]
struct RawMeasure {
    kind: MeasureKind,
    domain: Domain,
    points: Vec<f64>,
    weights: Vec<f64>,
}

/// A positive weighted sum of point masses on an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct GridMeasure {
    kind: MeasureKind,
    domain: Domain,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl TryFrom<RawMeasure> for GridMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        let mut m = GridMeasure::weighted(raw.points, raw.weights, raw.domain)?;
        m.kind = raw.kind;
        Ok(m)
    }
}

impl GridMeasure {
    /// Midpoints of `p` equal cells of `[a, b]`, each carrying weight `(b - a) / p`.
    pub fn uniform_midpoint(p: usize, a: f64, b: f64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("grid size p must be >= 1".into()));
        }
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::InvalidArgument(format!(
                "interval [{a}, {b}] must satisfy a < b"
            )));
        }
        let len = b - a;
        let w = len / p as f64;
        let points = (1..=p)
            .map(|i| a + len * ((i as f64 - 0.5) / p as f64))
            .collect();
        Ok(GridMeasure {
            kind: MeasureKind::UniformMidpoint,
            domain: Domain { a, b },
            points,
            weights: vec![w; p],
        })
    }

    /// Unit point mass at `s0`.
    pub fn dirac(s0: f64) -> Self {
        GridMeasure {
            kind: MeasureKind::Dirac,
            domain: Domain { a: s0, b: s0 },
            points: vec![s0],
            weights: vec![1.0],
        }
    }

    /// Arbitrary atoms. Fails on the first invariant violation found.
    pub fn weighted(points: Vec<f64>, weights: Vec<f64>, domain: Domain) -> Result<Self> {
        Domain::new(domain.a, domain.b)?;
        if points.len() != weights.len() {
            return Err(Error::InvalidMeasure {
                index: points.len().min(weights.len()),
                reason: format!(
                    "length mismatch: {} points, {} weights",
                    points.len(),
                    weights.len()
                ),
            });
        }
        if points.is_empty() {
            return Err(Error::InvalidMeasure {
                index: 0,
                reason: "measure needs at least one atom".into(),
            });
        }
        for (i, (&s, &w)) in points.iter().zip(&weights).enumerate() {
            if !s.is_finite() || !domain.contains(s) {
                return Err(Error::InvalidMeasure {
                    index: i,
                    reason: format!("point {s} outside domain [{}, {}]", domain.a, domain.b),
                });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidMeasure {
                    index: i,
                    reason: format!("non-positive weight {w}"),
                });
            }
            if i > 0 {
                let prev = points[i - 1];
                if s == prev {
                    return Err(Error::InvalidMeasure {
                        index: i,
                        reason: format!("duplicate point {s}"),
                    });
                }
                if s < prev {
                    return Err(Error::InvalidMeasure {
                        index: i,
                        reason: format!("points not increasing ({prev} then {s})"),
                    });
                }
            }
        }
        let mass: f64 = weights.iter().sum();
        if !mass.is_finite() {
            return Err(Error::InvalidMeasure {
                index: 0,
                reason: "total mass is not finite".into(),
            });
        }
        Ok(GridMeasure {
            kind: MeasureKind::Weighted,
            domain,
            points,
            weights,
        })
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `true` for a single atom of unit weight, however it was built.
    pub fn is_dirac(&self) -> bool {
        self.points.len() == 1 && self.weights[0] == 1.0
    }

    /// `true` when every atom has weight exactly one (counting measure on the points).
    pub fn is_counting(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Index of an exact support point, if present.
    pub fn position(&self, s: f64) -> Option<usize> {
        self.points.binary_search_by(|p| p.total_cmp(&s)).ok()
    }

    /// `∫ f dμ = Σ w_i f(s_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = 0.0;
        for (&s, &w) in self.points.iter().zip(&self.weights) {
            acc += w * f(s);
        }
        acc
    }

    /// As [`integrate`](Self::integrate) for integrands that can fail.
    pub fn try_integrate<F: FnMut(f64) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (&s, &w) in self.points.iter().zip(&self.weights) {
            acc += w * f(s)?;
        }
        Ok(acc)
    }

    /// Integral of a function already tabulated on the support points.
    pub fn integrate_values(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a measure with {} atoms",
                values.len(),
                self.len()
            )));
        }
        let mut acc = 0.0;
        for (&v, &w) in values.iter().zip(&self.weights) {
            acc += w * v;
        }
        Ok(acc)
    }

    /// `⟨f, g⟩_{L²(μ)}`.
    pub fn inner_product<F, G>(&self, f: F, g: G) -> f64
    where
        F: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
    {
        self.integrate(|s| f(s) * g(s))
    }
}
