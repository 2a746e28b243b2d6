//! Randomized agreement checks between the matrix form, the regression cases
//! and the direct operator. Shared by `selftest` and the acceptance tests.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use opmeasure_core::operator::{
    apply_matrix, discretize_kernel, CaseRegistry, CaseResponse, Convention,
};
use opmeasure_core::simulate::seed::substream;
use opmeasure_core::simulate::KlProcess;
use opmeasure_core::{apply_operator, CoefficientSurface, Domain, GridMeasure, Result};

const CONVENTIONS: [Convention; 3] = [
    Convention::Raw,
    Convention::WWeighted,
    Convention::SqrtWWeighted,
];

fn random_surface(rng: &mut ChaCha8Rng) -> CoefficientSurface {
    match rng.random_range(0..3) {
        0 => CoefficientSurface::GaussianBump {
            variance: rng.random_range(0.005..0.5),
            wave_amplitude: rng.random_range(-2.0..2.0),
        },
        1 => CoefficientSurface::SeparableSin {
            amplitude: rng.random_range(-3.0..3.0),
            s_freq: rng.random_range(0.5..4.0),
            t_freq: rng.random_range(0.5..4.0),
        },
        _ => CoefficientSurface::Constant(rng.random_range(-5.0..5.0)),
    }
}

fn random_points(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn random_weighted(rng: &mut ChaCha8Rng, m: usize) -> Result<GridMeasure> {
    let pts = random_points(rng, m);
    let weights = (0..pts.len()).map(|_| rng.random_range(0.01..2.0)).collect();
    GridMeasure::weighted(pts, weights, Domain::unit())
}

fn random_counting(rng: &mut ChaCha8Rng, m: usize) -> Result<GridMeasure> {
    let pts = random_points(rng, m);
    let weights = vec![1.0; pts.len()];
    GridMeasure::weighted(pts, weights, Domain::unit())
}

/// A random smooth predictor: a KL path with random coefficients.
fn random_predictor(rng: &mut ChaCha8Rng, process: &KlProcess) -> Vec<f64> {
    (0..process.truncation())
        .map(|_| rng.random_range(-2.0..2.0))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessReport {
    pub trials: usize,
    pub evaluations: usize,
    pub max_abs_diff: f64,
}

/// Compare `apply_matrix(discretize_kernel(β, μ, t))` with `apply_operator`
/// on `trials` random `(β, X, μ)` triples, cycling through the conventions.
pub fn operator_exactness(seed: u64, trials: usize) -> Result<ExactnessReport> {
    let mut rng = substream(seed, 0);
    let process = KlProcess::new(12)?;
    let mut max_abs_diff: f64 = 0.0;
    let mut evaluations = 0;
    for trial in 0..trials {
        let beta = random_surface(&mut rng);
        let p = rng.random_range(1..=40);
        let mu = random_weighted(&mut rng, p)?;
        let q = rng.random_range(1..=10);
        let t = random_points(&mut rng, q);
        let xi = random_predictor(&mut rng, &process);
        let x = |s: f64| process.evaluate(&xi, s);
        let x_values: Vec<f64> = mu.points().iter().map(|&s| x(s)).collect();

        let b = discretize_kernel(&beta, &mu, &t, CONVENTIONS[trial % 3])?;
        let via_matrix = apply_matrix(&b, &x_values)?;
        for (j, &tj) in t.iter().enumerate() {
            let direct = apply_operator(&beta, x, &mu, tj)?;
            max_abs_diff = max_abs_diff.max((via_matrix[j] - direct).abs());
            evaluations += 1;
        }
    }
    Ok(ExactnessReport {
        trials,
        evaluations,
        max_abs_diff,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub case: &'static str,
    pub trials: usize,
    pub mismatches: usize,
}

fn case_measures(rng: &mut ChaCha8Rng, case: &str) -> Result<(GridMeasure, GridMeasure)> {
    let p = rng.random_range(1..=40);
    let q = rng.random_range(1..=20);
    let t0 = rng.random_range(0.0..1.0);
    let s0 = rng.random_range(0.0..1.0);
    Ok(match case {
        "function-on-function" => (
            GridMeasure::uniform_midpoint(p, 0.0, 1.0)?,
            GridMeasure::uniform_midpoint(q, 0.0, 1.0)?,
        ),
        "scalar-on-function" => (
            GridMeasure::uniform_midpoint(p, 0.0, 1.0)?,
            GridMeasure::dirac(t0),
        ),
        "function-on-vector" => (
            random_counting(rng, p)?,
            GridMeasure::uniform_midpoint(q, 0.0, 1.0)?,
        ),
        "scalar-scalar" => (GridMeasure::dirac(s0), GridMeasure::dirac(t0)),
        _ => (random_weighted(rng, p)?, random_weighted(rng, q)?),
    })
}

/// Each builtin case, configured on random measures of the right shape, must
/// reproduce `apply_operator` at every output support point bit for bit.
pub fn case_reductions(seed: u64, trials: usize) -> Result<Vec<ReductionReport>> {
    let registry = CaseRegistry::builtin();
    let process = KlProcess::new(12)?;
    let names: Vec<&'static str> = registry.names().collect();
    let mut reports = Vec::with_capacity(names.len());
    for (ci, name) in names.into_iter().enumerate() {
        let mut rng = substream(seed, 1 + ci as u64);
        let mut mismatches = 0;
        for _ in 0..trials {
            let beta = random_surface(&mut rng);
            let (input, output) = case_measures(&mut rng, name)?;
            let xi = random_predictor(&mut rng, &process);
            let x = |s: f64| process.evaluate(&xi, s);
            let ev = registry.configure(name, input.clone(), output.clone())?;
            let direct = output
                .points()
                .iter()
                .map(|&t| apply_operator(&beta, x, &input, t))
                .collect::<Result<Vec<_>>>()?;
            let agrees = match ev.evaluate(&beta, x)? {
                CaseResponse::Scalar(v) => direct.len() == 1 && v == direct[0],
                CaseResponse::Function { points, values } => {
                    points == output.points() && values == direct
                }
            };
            if !agrees {
                mismatches += 1;
            }
        }
        reports.push(ReductionReport {
            case: name,
            trials,
            mismatches,
        });
    }
    Ok(reports)
}

/// Plain-text dump of both checks, used for the byte comparison in `selftest`.
pub fn render_reports(exact: &ExactnessReport, cases: &[ReductionReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "operator_exactness trials={} evaluations={} max_abs_diff={:e}",
        exact.trials, exact.evaluations, exact.max_abs_diff
    );
    for r in cases {
        let _ = writeln!(
            out,
            "case_reduction case={} trials={} mismatches={}",
            r.case, r.trials, r.mismatches
        );
    }
    out
}
