//! Acceptance suite. Runs every criterion at full scale, prints one PASS/FAIL
//! line each and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use opmeasure_core::estimate::EstimatorConfig;
use opmeasure_core::SimulationConfig;
use opmeasure_experiments::checks::{case_reductions, operator_exactness};
use opmeasure_experiments::consistency::{run_consistency, DEFAULT_CONSISTENCY_VALUES};
use opmeasure_experiments::selftest::run_selftest;
use opmeasure_experiments::sweep::{
    run_conditioning, run_grid_sweep, run_sample_sweep, DEFAULT_CONDITIONING_VALUES,
    DEFAULT_GRID_VALUES, DEFAULT_RIDGE_LAMBDA, DEFAULT_SAMPLE_VALUES,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn quadrature_slope() -> Outcome {
    let res = run_grid_sweep(&SimulationConfig::default(), &DEFAULT_GRID_VALUES).unwrap();
    let slope = res.diagnostics["disc_err_slope"];
    let means: Vec<f64> = res.aggregates.iter().map(|a| a.disc_err).collect();
    let non_increasing = means.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        (-2.3..=-1.7).contains(&slope) && non_increasing && res.rows.len() == 600,
        format!("DiscErr slope {slope:.4} (want [-2.3, -1.7]), rows {}", res.rows.len()),
    )
}

fn estimation_slope() -> Outcome {
    let cfg = SimulationConfig {
        p: 20,
        ..SimulationConfig::default()
    };
    let res = run_sample_sweep(&cfg, &DEFAULT_SAMPLE_VALUES).unwrap();
    let slope = res.diagnostics["op_err_slope"];
    outcome(
        (-0.65..=-0.35).contains(&slope),
        format!("OpErr slope {slope:.4} (want [-0.65, -0.35])"),
    )
}

fn rmse_decomposition() -> Outcome {
    let cfg = SimulationConfig {
        n: 2_000,
        ..SimulationConfig::default()
    };
    let res = run_grid_sweep(&cfg, &[160]).unwrap();
    let a = &res.aggregates[0];
    let rel = (a.rmse_sq - a.op_err_sq - a.sigma_sq).abs() / a.sigma_sq;
    outcome(
        rel <= 0.10,
        format!(
            "|E RMSE^2 - E OpErr^2 - sigma^2| / sigma^2 = {rel:.4} (want <= 0.10)"
        ),
    )
}

fn matrix_exactness() -> Outcome {
    let r = operator_exactness(2024, 1_000).unwrap();
    outcome(
        r.max_abs_diff <= 1e-12,
        format!(
            "{} triples, {} evaluations, max |diff| {:e} (want <= 1e-12)",
            r.trials, r.evaluations, r.max_abs_diff
        ),
    )
}

fn case_reduction() -> Outcome {
    let reports = case_reductions(2024, 500).unwrap();
    let mismatches: usize = reports.iter().map(|r| r.mismatches).sum();
    outcome(
        reports.len() == 5 && mismatches == 0,
        format!("{} cases x 500 instances, {mismatches} mismatches", reports.len()),
    )
}

fn consistency() -> Outcome {
    let cfg = SimulationConfig {
        p: 10,
        k: 12,
        reps: 20,
        ..SimulationConfig::default()
    };
    let r = run_consistency(&cfg, &DEFAULT_CONSISTENCY_VALUES).unwrap();
    let means: Vec<String> = r
        .points
        .iter()
        .map(|p| format!("n={}: {:.4e}", p.n, p.mean_frobenius))
        .collect();
    outcome(
        r.strictly_decreasing() && r.final_ratio() < 0.2,
        format!(
            "{}; final/initial {:.4} (want < 0.2), slope {:.4}",
            means.join(", "),
            r.final_ratio(),
            r.slope
        ),
    )
}

fn conditioning() -> Outcome {
    let cfg = SimulationConfig::default();
    let ests = [EstimatorConfig::ols(), EstimatorConfig::ridge(DEFAULT_RIDGE_LAMBDA)];
    let res = run_conditioning(&cfg, &DEFAULT_CONDITIONING_VALUES, &ests).unwrap();
    let kappa: Vec<f64> = res
        .aggregates_for("ols", 0.0)
        .iter()
        .map(|a| a.cond_number)
        .collect();
    let monotone = kappa.windows(2).all(|w| w[1] >= w[0]);
    let ridge_finite = res
        .aggregates_for("ridge", DEFAULT_RIDGE_LAMBDA)
        .iter()
        .all(|a| a.op_err.is_finite());
    let rank_ok = res
        .rows
        .iter()
        .filter(|r| r.estimator == "ols")
        .all(|r| r.effective_rank <= r.n.min(r.p));
    let shown: Vec<String> = kappa.iter().map(|k| format!("{k:.3e}")).collect();
    outcome(
        monotone && ridge_finite && rank_ok,
        format!(
            "mean kappa [{}], ridge OpErr finite {ridge_finite}, OLS rank <= min(n, p) {rank_ok}",
            shown.join(", ")
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let report = run_selftest(&SimulationConfig::default(), dir.path()).unwrap();
    let differing: Vec<&str> = report
        .files
        .iter()
        .filter(|f| !f.identical)
        .map(|f| f.file.as_str())
        .collect();
    outcome(
        report.passed(),
        format!("{} files compared, differing {:?}", report.files.len(), differing),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("quadrature slope", quadrature_slope),
        ("estimation slope", estimation_slope),
        ("RMSE decomposition", rmse_decomposition),
        ("matrix form exactness", matrix_exactness),
        ("case reductions", case_reduction),
        ("consistency", consistency),
        ("conditioning", conditioning),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {:<22} {} ({:.1}s): {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
