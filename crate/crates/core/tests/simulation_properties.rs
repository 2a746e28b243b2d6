use nalgebra::DMatrix;
use opmeasure_core::estimate::{build_design, ols_fit, EstimatorConfig};
use opmeasure_core::simulate::{generate_dataset, pooled_variance, KlProcess};
use opmeasure_core::{CoefficientSurface, GridMeasure, SimulationConfig};
use proptest::prelude::*;

#[test]
fn kl_basis_is_orthonormal_under_fine_grid() {
    let process = KlProcess::new(12).unwrap();
    let mu = GridMeasure::uniform_midpoint(4096, 0.0, 1.0).unwrap();
    for j in 1..=12 {
        for k in 1..=12 {
            let ip = mu.inner_product(|s| process.basis(j, s), |s| process.basis(k, s));
            let want = if j == k { 1.0 } else { 0.0 };
            assert!((ip - want).abs() < 1e-6, "<phi_{j}, phi_{k}> = {ip}");
        }
    }
}

#[test]
fn noise_matches_requested_snr() {
    let config = SimulationConfig {
        p: 20,
        n: 500,
        p_ref: 512,
        snr: 4.0,
        ..SimulationConfig::default()
    };
    let d = generate_dataset(&config, &CoefficientSurface::default_truth()).unwrap();
    let noise: DMatrix<f64> = &d.train_y - &d.train_signal;
    let ratio = pooled_variance(&noise) / pooled_variance(&d.train_signal);
    assert!((ratio * 4.0 - 1.0).abs() < 0.10, "noise/signal variance {ratio}");
}

#[test]
fn smooth_design_has_rank_near_k() {
    for p in [24, 40, 80] {
        let config = SimulationConfig {
            p,
            p_ref: 4 * p,
            ..SimulationConfig::default()
        };
        let d = generate_dataset(&config, &CoefficientSurface::default_truth()).unwrap();
        let design = build_design(&d).unwrap();
        let fit = ols_fit(&design, &d.train_y, &EstimatorConfig::ols()).unwrap();
        let mut sv = fit.singular_values.clone();
        sv.sort_by(|a, b| b.total_cmp(a));
        assert!(sv[11] > 1e-8 * sv[0], "p = {p}: sigma_12 too small");
        assert!(sv[12] < 1e-8 * sv[0], "p = {p}: sigma_13 = {}", sv[12] / sv[0]);
        assert_eq!(fit.effective_rank, 12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn datasets_are_pure_functions_of_config_and_seed(seed in any::<u64>(), p in 2usize..16) {
        let config = SimulationConfig {
            p,
            n: 20,
            n_test: 5,
            k: 6,
            p_ref: 64,
            base_seed: seed,
            ..SimulationConfig::default()
        };
        let truth = CoefficientSurface::default_truth();
        let a = generate_dataset(&config, &truth).unwrap();
        let b = generate_dataset(&config, &truth).unwrap();
        prop_assert_eq!(&a, &b);

        let da = tempfile::tempdir().unwrap();
        let db = tempfile::tempdir().unwrap();
        a.export(da.path()).unwrap();
        b.export(db.path()).unwrap();
        for f in ["train_X.csv", "train_Y.csv", "test_X.csv", "test_Y.csv", "dataset.json"] {
            prop_assert_eq!(
                std::fs::read(da.path().join(f)).unwrap(),
                std::fs::read(db.path().join(f)).unwrap()
            );
        }
    }
}
