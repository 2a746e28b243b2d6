use std::fs;

use opmeasure_core::operator::read_tabulated_csv;
use opmeasure_core::simulate::KlProcess;
use opmeasure_core::{apply_operator, GridMeasure, SimulationConfig};
use opmeasure_experiments::figures::{export_figure_data, read_curves, FigureManifest, DEFAULT_CURVES};

fn config() -> SimulationConfig {
    SimulationConfig {
        p: 20,
        n: 100,
        n_test: 10,
        p_ref: 512,
        ..SimulationConfig::default()
    }
}

#[test]
fn beta_true_round_trips_through_the_loader() {
    let dir = tempfile::tempdir().unwrap();
    export_figure_data(&config(), dir.path(), DEFAULT_CURVES).unwrap();
    let surface = read_tabulated_csv(&dir.path().join("beta_true.csv")).unwrap();
    let truth = config().beta.build();
    for (i, &s) in surface.inputs().iter().enumerate() {
        for (j, &t) in surface.outputs().iter().enumerate() {
            assert_eq!(surface.values()[(i, j)], truth.eval(s, t).unwrap());
        }
    }
    let hat = read_tabulated_csv(&dir.path().join("beta_hat.csv")).unwrap();
    assert_eq!(hat.inputs(), surface.inputs());
    assert!(dir.path().join("dataset/train_X.csv").exists());
}

#[test]
fn curves_have_three_times_q_rows() {
    let dir = tempfile::tempdir().unwrap();
    export_figure_data(&config(), dir.path(), DEFAULT_CURVES).unwrap();
    let rows = read_curves(&dir.path().join("curves.csv")).unwrap();
    assert_eq!(rows.len(), 3 * 20);
    let header = fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap(), "sample,t,y_noisy,y_signal,y_pred");
}

#[test]
fn signal_column_matches_operator_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    export_figure_data(&config(), dir.path(), DEFAULT_CURVES).unwrap();
    let manifest: FigureManifest =
        serde_json::from_str(&fs::read_to_string(dir.path().join("figures.json")).unwrap()).unwrap();
    let process = KlProcess::new(manifest.config.k).unwrap();
    let reference = GridMeasure::uniform_midpoint(manifest.config.p_ref, 0.0, 1.0).unwrap();
    let truth = manifest.config.beta.build();
    for row in read_curves(&dir.path().join("curves.csv")).unwrap() {
        let xi = &manifest.curve_xi[row.sample];
        let x = |s: f64| process.evaluate(xi, s);
        let expected = apply_operator(&truth, x, &reference, row.t).unwrap();
        assert!((row.y_signal - expected).abs() <= 1e-12, "{} vs {expected}", row.y_signal);
    }
}

#[test]
fn too_many_curves_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(export_figure_data(&config(), dir.path(), 11).is_err());
}
