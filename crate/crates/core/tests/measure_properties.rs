use opmeasure_core::metrics::loglog_slope;
use opmeasure_core::{Domain, GridMeasure};
use proptest::prelude::*;

fn weighted_measure() -> impl Strategy<Value = GridMeasure> {
    prop::collection::btree_set(0u32..10_000, 1..40).prop_flat_map(|set| {
        let pts: Vec<f64> = set.into_iter().map(|k| k as f64 / 10_000.0).collect();
        let n = pts.len();
        prop::collection::vec(0.001f64..3.0, n).prop_map(move |w| {
            GridMeasure::weighted(pts.clone(), w, Domain::unit()).unwrap()
        })
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn integration_is_linear(
        mu in weighted_measure(),
        a in -10.0f64..10.0,
        b in -10.0f64..10.0,
        seed in any::<u64>(),
    ) {
        let n = mu.len();
        let f: Vec<f64> = (0..n).map(|i| ((seed.wrapping_add(i as u64) % 997) as f64 / 97.0).sin()).collect();
        let g: Vec<f64> = (0..n).map(|i| ((seed.wrapping_mul(31).wrapping_add(i as u64) % 991) as f64 / 13.0).cos()).collect();
        let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let lhs = mu.integrate_values(&combo).unwrap();
        let rhs = a * mu.integrate_values(&f).unwrap() + b * mu.integrate_values(&g).unwrap();
        prop_assert!(rel_close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn integrating_one_gives_total_mass(mu in weighted_measure()) {
        prop_assert_eq!(mu.integrate(|_| 1.0), mu.total_mass());
    }

    #[test]
    fn midpoint_rule_is_exact_for_affine(
        p in 1usize..300,
        a in -5.0f64..5.0,
        len in 0.01f64..10.0,
        c0 in -10.0f64..10.0,
        c1 in -10.0f64..10.0,
    ) {
        let b = a + len;
        let mu = GridMeasure::uniform_midpoint(p, a, b).unwrap();
        let got = mu.integrate(|s| c0 + c1 * s);
        let exact = c0 * (b - a) + c1 * (b * b - a * a) / 2.0;
        prop_assert!(rel_close(got, exact, 1e-12), "{got} vs {exact}");
    }
}

#[test]
fn midpoint_error_for_square_decays_quadratically() {
    let ps: Vec<f64> = (2..=9).map(|k| (1u32 << k) as f64).collect();
    let errs: Vec<f64> = ps
        .iter()
        .map(|&p| {
            let mu = GridMeasure::uniform_midpoint(p as usize, 0.0, 1.0).unwrap();
            (mu.integrate(|s| s * s) - 1.0 / 3.0).abs()
        })
        .collect();
    let slope = loglog_slope(&ps, &errs).unwrap();
    assert!((-2.1..=-1.9).contains(&slope), "slope {slope}");
}
