mod common;

use common::{gaussian_vector, random_task, rng};
use contreg_core::{
    build_budgeted_surrogate, build_regularized_surrogate, build_spectral_surrogate,
    sandwich_check, sandwich_check_with, value_and_grad, RadiusScale, RegressionTask, SpectralMap,
    SurrogateQuadratic, Vector,
};
use contreg_core::linalg::max_symmetric_eigenvalue;
use proptest::prelude::*;

fn central_difference(s: &SurrogateQuadratic, w: &Vector, i: usize, h: f64) -> f64 {
    let mut plus = w.clone();
    let mut minus = w.clone();
    plus[i] += h;
    minus[i] -= h;
    let (fp, _) = value_and_grad(s, &plus).unwrap();
    let (fm, _) = value_and_grad(s, &minus).unwrap();
    (fp - fm) / (2.0 * h)
}

fn surrogates(task: &RegressionTask, seed: u64) -> Vec<SurrogateQuadratic> {
    let mut r = rng(seed);
    use rand::Rng;
    let lambda = 10f64.powf(r.random_range(-2.0..2.0));
    let eta = 10f64.powf(r.random_range(-2.0..1.0));
    let r2 = task.spectral_norm().powi(2);
    let gamma = r.random_range(0.05..0.9) / r2;
    let steps = r.random_range(1..=10u32);
    vec![
        build_regularized_surrogate(task, lambda, eta).unwrap(),
        build_budgeted_surrogate(task, gamma, steps, eta).unwrap(),
        build_spectral_surrogate(task, SpectralMap::Regularized { lambda }, eta).unwrap(),
        build_spectral_surrogate(task, SpectralMap::Budgeted { gamma, steps }, eta).unwrap(),
    ]
}

#[test]
fn gradients_match_finite_differences() {
    let mut r = rng(11);
    let task = random_task(&mut r, 4, 5);
    for s in surrogates(&task, 12) {
        for _ in 0..10 {
            let w = gaussian_vector(&mut r, 5);
            let (_, g) = value_and_grad(&s, &w).unwrap();
            for i in 0..5 {
                let fd = central_difference(&s, &w, i, 1e-5);
                let rel = (fd - g[i]).abs() / (1.0 + g[i].abs());
                assert!(rel < 1e-6, "{} coordinate {i}: fd {fd}, grad {}", s.kind().name(), g[i]);
            }
        }
    }
}

#[test]
fn spectral_builder_reproduces_dedicated_builders() {
    let mut r = rng(3);
    for _ in 0..20 {
        let task = random_task(&mut r, 3, 6);
        let r2 = task.spectral_norm().powi(2);
        let a = build_regularized_surrogate(&task, 0.7, 2.0).unwrap();
        let b = build_spectral_surrogate(&task, SpectralMap::Regularized { lambda: 0.7 }, 2.0).unwrap();
        assert!((a.matrix() - b.matrix()).norm() <= 1e-10);
        let gamma = 0.6 / r2;
        let a = build_budgeted_surrogate(&task, gamma, 4, 0.5).unwrap();
        let b = build_spectral_surrogate(&task, SpectralMap::Budgeted { gamma, steps: 4 }, 0.5).unwrap();
        assert!((a.matrix() - b.matrix()).norm() <= 1e-10);
    }
}

#[test]
fn sandwich_monte_carlo_d5() {
    let mut r = rng(5);
    let task = random_task(&mut r, 3, 5);
    for s in surrogates(&task, 6) {
        for _ in 0..100 {
            let w = gaussian_vector(&mut r, 5) * 3.0;
            let rep = sandwich_check(&s, &task, &w).unwrap();
            assert!(rep.holds(), "{rep:?}");
            let rep = sandwich_check_with(&s, &task, &w, RadiusScale::Collection(2.0 * task.spectral_norm()))
                .unwrap();
            assert!(rep.holds(), "{rep:?}");
        }
    }
}

#[test]
fn upper_constant_with_matched_strength() {
    let mut r = rng(8);
    for _ in 0..50 {
        let task = random_task(&mut r, 4, 4);
        let r2 = task.spectral_norm().powi(2);
        for eta in [0.01, 0.3, 1.0, 5.0] {
            let s = build_regularized_surrogate(&task, 1.0 / eta, eta).unwrap();
            assert!(r2 / s.beta() <= 1.0 + eta * r2 + 1e-9);
            let gamma = 0.5 / r2;
            let steps = (eta / gamma).round().max(1.0);
            let eta_b = gamma * steps;
            let s = build_budgeted_surrogate(&task, gamma, steps as u32, eta_b).unwrap();
            assert!(r2 / s.beta() <= 1.0 + eta_b * r2 + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beta_is_largest_eigenvalue_and_closed_form(
        seed in any::<u64>(),
        n in 1usize..6,
        d in 1usize..7,
        log_lambda in -2.0f64..2.0,
        log_eta in -2.0f64..1.0,
        frac in 0.05f64..0.95,
        steps in 1u32..12,
    ) {
        let task = random_task(&mut rng(seed), n, d);
        let r2 = task.spectral_norm().powi(2);
        let (lambda, eta) = (10f64.powf(log_lambda), 10f64.powf(log_eta));
        let s = build_regularized_surrogate(&task, lambda, eta).unwrap();
        let closed = r2 / (r2 + lambda) / eta;
        prop_assert!((s.beta() - closed).abs() <= 1e-9 * closed);
        let top = max_symmetric_eigenvalue(s.matrix());
        prop_assert!((s.beta() - top).abs() <= 1e-9 * closed);

        let gamma = frac / r2;
        let s = build_budgeted_surrogate(&task, gamma, steps, eta).unwrap();
        let closed = (1.0 - (1.0 - frac).powi(steps as i32)) / eta;
        prop_assert!((s.beta() - closed).abs() <= 1e-9 * closed);
        let top = max_symmetric_eigenvalue(s.matrix());
        prop_assert!((s.beta() - top).abs() <= 1e-9 * closed);
    }

    #[test]
    fn surrogate_is_symmetric_psd_and_vanishes_at_anchor(seed in any::<u64>(), n in 1usize..5, d in 1usize..6) {
        let task = random_task(&mut rng(seed), n, d);
        let s = build_regularized_surrogate(&task, 0.5, 1.0).unwrap();
        let a = s.matrix();
        prop_assert!((a - a.transpose()).norm() <= 1e-10 * (1.0 + a.norm()));
        let eig = a.clone().symmetric_eigen();
        prop_assert!(eig.eigenvalues.iter().all(|&e| e >= -1e-10));
        let (f, g) = value_and_grad(&s, task.solution()).unwrap();
        prop_assert!(f.abs() < 1e-20 && g.norm() < 1e-12);
    }
}
