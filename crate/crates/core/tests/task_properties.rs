mod common;

use common::{random_task, rng};
use contreg_core::{generate_realizable, radius, RealizableSpec, RegressionTask};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn normal_equations_hold(seed in any::<u64>(), n in 1usize..8, d in 1usize..8) {
        let task = random_task(&mut rng(seed), n, d);
        let resid = task.x().tr_mul(&(task.x() * task.solution() - task.y()));
        prop_assert!(resid.norm() <= 1e-8 * (1.0 + task.y().norm()));
        let direct = 0.5 * (task.x() * task.solution() - task.y()).norm_squared();
        prop_assert!(task.min_loss() >= 0.0);
        prop_assert!((task.min_loss() - direct).abs() <= 1e-10 * (1.0 + direct));
    }

    #[test]
    fn realizable_generation_is_exact(
        seed in any::<u64>(),
        dim in 1usize..10,
        tasks in 1usize..6,
        rows in 1usize..5,
        target in 0.1f64..5.0,
    ) {
        let spec = RealizableSpec { dim, tasks, rows, radius: target, seed };
        let c = generate_realizable(&spec).unwrap();
        let w = c.planted().unwrap();
        for t in c.tasks() {
            prop_assert!((t.x() * w - t.y()).norm() == 0.0);
            prop_assert!(t.min_loss() <= 1e-14 * (1.0 + t.y().norm_squared()));
        }
        prop_assert!((radius(&c) - target).abs() <= 1e-9 * target);
    }

    #[test]
    fn radius_unchanged_by_smaller_task(seed in any::<u64>(), shrink in 0.01f64..0.99) {
        let spec = RealizableSpec { dim: 4, tasks: 3, rows: 2, radius: 1.0, seed };
        let c = generate_realizable(&spec).unwrap();
        let mut r = rng(seed ^ 0x5eed);
        let extra = random_task(&mut r, 2, 4);
        let scaled = RegressionTask::new(
            extra.x() * (shrink * c.radius() / extra.spectral_norm()),
            extra.y().clone(),
        )
        .unwrap();
        let bigger = c.with_task(scaled).unwrap();
        prop_assert_eq!(bigger.radius(), c.radius());
        prop_assert_eq!(bigger.len(), c.len() + 1);
    }
}
