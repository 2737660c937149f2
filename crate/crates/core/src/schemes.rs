//! Continual update rules and trajectory runner.

use alloc::vec::Vec;

use crate::linalg::{check_len, solve_shifted_spd, Vector};
use crate::ordering::Ordering;
use crate::schedules::{Schedule, StepParams};
use crate::surrogate::{
    build_budgeted_surrogate, build_regularized_surrogate, check_inner_step, check_steps,
    SurrogateQuadratic,
};
use crate::task::{RegressionTask, TaskCollection};
use crate::{Error, Result};

/// `argmin_w' ½‖Xw' − y‖² + (λ/2)‖w' − w‖² = (XᵀX + λI)⁻¹(Xᵀy + λw)`.
pub fn regularized_step(w: &Vector, task: &RegressionTask, lambda: f64) -> Result<Vector> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::param("lambda", alloc::format!("must be positive, got {lambda}")));
    }
    check_len("regularized step", task.dim(), w.len())?;
    let rhs = task.xty() + w * lambda;
    solve_shifted_spd(task.gram(), lambda, &rhs)
}

/// `N` explicit gradient steps `w ← w − γXᵀ(Xw − y)`.
pub fn budgeted_step(w: &Vector, task: &RegressionTask, gamma: f64, steps: u32) -> Result<Vector> {
    check_inner_step(task.spectral_norm(), gamma)?;
    check_steps(steps)?;
    check_len("budgeted step", task.dim(), w.len())?;
    let mut current = w.clone();
    for _ in 0..steps {
        let residual = task.x() * &current - task.y();
        current -= task.x().tr_mul(&residual) * gamma;
    }
    Ok(current)
}

/// Trains to convergence from `w`: `w − X⁺(Xw − y)`, the point closest to `w`
/// among the minimizers of the task loss.
pub fn unregularized_step(w: &Vector, task: &RegressionTask) -> Result<Vector> {
    check_len("unregularized step", task.dim(), w.len())?;
    let residual = task.x() * w - task.y();
    Ok(w - task.pinv() * residual)
}

/// One incremental gradient step `w − η A(w − p)`.
pub fn igd_step(w: &Vector, s: &SurrogateQuadratic, eta: f64) -> Result<Vector> {
    check_len("igd step", s.dim(), w.len())?;
    Ok(w - s.gradient(w) * eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Regularized,
    Budgeted,
    Unregularized,
    IgdRegularized,
    IgdBudgeted,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Regularized,
        SchemeKind::Budgeted,
        SchemeKind::Unregularized,
        SchemeKind::IgdRegularized,
        SchemeKind::IgdBudgeted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Regularized => "regularized",
            SchemeKind::Budgeted => "budgeted",
            SchemeKind::Unregularized => "unregularized",
            SchemeKind::IgdRegularized => "igd-of-regularized",
            SchemeKind::IgdBudgeted => "igd-of-budgeted",
        }
    }

    fn accepts(self, params: &StepParams) -> bool {
        match self {
            SchemeKind::Unregularized => true,
            SchemeKind::Regularized | SchemeKind::IgdRegularized => {
                matches!(params, StepParams::Coefficient { .. })
            }
            SchemeKind::Budgeted | SchemeKind::IgdBudgeted => {
                matches!(params, StepParams::Budget { .. })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub task: usize,
    pub params: StepParams,
    pub eta: f64,
    pub loss_before: f64,
    pub loss_after: f64,
}

/// Iterates `w_0..=w_k` of one run together with the ordering that drove it.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub iterates: Vec<Vector>,
    pub ordering: Vec<usize>,
    pub steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.ordering.len()
    }

    pub fn last(&self) -> &Vector {
        // Never empty: w_0 is always present.
        self.iterates.last().expect("trajectory holds w_0")
    }
}

/// Runs `kind` over `ordering` with per-step strengths from `schedule`,
/// starting at `w0` (zero vector when `None`).
///
/// The IGD kinds rebuild the surrogate of task `τ_t` at every step from the
/// step's strength and `η_t`. With `schedule.unregularized_first`, step 1 is a
/// train-to-convergence step for every kind.
pub fn run_continual(
    collection: &TaskCollection,
    ordering: &Ordering,
    schedule: &Schedule,
    kind: SchemeKind,
    w0: Option<&Vector>,
) -> Result<Trajectory> {
    let k = ordering.len();
    if schedule.len() != k || schedule.etas.len() != k {
        return Err(Error::LengthMismatch {
            schedule: schedule.len(),
            ordering: k,
        });
    }
    if ordering.tasks() != collection.len() {
        return Err(Error::DimensionMismatch {
            context: "ordering task count",
            expected: collection.len(),
            found: ordering.tasks(),
        });
    }
    let d = collection.dim();
    let start = match w0 {
        Some(w) => {
            check_len("initial iterate", d, w.len())?;
            w.clone()
        }
        None => Vector::zeros(d),
    };

    let mut iterates = Vec::with_capacity(k + 1);
    let mut steps = Vec::with_capacity(k);
    iterates.push(start);
    for (i, &m) in ordering.indices().iter().enumerate() {
        let task = collection.task(m)?;
        let params = schedule.strengths.at(i).ok_or(Error::LengthMismatch {
            schedule: schedule.len(),
            ordering: k,
        })?;
        if !kind.accepts(&params) {
            return Err(Error::ScheduleMismatch {
                scheme: kind.name(),
                schedule: schedule.strengths.label(),
            });
        }
        let eta = schedule.etas[i];
        let w = &iterates[i];
        let loss_before = task.loss(w)?;
        let next = if i == 0 && schedule.unregularized_first {
            unregularized_step(w, task)?
        } else {
            apply(kind, params, eta, w, task)?
        };
        let loss_after = task.loss(&next)?;
        steps.push(StepRecord {
            task: m,
            params,
            eta,
            loss_before,
            loss_after,
        });
        iterates.push(next);
    }
    Ok(Trajectory {
        iterates,
        ordering: ordering.indices().to_vec(),
        steps,
    })
}

fn apply(kind: SchemeKind, params: StepParams, eta: f64, w: &Vector, task: &RegressionTask) -> Result<Vector> {
    match (kind, params) {
        (SchemeKind::Unregularized, _) => unregularized_step(w, task),
        (SchemeKind::Regularized, StepParams::Coefficient { lambda }) => regularized_step(w, task, lambda),
        (SchemeKind::Budgeted, StepParams::Budget { gamma, steps }) => budgeted_step(w, task, gamma, steps),
        (SchemeKind::IgdRegularized, StepParams::Coefficient { lambda }) => {
            let s = build_regularized_surrogate(task, lambda, eta)?;
            igd_step(w, &s, eta)
        }
        (SchemeKind::IgdBudgeted, StepParams::Budget { gamma, steps }) => {
            let s = build_budgeted_surrogate(task, gamma, steps, eta)?;
            igd_step(w, &s, eta)
        }
        _ => Err(Error::ScheduleMismatch {
            scheme: kind.name(),
            schedule: "incompatible",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{sample_ordering, OrderingKind, Seed};
    use crate::schedules::{increasing_budget, increasing_coefficient};
    use crate::task::{generate_realizable, RealizableSpec};
    use alloc::vec;

    fn scalar(x: f64, y: f64) -> RegressionTask {
        RegressionTask::from_rows(1, 1, &[x], &[y]).unwrap()
    }

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    /// Golden-section minimization of the scalar regularized objective.
    fn argmin_scalar(x: f64, y: f64, lambda: f64, w: f64) -> f64 {
        let f = |u: f64| 0.5 * (x * u - y).powi(2) + 0.5 * lambda * (u - w).powi(2);
        let (mut a, mut b) = (-100.0f64, 100.0f64);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn regularized_scalar_matches_numeric_minimizer() {
        let out = regularized_step(&v(&[0.0]), &scalar(1.0, 2.0), 1.0).unwrap();
        let oracle = argmin_scalar(1.0, 2.0, 1.0, 0.0);
        assert!((oracle - 1.0).abs() < 1e-6);
        assert!((out[0] - oracle).abs() < 1e-6);
        assert!((out[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn regularized_fixed_point_and_frozen_limit() {
        let t = RegressionTask::from_rows(1, 2, &[1.0, 1.0], &[2.0]).unwrap();
        let w = v(&[0.5, 1.5]);
        for lambda in [1e-3, 1.0, 1e6] {
            let out = regularized_step(&w, &t, lambda).unwrap();
            assert!((out - &w).norm() < 1e-12);
        }
        let out = regularized_step(&v(&[0.0]), &scalar(1.0, 2.0), 1e12).unwrap();
        assert!(out[0].abs() <= 3e-12);
        assert!(regularized_step(&v(&[0.0]), &scalar(1.0, 2.0), 0.0).is_err());
    }

    #[test]
    fn budgeted_manual_steps() {
        let t = scalar(1.0, 2.0);
        assert!((budgeted_step(&v(&[0.0]), &t, 0.5, 1).unwrap()[0] - 1.0).abs() < 1e-15);
        assert!((budgeted_step(&v(&[0.0]), &t, 0.5, 2).unwrap()[0] - 1.5).abs() < 1e-15);
        assert_eq!(budgeted_step(&v(&[2.0]), &t, 0.3, 7).unwrap()[0], 2.0);
        assert!(budgeted_step(&v(&[0.0]), &t, 1.0, 1).is_err());
        assert!(budgeted_step(&v(&[0.0]), &t, 0.5, 0).is_err());
    }

    #[test]
    fn unregularized_projection() {
        let t = RegressionTask::from_rows(1, 2, &[1.0, 0.0], &[1.0]).unwrap();
        let out = unregularized_step(&v(&[0.0, 0.0]), &t).unwrap();
        assert!((out - v(&[1.0, 0.0])).norm() < 1e-15);
        let feasible = v(&[1.0, 5.0]);
        assert!((unregularized_step(&feasible, &t).unwrap() - &feasible).norm() < 1e-15);

        let t = RegressionTask::from_rows(2, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, -1.0], &[1.0, 3.0]).unwrap();
        let once = unregularized_step(&v(&[0.3, -0.2, 4.0]), &t).unwrap();
        let twice = unregularized_step(&once, &t).unwrap();
        assert!((once - twice).norm() < 1e-13);
    }

    #[test]
    fn igd_reproduces_both_schemes_on_scalar() {
        let t = scalar(1.0, 2.0);
        let s = build_regularized_surrogate(&t, 1.0, 1.0).unwrap();
        assert!((igd_step(&v(&[0.0]), &s, 1.0).unwrap()[0] - 1.0).abs() < 1e-15);
        assert_eq!(igd_step(&v(&[2.0]), &s, 1.0).unwrap()[0], 2.0);
        let s = build_budgeted_surrogate(&t, 0.5, 2, 1.0).unwrap();
        assert!((igd_step(&v(&[0.0]), &s, 1.0).unwrap()[0] - 1.5).abs() < 1e-15);
    }

    fn small_collection() -> TaskCollection {
        generate_realizable(&RealizableSpec {
            dim: 5,
            tasks: 4,
            rows: 2,
            radius: 1.0,
            seed: 11,
        })
        .unwrap()
    }

    #[test]
    fn empty_horizon_returns_start() {
        let c = small_collection();
        let o = sample_ordering(OrderingKind::WithReplacement, c.len(), 0, Seed::new(0)).unwrap();
        let s = Schedule::unregularized(0);
        let traj = run_continual(&c, &o, &s, SchemeKind::Unregularized, None).unwrap();
        assert_eq!(traj.iterates.len(), 1);
        assert_eq!(traj.iterates[0], Vector::zeros(5));
    }

    #[test]
    fn planted_start_is_a_fixed_point_for_every_scheme() {
        let c = small_collection();
        let w_star = c.planted().unwrap().clone();
        let k = 12;
        let o = sample_ordering(OrderingKind::WithReplacement, c.len(), k, Seed::new(2)).unwrap();
        let coef = increasing_coefficient(c.radius(), k).unwrap();
        let budget = increasing_budget(c.radius(), k, 2).unwrap();
        for kind in SchemeKind::ALL {
            let s = match kind {
                SchemeKind::Budgeted | SchemeKind::IgdBudgeted => &budget,
                _ => &coef,
            };
            let traj = run_continual(&c, &o, s, kind, Some(&w_star)).unwrap();
            for w in &traj.iterates {
                assert!((w - &w_star).norm() < 1e-12, "{}", kind.name());
            }
        }
    }

    #[test]
    fn single_task_single_projection_solves_it() {
        let t = RegressionTask::from_rows(2, 3, &[1.0, 0.0, 1.0, 0.0, 2.0, 1.0], &[1.0, -1.0]).unwrap();
        let c = TaskCollection::new(vec![t]).unwrap();
        let o = Ordering::explicit(vec![0], 1).unwrap();
        let traj = run_continual(&c, &o, &Schedule::unregularized(1), SchemeKind::Unregularized, None).unwrap();
        assert!(crate::metrics::average_loss(traj.last(), &c).unwrap() < 1e-28);
    }

    #[test]
    fn mismatches_are_rejected() {
        let c = small_collection();
        let o = sample_ordering(OrderingKind::WithReplacement, c.len(), 5, Seed::new(1)).unwrap();
        let short = increasing_coefficient(1.0, 4).unwrap();
        assert!(matches!(
            run_continual(&c, &o, &short, SchemeKind::Regularized, None),
            Err(Error::LengthMismatch { .. })
        ));
        let budget = increasing_budget(1.0, 5, 1).unwrap();
        assert!(matches!(
            run_continual(&c, &o, &budget, SchemeKind::Regularized, None),
            Err(Error::ScheduleMismatch { .. })
        ));
        let coef = increasing_coefficient(1.0, 5).unwrap();
        assert!(matches!(
            run_continual(&c, &o, &coef, SchemeKind::IgdBudgeted, None),
            Err(Error::ScheduleMismatch { .. })
        ));
    }

    #[test]
    fn unregularized_first_flag() {
        let c = small_collection();
        let o = Ordering::explicit(vec![2, 1], c.len()).unwrap();
        let s = increasing_coefficient(1.0, 2).unwrap().with_unregularized_first(true);
        let traj = run_continual(&c, &o, &s, SchemeKind::Regularized, None).unwrap();
        assert!(traj.steps[0].loss_after < 1e-25);
    }
}
