//! Monte Carlo runs against the lower-bound constructions.

use contreg_core::metrics::average_loss;
use contreg_core::{
    any_alg_lb_collection, run_continual, sample_ordering, seen_task_lb_collection, seen_task_loss,
    OrderingKind, SchemeKind, Seed, TaskCollection, Vector,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ScheduleConfig, SchemeName};
use crate::error::Result;

/// A scheme paired with the schedule family that drives it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Method {
    pub scheme: SchemeName,
    pub schedule: ScheduleConfig,
}

impl Method {
    pub const fn new(scheme: SchemeName, schedule: ScheduleConfig) -> Self {
        Method { scheme, schedule }
    }

    pub fn label(&self) -> String {
        format!("{}/{}", SchemeKind::from(self.scheme).name(), self.schedule.name())
    }

    /// Final iterate after one ordering of length `k` over `c`.
    pub fn run(&self, c: &TaskCollection, k: usize, w0: &Vector, seed: Seed) -> Result<Vector> {
        let schedule = self.schedule.build(c.radius(), k)?;
        let ordering = sample_ordering(OrderingKind::WithReplacement, c.len(), k, seed)?;
        let traj = run_continual(c, &ordering, &schedule, self.scheme.into(), Some(w0))?;
        Ok(traj.last().clone())
    }
}

/// Every built-in scheme with each schedule family it accepts.
pub fn builtin_methods() -> Vec<Method> {
    use ScheduleConfig as Sc;
    use SchemeName as Sn;
    let fixed_budget = Sc::FixedBudget { step_fraction: 0.5 };
    let increasing_budget = Sc::IncreasingBudget { inner_steps: 1 };
    vec![
        Method::new(Sn::Regularized, Sc::FixedCoefficient),
        Method::new(Sn::Regularized, Sc::IncreasingCoefficient),
        Method::new(Sn::Budgeted, fixed_budget),
        Method::new(Sn::Budgeted, increasing_budget),
        Method::new(Sn::IgdOfRegularized, Sc::FixedCoefficient),
        Method::new(Sn::IgdOfRegularized, Sc::IncreasingCoefficient),
        Method::new(Sn::IgdOfBudgeted, fixed_budget),
        Method::new(Sn::IgdOfBudgeted, increasing_budget),
        Method::new(Sn::Unregularized, Sc::Unregularized),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    SeenTask,
    AnyAlgorithm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialReport {
    pub scenario: ScenarioName,
    pub method: String,
    pub k: usize,
    pub orderings: usize,
    /// Loss threshold `c/k` of the construction.
    pub threshold: f64,
    /// Empirical success probability (seen-task) or mean excess loss
    /// (any-algorithm).
    pub statistic: f64,
    /// Value `statistic` must reach.
    pub required: f64,
    pub sign: Option<f64>,
    pub passed: bool,
}

const PROBE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Fraction of orderings whose final seen-task loss reaches `1/(144k)`,
/// starting from `e₁`.
pub fn seen_task_trial(method: Method, k: usize, orderings: usize, seed: u64) -> Result<AdversarialReport> {
    let d = 2;
    let s = seen_task_lb_collection(k, d)?;
    let c = &s.collection;
    let w0 = s.initial.clone().unwrap_or_else(|| Vector::zeros(d));
    let threshold = s.threshold(k);
    let schedule = method.schedule.build(c.radius(), k)?;
    let base = Seed::new(seed);
    let hits = (0..orderings as u32)
        .into_par_iter()
        .map(|trial| {
            let ordering = sample_ordering(OrderingKind::WithReplacement, c.len(), k, base.split(k as u32, trial))?;
            let traj = run_continual(c, &ordering, &schedule, method.scheme.into(), Some(&w0))?;
            Ok(seen_task_loss(traj.last(), c, &traj.ordering)? >= threshold)
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&hit| hit)
        .count();
    let statistic = hits as f64 / orderings as f64;
    Ok(AdversarialReport {
        scenario: ScenarioName::SeenTask,
        method: method.label(),
        k,
        orderings,
        threshold,
        statistic,
        required: s.success_prob_floor,
        sign: None,
        passed: statistic >= s.success_prob_floor,
    })
}

/// Mean excess average loss on the any-algorithm construction, with the sign
/// chosen from `probe_trials` runs of the same method.
pub fn any_algorithm_trial(
    method: Method,
    k: usize,
    orderings: usize,
    probe_trials: usize,
    seed: u64,
) -> Result<AdversarialReport> {
    let d = 2;
    let probe_base = Seed::new(seed ^ PROBE_SALT);
    let w0 = Vector::zeros(d);
    let s = any_alg_lb_collection(
        k,
        d,
        |c, trial| method.run(c, k, &w0, probe_base.split(k as u32, trial as u32)).map_err(core_error),
        probe_trials,
    )?;
    let c = &s.collection;
    let floor = average_loss(&s.solution, c)?;
    let base = Seed::new(seed);
    let total: f64 = (0..orderings as u32)
        .into_par_iter()
        .map(|trial| {
            let w = method.run(c, k, &w0, base.split(k as u32, trial))?;
            Ok(average_loss(&w, c)? - floor)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    let statistic = total / orderings as f64;
    let threshold = s.threshold(k);
    Ok(AdversarialReport {
        scenario: ScenarioName::AnyAlgorithm,
        method: method.label(),
        k,
        orderings,
        threshold,
        statistic,
        required: threshold,
        sign: s.sign,
        passed: statistic >= threshold,
    })
}

fn core_error(e: crate::error::HarnessError) -> contreg_core::Error {
    match e {
        crate::error::HarnessError::Core(inner) => inner,
        other => contreg_core::Error::Probe(other.to_string()),
    }
}
