//! Lower-bound task collections.
//!
//! Both constructions sample one "rare" task with probability `1/k` and a
//! "common" task otherwise. The nonuniform law is realized by replication: the
//! collection holds `k − 1` copies of the common task and one rare task, so a
//! uniform ordering over it reproduces the law exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::Vector;
use crate::task::{RegressionTask, TaskCollection};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct AdversarialScenario {
    pub collection: TaskCollection,
    pub description: String,
    pub target_rate: &'static str,
    /// The threshold is `threshold_scale / k`.
    pub threshold_scale: f64,
    /// Minimum success probability the scenario is checked against (0 when
    /// the claim is about an expectation).
    pub success_prob_floor: f64,
    /// Suggested `w_0`, when the construction depends on one.
    pub initial: Option<Vector>,
    /// The joint solution `w★`.
    pub solution: Vector,
    /// Sign chosen by the adversary (any-algorithm construction only).
    pub sign: Option<f64>,
}

impl AdversarialScenario {
    pub fn threshold(&self, k: usize) -> f64 {
        self.threshold_scale / k as f64
    }
}

fn unit_row(d: usize, entries: &[(usize, f64)], target: f64) -> Result<RegressionTask> {
    let mut row = alloc::vec![0.0; d];
    for &(i, x) in entries {
        row[i] = x;
    }
    RegressionTask::from_rows(1, d, &row, &[target])
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimensions(format!("need d >= 2, got {d}")))
    } else {
        Ok(())
    }
}

/// Seen-task lower bound for the ridge scheme: `k − 1` copies of
/// `(e₂ᵀ, 0)` and one `(xᵀ, 0)` with `x = (√(1 − α²), α, 0, …)`, `α = √½`.
/// Start from `w_0 = e₁`; the claim is
/// `Pr[L_{1:k}(w_k) ≥ 1/(144k)] ≥ 0.15`.
pub fn seen_task_lb_collection(k: usize, d: usize) -> Result<AdversarialScenario> {
    if k < 9 {
        return Err(Error::param("k", format!("construction needs k >= 9, got {k}")));
    }
    check_dim(d)?;
    let alpha = libm::sqrt(0.5);
    let common = unit_row(d, &[(1, 1.0)], 0.0)?;
    let rare = unit_row(d, &[(0, libm::sqrt(1.0 - alpha * alpha)), (1, alpha)], 0.0)?;
    let mut tasks: Vec<RegressionTask> = (0..k - 1).map(|_| common.clone()).collect();
    tasks.push(rare);
    let mut initial = Vector::zeros(d);
    initial[0] = 1.0;
    Ok(AdversarialScenario {
        collection: TaskCollection::new(tasks)?.with_planted(Vector::zeros(d))?,
        description: format!(
            "{} copies of (e2, 0) and one (x, 0) with x = (sqrt(1/2), sqrt(1/2), 0, ...), d = {d}",
            k - 1
        ),
        target_rate: "Omega(1/k) seen-task loss with constant probability",
        threshold_scale: 1.0 / 144.0,
        success_prob_floor: 0.15,
        initial: Some(initial),
        solution: Vector::zeros(d),
        sign: None,
    })
}

/// Any-algorithm lower bound.
///
/// The probe is run `probe_trials` times on `k` copies of `(e₁ᵀ, 0)`; its
/// output `w̃` decides the sign `a = +1` if `Pr(w̃[2] ≤ 0) ≥ ½`, else `−1`.
/// The returned collection is `k − 1` copies of `(e₁ᵀ, 0)` and one
/// `(e₂ᵀ, a)`, solved by `w★ = a·e₂`. The claim is
/// `E[L(w_k) − L(w★)] ≥ 1/(64k)`.
pub fn any_alg_lb_collection<P>(
    k: usize,
    d: usize,
    mut probe: P,
    probe_trials: usize,
) -> Result<AdversarialScenario>
where
    P: FnMut(&TaskCollection, usize) -> Result<Vector>,
{
    if k < 2 {
        return Err(Error::param("k", format!("construction needs k >= 2, got {k}")));
    }
    check_dim(d)?;
    if probe_trials < 1 {
        return Err(Error::param("probe_trials", "must be >= 1"));
    }
    let common = unit_row(d, &[(0, 1.0)], 0.0)?;
    let probe_set = TaskCollection::new((0..k).map(|_| common.clone()).collect())?;
    let mut nonpositive = 0usize;
    for trial in 0..probe_trials {
        let w = probe(&probe_set, trial)?;
        if w.len() != d {
            return Err(Error::Probe(format!(
                "probe returned a vector of length {}, expected {d}",
                w.len()
            )));
        }
        if !w[1].is_finite() {
            return Err(Error::Probe(String::from("probe returned a non-finite vector")));
        }
        if w[1] <= 0.0 {
            nonpositive += 1;
        }
    }
    let sign = if 2 * nonpositive >= probe_trials { 1.0 } else { -1.0 };

    let rare = unit_row(d, &[(1, 1.0)], sign)?;
    let mut tasks: Vec<RegressionTask> = (0..k - 1).map(|_| common.clone()).collect();
    tasks.push(rare);
    let mut solution = Vector::zeros(d);
    solution[1] = sign;
    Ok(AdversarialScenario {
        collection: TaskCollection::new(tasks)?.with_planted(solution.clone())?,
        description: format!("{} copies of (e1, 0) and one (e2, {sign}), d = {d}", k - 1),
        target_rate: "Omega(1/k) expected excess loss for any algorithm",
        threshold_scale: 1.0 / 64.0,
        success_prob_floor: 0.0,
        initial: None,
        solution,
        sign: Some(sign),
    })
}
