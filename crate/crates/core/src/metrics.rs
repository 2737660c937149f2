//! Evaluation quantities: average loss, seen-task loss and loss degradation.

use crate::linalg::{check_len, Vector};
use crate::schemes::Trajectory;
use crate::task::TaskCollection;
use crate::{Error, Result};

/// `(1/2M) Σ_m ‖X_m w − y_m‖²`.
pub fn average_loss(w: &Vector, c: &TaskCollection) -> Result<f64> {
    check_len("average loss", c.dim(), w.len())?;
    let total = c.tasks().iter().map(|t| t.loss(w)).sum::<Result<f64>>()?;
    Ok(total / c.len() as f64)
}

/// Mean of `L(w; m) − min L(·; m)` over the collection.
pub fn average_excess_loss(w: &Vector, c: &TaskCollection) -> Result<f64> {
    check_len("average excess loss", c.dim(), w.len())?;
    let total = c.tasks().iter().map(|t| t.excess_loss(w)).sum::<Result<f64>>()?;
    Ok(total / c.len() as f64)
}

/// `(1/k) Σ_t L(w; τ_t)` over the prefix, with multiplicity.
pub fn seen_task_loss(w: &Vector, c: &TaskCollection, prefix: &[usize]) -> Result<f64> {
    if prefix.is_empty() {
        return Err(Error::EmptyPrefix);
    }
    let mut total = 0.0;
    for &m in prefix {
        total += c.task(m)?.loss(w)?;
    }
    Ok(total / prefix.len() as f64)
}

/// `(1/k) Σ_t [L(w_k; τ_t) − L(w_t; τ_t)]`. Negative values mean backward
/// transfer. Zero for an empty trajectory.
pub fn loss_degradation(traj: &Trajectory, c: &TaskCollection) -> Result<f64> {
    let k = traj.horizon();
    if k == 0 {
        return Ok(0.0);
    }
    let seen = seen_task_loss(traj.last(), c, &traj.ordering)?;
    let mut at_training = 0.0;
    for (t, &m) in traj.ordering.iter().enumerate() {
        at_training += c.task(m)?.loss(&traj.iterates[t + 1])?;
    }
    Ok(seen - at_training / k as f64)
}

/// Final-iterate metrics of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub avg_loss: f64,
    pub seen_loss: f64,
    pub degradation: f64,
    pub dist_to_wstar: f64,
}

impl MetricsRecord {
    /// Measures the last iterate of `traj`. `seen_loss` is 0 for `k = 0`.
    pub fn measure(traj: &Trajectory, c: &TaskCollection, w_star: &Vector) -> Result<Self> {
        let w = traj.last();
        check_len("reference solution", c.dim(), w_star.len())?;
        let seen_loss = if traj.horizon() == 0 {
            0.0
        } else {
            seen_task_loss(w, c, &traj.ordering)?
        };
        Ok(MetricsRecord {
            avg_loss: average_loss(w, c)?,
            seen_loss,
            degradation: loss_degradation(traj, c)?,
            dist_to_wstar: (w - w_star).norm(),
        })
    }
}
