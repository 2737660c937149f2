//! Regularization-strength schedules.
//!
//! A [`Schedule`] carries, for every step `t = 1..k`, either a ridge
//! coefficient `λ_t` or an inner-loop budget `(γ_t, N_t)`, plus the
//! bookkeeping step size `η_t` of the equivalent incremental gradient step and
//! the sandwich weight `ν_t`. Arrays are stored zero-based: entry `t − 1`
//! belongs to step `t`.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScheduleKind {
    FixedCoefficient,
    FixedBudget,
    IncreasingCoefficient,
    IncreasingBudget,
    Custom,
}

impl ScheduleKind {
    pub fn name(self) -> &'static str {
        match self {
            ScheduleKind::FixedCoefficient => "fixed-coefficient",
            ScheduleKind::FixedBudget => "fixed-budget",
            ScheduleKind::IncreasingCoefficient => "increasing-coefficient",
            ScheduleKind::IncreasingBudget => "increasing-budget",
            ScheduleKind::Custom => "custom",
        }
    }
}

/// Per-step regularization strengths.
#[derive(Debug, Clone, PartialEq)]
pub enum Strengths {
    Coefficient(Vec<f64>),
    Budget { gammas: Vec<f64>, steps: Vec<u32> },
    /// No strengths (train-to-convergence baseline).
    None(usize),
}

impl Strengths {
    pub fn len(&self) -> usize {
        match self {
            Strengths::Coefficient(l) => l.len(),
            Strengths::Budget { gammas, .. } => gammas.len(),
            Strengths::None(k) => *k,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn label(&self) -> &'static str {
        match self {
            Strengths::Coefficient(_) => "coefficient",
            Strengths::Budget { .. } => "budget",
            Strengths::None(_) => "empty",
        }
    }

    /// Strength at zero-based step `i`.
    pub fn at(&self, i: usize) -> Option<StepParams> {
        match self {
            Strengths::Coefficient(l) => l.get(i).map(|&lambda| StepParams::Coefficient { lambda }),
            Strengths::Budget { gammas, steps } => Some(StepParams::Budget {
                gamma: *gammas.get(i)?,
                steps: *steps.get(i)?,
            }),
            Strengths::None(k) => (i < *k).then_some(StepParams::Unregularized),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepParams {
    Coefficient { lambda: f64 },
    Budget { gamma: f64, steps: u32 },
    Unregularized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub strengths: Strengths,
    /// Bookkeeping step sizes `η_t`.
    pub etas: Vec<f64>,
    /// Sandwich weights `ν_t`.
    pub weights: Vec<f64>,
    /// Train the first task to convergence (the `λ_1 → 0` variant).
    pub unregularized_first: bool,
    /// `λ` hit the positivity clamp (fixed coefficient with `ln k ≤ 1`).
    pub clamped: bool,
    /// Real-valued budget `N*` before rounding (fixed budget only).
    pub budget_target: Option<f64>,
    /// Realized `1 − (1 − γR²)^N` after rounding (fixed budget only).
    pub realized_smoothness: Option<f64>,
    /// Target `1/ln k` (fixed schedules).
    pub target_smoothness: Option<f64>,
}

impl Schedule {
    fn plain(kind: ScheduleKind, strengths: Strengths, etas: Vec<f64>) -> Self {
        let weights = etas.clone();
        Schedule {
            kind,
            strengths,
            etas,
            weights,
            unregularized_first: false,
            clamped: false,
            budget_target: None,
            realized_smoothness: None,
            target_smoothness: None,
        }
    }

    /// Constant coefficient `λ` with `η_t = 1`.
    pub fn constant_coefficient(lambda: f64, k: usize) -> Result<Self> {
        positive("lambda", lambda)?;
        Ok(Self::plain(
            ScheduleKind::Custom,
            Strengths::Coefficient(alloc::vec![lambda; k]),
            alloc::vec![1.0; k],
        ))
    }

    /// Constant budget `(γ, N)` with `η_t = γN`.
    pub fn constant_budget(gamma: f64, steps: u32, k: usize) -> Result<Self> {
        positive("gamma", gamma)?;
        if steps == 0 {
            return Err(Error::param("N", "inner step count must be >= 1"));
        }
        Ok(Self::plain(
            ScheduleKind::Custom,
            Strengths::Budget {
                gammas: alloc::vec![gamma; k],
                steps: alloc::vec![steps; k],
            },
            alloc::vec![gamma * f64::from(steps); k],
        ))
    }

    /// Placeholder schedule for the train-to-convergence baseline.
    pub fn unregularized(k: usize) -> Self {
        Self::plain(ScheduleKind::Custom, Strengths::None(k), alloc::vec![1.0; k])
    }

    /// Fully custom per-step arrays.
    pub fn custom(strengths: Strengths, etas: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let k = strengths.len();
        if etas.len() != k || weights.len() != k {
            return Err(Error::param(
                "schedule",
                format!(
                    "array lengths differ: strengths {k}, etas {}, weights {}",
                    etas.len(),
                    weights.len()
                ),
            ));
        }
        for &eta in &etas {
            positive("eta", eta)?;
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::param("nu", "weights must be finite and nonnegative"));
        }
        match &strengths {
            Strengths::Coefficient(l) => l.iter().try_for_each(|&x| positive("lambda", x))?,
            Strengths::Budget { gammas, steps } => {
                if steps.len() != gammas.len() {
                    return Err(Error::param("N", "budget arrays differ in length"));
                }
                gammas.iter().try_for_each(|&g| positive("gamma", g))?;
                if steps.contains(&0) {
                    return Err(Error::param("N", "inner step count must be >= 1"));
                }
            }
            Strengths::None(_) => {}
        }
        Ok(Schedule {
            weights,
            ..Self::plain(ScheduleKind::Custom, strengths, etas)
        })
    }

    pub fn with_unregularized_first(mut self, on: bool) -> Self {
        self.unregularized_first = on;
        self
    }

    pub fn len(&self) -> usize {
        self.strengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks `0 < γ_t R² < 1` for every budget step against radius `r`.
    pub fn validate_radius(&self, r: f64) -> Result<()> {
        if let Strengths::Budget { gammas, .. } = &self.strengths {
            let r2 = r * r;
            for (t, &g) in gammas.iter().enumerate() {
                if !(g > 0.0 && g * r2 < 1.0) {
                    return Err(Error::param(
                        "gamma",
                        format!("step {}: gamma * R^2 = {} outside (0, 1)", t + 1, g * r2),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {x}")))
    }
}

fn horizon_at_least(k: usize, min: usize) -> Result<()> {
    if k < min {
        Err(Error::param("k", format!("horizon must be >= {min}, got {k}")))
    } else {
        Ok(())
    }
}

/// Lower clamp on the fixed coefficient, as a multiple of `R²`.
pub const LAMBDA_FLOOR: f64 = 1e-6;

/// `λ = R²(ln k − 1)` for all steps (clamped at `1e-6·R²` when `ln k ≤ 1`),
/// `η_t = 1`.
pub fn fixed_coefficient(r: f64, k: usize) -> Result<Schedule> {
    positive("R", r)?;
    horizon_at_least(k, 2)?;
    let r2 = r * r;
    let ln_k = libm::log(k as f64);
    let raw = r2 * (ln_k - 1.0);
    let floor = LAMBDA_FLOOR * r2;
    let clamped = raw < floor;
    let lambda = if clamped { floor } else { raw };
    let mut s = Schedule::plain(
        ScheduleKind::FixedCoefficient,
        Strengths::Coefficient(alloc::vec![lambda; k]),
        alloc::vec![1.0; k],
    );
    s.clamped = clamped;
    s.target_smoothness = Some(1.0 / ln_k);
    Ok(s)
}

/// `N* = ln(1 − 1/ln k) / ln(1 − γR²)`, rounded to the nearest integer with
/// floor 1, for all steps; `η_t = 1`.
pub fn fixed_budget(r: f64, gamma: f64, k: usize) -> Result<Schedule> {
    positive("R", r)?;
    let r2 = r * r;
    if !(gamma > 0.0 && gamma * r2 < 1.0) {
        return Err(Error::param(
            "gamma",
            format!("need 0 < gamma * R^2 < 1, got {}", gamma * r2),
        ));
    }
    let ln_k = libm::log(k as f64);
    if ln_k.is_nan() || ln_k <= 1.0 {
        return Err(Error::param(
            "k",
            format!("budget formula needs ln k > 1 (k >= 3), got k = {k}"),
        ));
    }
    let target = libm::log(1.0 - 1.0 / ln_k) / libm::log(1.0 - gamma * r2);
    let steps = libm::round(target).max(1.0);
    if steps > f64::from(u32::MAX) {
        return Err(Error::param("N", format!("budget {target} is too large")));
    }
    let steps = steps as u32;
    let mut s = Schedule::plain(
        ScheduleKind::FixedBudget,
        Strengths::Budget {
            gammas: alloc::vec![gamma; k],
            steps: alloc::vec![steps; k],
        },
        alloc::vec![1.0; k],
    );
    s.budget_target = Some(target);
    s.realized_smoothness = Some(1.0 - libm::pow(1.0 - gamma * r2, f64::from(steps)));
    s.target_smoothness = Some(1.0 / ln_k);
    Ok(s)
}

/// `η_t = (3/(13R²))·(k − t + 2)/(k + 1)` for `t = 1..k`.
fn increasing_etas(r: f64, k: usize) -> Vec<f64> {
    let base = 3.0 / (13.0 * r * r);
    linear_decay(base, k)
}

fn linear_decay(eta: f64, k: usize) -> Vec<f64> {
    let kf = k as f64;
    (1..=k).map(|t| eta * (kf - t as f64 + 2.0) / (kf + 1.0)).collect()
}

/// `λ_t = (13R²/3)·(k + 1)/(k − t + 2)`, `η_t = ν_t = 1/λ_t`.
pub fn increasing_coefficient(r: f64, k: usize) -> Result<Schedule> {
    positive("R", r)?;
    horizon_at_least(k, 2)?;
    let kf = k as f64;
    let lambdas: Vec<f64> = (1..=k)
        .map(|t| 13.0 * r * r / 3.0 * (kf + 1.0) / (kf - t as f64 + 2.0))
        .collect();
    let etas = lambdas.iter().map(|l| 1.0 / l).collect();
    Ok(Schedule::plain(
        ScheduleKind::IncreasingCoefficient,
        Strengths::Coefficient(lambdas),
        etas,
    ))
}

/// `η_t = (3/(13R²))·(k − t + 2)/(k + 1)`, `N_t = steps`, `γ_t = η_t/N_t`,
/// `ν_t = η_t`.
pub fn increasing_budget(r: f64, k: usize, steps: u32) -> Result<Schedule> {
    positive("R", r)?;
    horizon_at_least(k, 2)?;
    if steps == 0 {
        return Err(Error::param("N", "inner step count must be >= 1"));
    }
    let etas = increasing_etas(r, k);
    let n = f64::from(steps);
    let gammas: Vec<f64> = etas.iter().map(|e| e / n).collect();
    let s = Schedule::plain(
        ScheduleKind::IncreasingBudget,
        Strengths::Budget {
            gammas,
            steps: alloc::vec![steps; k],
        },
        etas,
    );
    s.validate_radius(r)?;
    Ok(s)
}

/// `η_t = η·(k − t + 2)/(k + 1)` for `t = 1..k`, requiring `η ≤ 3/(13β)`.
pub fn linear_decay_steps(eta: f64, k: usize, beta: f64) -> Result<Vec<f64>> {
    positive("eta", eta)?;
    positive("beta", beta)?;
    let limit = 3.0 / (13.0 * beta);
    if eta > limit * (1.0 + 1e-12) {
        return Err(Error::param(
            "eta",
            format!("{eta} exceeds 3/(13 beta) = {limit}"),
        ));
    }
    Ok(linear_decay(eta, k))
}

/// Numeric check of the step-size certificate: with `η_t = η(k − t + 1)/k`,
/// `v_t = 2/(k − t + 1) + 1/k` for `t < k`, `v_k = v_{k−1}`, and
/// `c_t = η_t v_t² − a₁βη_t²v_t² − (1 + a₂η_tβ)(v_t − v_{t−1}) Σ_{s≥t} η_s v_s`,
/// every `c_t` is nonnegative and `c_k ≥ η/k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub k: usize,
    pub beta: f64,
    pub eta: f64,
    pub a1: f64,
    pub a2: f64,
    /// `v_0..=v_k`.
    pub v: Vec<f64>,
    /// `η_1..=η_k`.
    pub etas: Vec<f64>,
    /// `c_1..=c_k`.
    pub c: Vec<f64>,
    pub min_c: f64,
    pub c_k: f64,
    pub pass: bool,
}

const CERTIFICATE_SLACK: f64 = 1e-12;

pub fn certificate_check(k: usize, beta: f64, eta: f64, a1: f64, a2: f64) -> Result<CertificateReport> {
    horizon_at_least(k, 2)?;
    positive("beta", beta)?;
    positive("eta", eta)?;
    positive("a1", a1)?;
    positive("a2", a2)?;
    let limit = 3.0 / ((8.0 * a1 + 5.0 * a2) * beta);
    if eta > limit * (1.0 + 1e-12) {
        return Err(Error::param(
            "eta",
            format!("{eta} exceeds 3/((8 a1 + 5 a2) beta) = {limit}"),
        ));
    }
    let kf = k as f64;
    let etas: Vec<f64> = (1..=k).map(|t| eta * (kf - t as f64 + 1.0) / kf).collect();
    let mut v: Vec<f64> = (0..k).map(|t| 2.0 / (kf - t as f64 + 1.0) + 1.0 / kf).collect();
    v.push(v[k - 1]);

    // tail[t - 1] = Σ_{s=t}^{k} η_s v_s
    let mut tail = alloc::vec![0.0; k + 1];
    for t in (1..=k).rev() {
        tail[t - 1] = tail[t] + etas[t - 1] * v[t];
    }
    let c: Vec<f64> = (1..=k)
        .map(|t| {
            let e = etas[t - 1];
            let vt = v[t];
            e * vt * vt - a1 * beta * e * e * vt * vt - (1.0 + a2 * e * beta) * (vt - v[t - 1]) * tail[t - 1]
        })
        .collect();
    let min_c = c.iter().copied().fold(f64::INFINITY, f64::min);
    let c_k = c[k - 1];
    let pass = min_c >= -CERTIFICATE_SLACK && c_k >= eta / kf - CERTIFICATE_SLACK;
    Ok(CertificateReport {
        k,
        beta,
        eta,
        a1,
        a2,
        v,
        etas,
        c,
        min_c,
        c_k,
        pass,
    })
}
