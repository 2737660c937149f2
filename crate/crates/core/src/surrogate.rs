//! Quadratic surrogates `f(w) = ½(w − p)ᵀA(w − p)` whose single gradient step
//! reproduces one regularized or budgeted task update.
//!
//! Every builder goes through the same path: eigendecompose `XᵀX`, map each
//! eigenvalue through a scalar function, reassemble and symmetrize. With
//! `A = (1/η)·h(XᵀX)`:
//!
//! | kind        | `h(ξ)`                 | `h'(0)` |
//! |-------------|------------------------|---------|
//! | regularized | `ξ / (ξ + λ)`          | `1/λ`   |
//! | budgeted    | `1 − (1 − γξ)^N`       | `γN`    |
//! | identity    | `ξ`                    | `1`     |
//!
//! With `β = h(R_m²)/η` the excess loss of the task is bracketed by
//! `(η/h'(0))·f(w) ≤ L(w) − min L ≤ (R_m²/β)·f(w)`; see [`sandwich_check`].

use alloc::format;

use crate::linalg::{check_len, max_symmetric_eigenvalue, GramEigen, Matrix, Vector};
use crate::task::RegressionTask;
use crate::{Error, Result};

/// Tolerance on `h(0) = 0` for custom spectral maps.
const ZERO_AT_ORIGIN_TOL: f64 = 1e-10;

/// Dimensionless scalar map `h` applied to the eigenvalues of `XᵀX`.
#[derive(Debug, Clone, Copy)]
pub enum SpectralMap {
    Identity,
    Regularized { lambda: f64 },
    Budgeted { gamma: f64, steps: u32 },
    /// Caller-supplied `h`. The caller asserts it is nondecreasing and concave
    /// on `[0, R_m²]`; `slope_at_zero` is `h'(0)`.
    Custom { h: fn(f64) -> f64, slope_at_zero: f64 },
}

impl SpectralMap {
    pub fn eval(&self, xi: f64) -> f64 {
        match *self {
            SpectralMap::Identity => xi,
            SpectralMap::Regularized { lambda } => xi / (xi + lambda),
            SpectralMap::Budgeted { gamma, steps } => {
                1.0 - libm::pow(1.0 - gamma * xi, f64::from(steps))
            }
            SpectralMap::Custom { h, .. } => h(xi),
        }
    }

    pub fn slope_at_zero(&self) -> f64 {
        match *self {
            SpectralMap::Identity => 1.0,
            SpectralMap::Regularized { lambda } => 1.0 / lambda,
            SpectralMap::Budgeted { gamma, steps } => gamma * f64::from(steps),
            SpectralMap::Custom { slope_at_zero, .. } => slope_at_zero,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SurrogateKind {
    Regularized { lambda: f64, eta: f64 },
    Budgeted { gamma: f64, steps: u32, eta: f64 },
    Spectral { map: SpectralMap, eta: f64 },
    /// Built from a caller-supplied matrix; no sandwich constants.
    Verbatim,
}

impl SurrogateKind {
    pub fn name(&self) -> &'static str {
        match self {
            SurrogateKind::Regularized { .. } => "regularized",
            SurrogateKind::Budgeted { .. } => "budgeted",
            SurrogateKind::Spectral { .. } => "spectral",
            SurrogateKind::Verbatim => "verbatim",
        }
    }

    fn map_and_eta(&self) -> Option<(SpectralMap, f64)> {
        match *self {
            SurrogateKind::Regularized { lambda, eta } => {
                Some((SpectralMap::Regularized { lambda }, eta))
            }
            SurrogateKind::Budgeted { gamma, steps, eta } => {
                Some((SpectralMap::Budgeted { gamma, steps }, eta))
            }
            SurrogateKind::Spectral { map, eta } => Some((map, eta)),
            SurrogateKind::Verbatim => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SurrogateQuadratic {
    a: Matrix,
    anchor: Vector,
    beta: f64,
    kind: SurrogateKind,
    task_norm: f64,
}

impl SurrogateQuadratic {
    /// Wraps an arbitrary symmetric PSD matrix and anchor. `beta` is the
    /// largest eigenvalue of `a`.
    pub fn verbatim(a: Matrix, anchor: Vector) -> Result<Self> {
        let d = anchor.len();
        check_len("surrogate matrix rows", d, a.nrows())?;
        check_len("surrogate matrix cols", d, a.ncols())?;
        let scale = a.amax().max(f64::MIN_POSITIVE);
        if (&a - a.transpose()).amax() > 1e-10 * scale {
            return Err(Error::param("A", "matrix is not symmetric"));
        }
        let beta = max_symmetric_eigenvalue(&a).max(0.0);
        Ok(SurrogateQuadratic {
            a,
            anchor,
            beta,
            kind: SurrogateKind::Verbatim,
            task_norm: 0.0,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    /// `X⁺y` of the task the surrogate was built from.
    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    /// Smoothness constant, `(1/η)·h(R_m²)`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kind(&self) -> SurrogateKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// Spectral norm of the source task's features (`R_m`).
    pub fn task_norm(&self) -> f64 {
        self.task_norm
    }

    /// `A (w − p)`.
    pub fn gradient(&self, w: &Vector) -> Vector {
        &self.a * (w - &self.anchor)
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(Error::param("eta", format!("must be positive and finite, got {eta}")))
    }
}

fn build(task: &RegressionTask, map: SpectralMap, eta: f64, kind: SurrogateKind) -> SurrogateQuadratic {
    let eigen: &GramEigen = task.gram_eigen();
    let a = eigen.map(|xi| map.eval(xi) / eta);
    let r2 = task.spectral_norm() * task.spectral_norm();
    SurrogateQuadratic {
        a,
        anchor: task.solution().clone(),
        beta: map.eval(r2) / eta,
        kind,
        task_norm: task.spectral_norm(),
    }
}

/// `A = (1/η)(I − λ(XᵀX + λI)⁻¹)`.
pub fn build_regularized_surrogate(
    task: &RegressionTask,
    lambda: f64,
    eta: f64,
) -> Result<SurrogateQuadratic> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::param("lambda", format!("must be positive, got {lambda}")));
    }
    check_eta(eta)?;
    Ok(build(
        task,
        SpectralMap::Regularized { lambda },
        eta,
        SurrogateKind::Regularized { lambda, eta },
    ))
}

pub(crate) fn check_inner_step(task_norm: f64, gamma: f64) -> Result<()> {
    let r2 = task_norm * task_norm;
    if !(gamma.is_finite() && gamma > 0.0 && gamma * r2 < 1.0) {
        return Err(Error::param(
            "gamma",
            format!("need 0 < gamma and gamma * R_m^2 < 1, got gamma = {gamma}, R_m^2 = {r2}"),
        ));
    }
    Ok(())
}

pub(crate) fn check_steps(steps: u32) -> Result<()> {
    if steps == 0 {
        Err(Error::param("N", "inner step count must be >= 1"))
    } else {
        Ok(())
    }
}

/// `A = (1/η)(I − (I − γXᵀX)^N)`.
pub fn build_budgeted_surrogate(
    task: &RegressionTask,
    gamma: f64,
    steps: u32,
    eta: f64,
) -> Result<SurrogateQuadratic> {
    check_inner_step(task.spectral_norm(), gamma)?;
    check_steps(steps)?;
    check_eta(eta)?;
    Ok(build(
        task,
        SpectralMap::Budgeted { gamma, steps },
        eta,
        SurrogateKind::Budgeted { gamma, steps, eta },
    ))
}

/// `A = (1/η)·h(XᵀX)` for an arbitrary spectral map.
pub fn build_spectral_surrogate(
    task: &RegressionTask,
    map: SpectralMap,
    eta: f64,
) -> Result<SurrogateQuadratic> {
    check_eta(eta)?;
    let at_zero = map.eval(0.0);
    if at_zero.is_nan() || at_zero.abs() > ZERO_AT_ORIGIN_TOL {
        return Err(Error::param("g", format!("g(0) must be 0, got {at_zero}")));
    }
    let slope = map.slope_at_zero();
    if !(slope.is_finite() && slope > 0.0) {
        return Err(Error::param("g", format!("g'(0) must be positive, got {slope}")));
    }
    Ok(build(task, map, eta, SurrogateKind::Spectral { map, eta }))
}

/// Value `½(w − p)ᵀA(w − p)` and gradient `A(w − p)`.
pub fn value_and_grad(s: &SurrogateQuadratic, w: &Vector) -> Result<(f64, Vector)> {
    check_len("surrogate argument", s.dim(), w.len())?;
    let diff = w - &s.anchor;
    let grad = &s.a * &diff;
    let value = (0.5 * diff.dot(&grad)).max(0.0);
    Ok((value, grad))
}

/// Which radius enters the upper sandwich constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusScale {
    /// The task's own `R_m = ‖X_m‖₂`.
    Task,
    /// A collection-level radius `R ≥ R_m`.
    Collection(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub lower: f64,
    pub excess: f64,
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub tolerance: f64,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

/// Checks `c_low·f(w) ≤ L(w) − min L ≤ (R_m²/β)·f(w)` with `c_low = η/h'(0)`
/// (that is `λη` or `η/(γN)`), at tolerance `1e-9·(1 + excess)`.
pub fn sandwich_check(s: &SurrogateQuadratic, task: &RegressionTask, w: &Vector) -> Result<SandwichReport> {
    sandwich_check_with(s, task, w, RadiusScale::Task)
}

pub fn sandwich_check_with(
    s: &SurrogateQuadratic,
    task: &RegressionTask,
    w: &Vector,
    scale: RadiusScale,
) -> Result<SandwichReport> {
    let (map, eta) = s
        .kind
        .map_and_eta()
        .ok_or(Error::NoSandwichConstants(s.kind.name()))?;
    check_len("sandwich task", s.dim(), task.dim())?;
    let (f, _) = value_and_grad(s, w)?;
    let excess = task.excess_loss(w)?;

    let lower_const = eta / map.slope_at_zero();
    let radius = match scale {
        RadiusScale::Task => task.spectral_norm(),
        RadiusScale::Collection(r) => {
            if r.is_nan() || r < task.spectral_norm() {
                return Err(Error::param(
                    "R",
                    format!("collection radius {r} is below the task norm {}", task.spectral_norm()),
                ));
            }
            r
        }
    };
    let r2 = radius * radius;
    let beta = map.eval(r2) / eta;
    // R²/β → η/h'(0) as R → 0.
    let upper_const = if beta > 0.0 { r2 / beta } else { lower_const };

    let lower = lower_const * f;
    let upper = upper_const * f;
    let tolerance = 1e-9 * (1.0 + excess);
    Ok(SandwichReport {
        lower,
        excess,
        upper,
        lower_holds: lower <= excess + tolerance,
        upper_holds: excess <= upper + tolerance,
        tolerance,
    })
}
