//! Verification suites with machine-readable reports.

use std::str::FromStr;

use contreg_core::surrogate::SurrogateQuadratic;
use contreg_core::{
    build_budgeted_surrogate, build_regularized_surrogate, build_spectral_surrogate,
    certificate_check, fixed_budget, fixed_coefficient, generate_realizable, increasing_budget,
    increasing_coefficient, linear_decay_steps, run_continual, sandwich_check, sample_ordering,
    value_and_grad, Matrix, OrderingKind, RealizableSpec, RegressionTask, Schedule, SchemeKind,
    Seed, SpectralMap, StepParams, Strengths, Vector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::adversarial::{any_algorithm_trial, builtin_methods, seen_task_trial, Method};
use crate::config::{ScheduleConfig, SchemeName};
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub measured: f64,
    /// Bound the measured value is compared against.
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: measured <= threshold,
            measured,
            threshold,
            detail: detail.into(),
        }
    }

    fn at_least(name: impl Into<String>, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: measured >= threshold,
            measured,
            threshold,
            detail: detail.into(),
        }
    }

    fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            measured: f64::from(u8::from(passed)),
            threshold: 1.0,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, checks: Vec<Check>) -> Self {
        SuiteReport {
            suite,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Reductions,
    Sandwich,
    Certificate,
    Schedules,
    Adversarial,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Reductions,
        Suite::Sandwich,
        Suite::Certificate,
        Suite::Schedules,
        Suite::Adversarial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Reductions => "reductions",
            Suite::Sandwich => "sandwich",
            Suite::Certificate => "certificate",
            Suite::Schedules => "schedules",
            Suite::Adversarial => "adversarial",
        }
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| HarnessError::UnknownSuite(s.to_owned()))
    }
}

pub fn verify_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let suite: Suite = name.parse()?;
    let checks = match suite {
        Suite::Reductions => reduction_checks(50, 100, seed)?,
        Suite::Sandwich => vec![sandwich_triples(1000, seed)?, gradient_consistency(10, seed)?],
        Suite::Certificate => vec![certificate_grid(500, &[0.5, 1.0, 4.0])?],
        Suite::Schedules => schedule_checks()?,
        Suite::Adversarial => adversarial_checks(2000, seed)?,
    };
    Ok(SuiteReport::new(suite, checks))
}

fn gaussian_task(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Result<RegressionTask> {
    let x = Matrix::from_fn(n, d, |_, _| rng.sample(StandardNormal));
    let y = Vector::from_fn(n, |_, _| rng.sample(StandardNormal));
    Ok(RegressionTask::new(x, y)?)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn max_gap(a: &[Vector], b: &[Vector]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Iterate-equivalence of each scheme with its IGD form over random
/// configurations. The measured value is `max_t ‖Δw_t‖ / (1 + ‖w★‖)`.
pub fn reduction_checks(configs: usize, k: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_reg, mut worst_bud) = (0.0f64, 0.0f64);
    for i in 0..configs {
        let dim = rng.random_range(1..=10);
        let spec = RealizableSpec {
            dim,
            tasks: rng.random_range(1..=8),
            rows: rng.random_range(1..=5),
            radius: rng.random_range(0.5..2.0),
            seed: rng.random(),
        };
        let c = generate_realizable(&spec)?;
        let scale = 1.0 + c.joint_solution().norm();
        let ordering = sample_ordering(OrderingKind::WithReplacement, c.len(), k, Seed::new(seed).split(k as u32, i as u32))?;

        let lambdas: Vec<f64> = (0..k).map(|_| log_uniform(&mut rng, 1e-2, 1e2)).collect();
        let etas: Vec<f64> = (0..k).map(|_| log_uniform(&mut rng, 1e-2, 1e1)).collect();
        let s = Schedule::custom(Strengths::Coefficient(lambdas), etas.clone(), etas)?;
        let a = run_continual(&c, &ordering, &s, SchemeKind::Regularized, None)?;
        let b = run_continual(&c, &ordering, &s, SchemeKind::IgdRegularized, None)?;
        worst_reg = worst_reg.max(max_gap(&a.iterates, &b.iterates) / scale);

        let r2 = c.radius().powi(2);
        let gammas: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..0.9) / r2).map(|g: f64| g.max(1e-12)).collect();
        let steps: Vec<u32> = (0..k).map(|_| rng.random_range(1..=10)).collect();
        let etas: Vec<f64> = gammas.iter().zip(&steps).map(|(g, &n)| g * f64::from(n)).collect();
        let s = Schedule::custom(Strengths::Budget { gammas, steps }, etas.clone(), etas)?;
        let a = run_continual(&c, &ordering, &s, SchemeKind::Budgeted, None)?;
        let b = run_continual(&c, &ordering, &s, SchemeKind::IgdBudgeted, None)?;
        worst_bud = worst_bud.max(max_gap(&a.iterates, &b.iterates) / scale);
    }
    let detail = format!("{configs} configurations, k = {k}");
    Ok(vec![
        Check::at_most("regularized equals igd-of-regularized", worst_reg, 1e-8, detail.clone()),
        Check::at_most("budgeted equals igd-of-budgeted", worst_bud, 1e-8, detail),
    ])
}

fn random_surrogate(rng: &mut ChaCha8Rng, task: &RegressionTask) -> Result<SurrogateQuadratic> {
    let eta = log_uniform(rng, 1e-2, 1e1);
    Ok(if rng.random_bool(0.5) {
        build_regularized_surrogate(task, log_uniform(rng, 1e-2, 1e2), eta)?
    } else {
        let gamma = rng.random_range(0.01..0.99) / task.spectral_norm().powi(2);
        build_budgeted_surrogate(task, gamma, rng.random_range(1..=20), eta)?
    })
}

/// Both sandwich inequalities over random `(task, parameters, w)` triples.
/// The measured value is the number of violations.
pub fn sandwich_triples(count: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    let mut first = String::new();
    for i in 0..count {
        let n = rng.random_range(1..=6);
        let d = rng.random_range(1..=8);
        let task = gaussian_task(&mut rng, n, d)?;
        let s = random_surrogate(&mut rng, &task)?;
        let w = Vector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal) * 3.0);
        let rep = sandwich_check(&s, &task, &w)?;
        if !rep.holds() {
            failures += 1;
            if first.is_empty() {
                first = format!("; first violation at triple {i}: {rep:?}");
            }
        }
    }
    Ok(Check::at_most(
        "sandwich inequalities",
        failures as f64,
        0.0,
        format!("{count} triples, tolerance 1e-9 (1 + excess){first}"),
    ))
}

fn saturating(x: f64) -> f64 {
    1.0 - (-x).exp()
}

/// Relative error `‖∇f − ∇_fd f‖ / ‖∇f‖` for each surrogate kind at random points.
pub fn gradient_consistency(points: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6a09_e667);
    let d = 5;
    let task = gaussian_task(&mut rng, 4, d)?;
    let r2 = task.spectral_norm().powi(2);
    let b = Matrix::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let anchor = Vector::from_fn(d, |_, _| rng.sample(StandardNormal));
    let surrogates = [
        build_regularized_surrogate(&task, 0.8, 1.3)?,
        build_budgeted_surrogate(&task, 0.4 / r2, 5, 0.7)?,
        build_spectral_surrogate(&task, SpectralMap::Custom { h: saturating, slope_at_zero: 1.0 }, 2.0)?,
        SurrogateQuadratic::verbatim(b.tr_mul(&b), anchor)?,
    ];
    let mut worst = 0.0f64;
    for s in &surrogates {
        for _ in 0..points {
            let w = Vector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal) * 2.0);
            let (_, grad) = value_and_grad(s, &w)?;
            let h = 1e-5 * (1.0 + w.amax());
            let mut fd = Vector::zeros(d);
            for i in 0..d {
                let (mut plus, mut minus) = (w.clone(), w.clone());
                plus[i] += h;
                minus[i] -= h;
                fd[i] = (value_and_grad(s, &plus)?.0 - value_and_grad(s, &minus)?.0) / (2.0 * h);
            }
            let rel = (fd - &grad).norm() / grad.norm().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
        }
    }
    Ok(Check::at_most(
        "gradients match central differences",
        worst,
        1e-6,
        format!("{points} points for each of {} surrogate kinds", surrogates.len()),
    ))
}

/// Certificate over `k = 2..=max_k` and the given `β` values with
/// `a1 = a2 = 1`, `η = 3/(13β)`. The measured value is the number of failures.
pub fn certificate_grid(max_k: usize, betas: &[f64]) -> Result<Check> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for &beta in betas {
        for k in 2..=max_k {
            cases += 1;
            let rep = certificate_check(k, beta, 3.0 / (13.0 * beta), 1.0, 1.0)?;
            if !rep.pass {
                failures.push(format!("k = {k}, beta = {beta}: min c = {}, c_k = {}", rep.min_c, rep.c_k));
            }
        }
    }
    Ok(Check::at_most(
        "certificate grid",
        failures.len() as f64,
        0.0,
        format!("{cases} cases{}", failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()),
    ))
}

fn lambdas(s: &Schedule) -> &[f64] {
    match &s.strengths {
        Strengths::Coefficient(l) => l,
        _ => &[],
    }
}

fn schedule_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let close = |a: f64, b: f64, tol: f64| (a - b).abs() <= tol;

    let s = fixed_coefficient(1.0, 20)?;
    out.push(Check::flag(
        "fixed coefficient at k = 20",
        close(lambdas(&s)[0], 20f64.ln() - 1.0, 1e-12),
        format!("lambda = {}", lambdas(&s)[0]),
    ));
    let s = fixed_coefficient(1.0, 2)?;
    out.push(Check::flag(
        "fixed coefficient clamps at k = 2",
        s.clamped && lambdas(&s)[0] == 1e-6,
        format!("lambda = {}, clamped = {}", lambdas(&s)[0], s.clamped),
    ));
    let mut worst = 0.0f64;
    for k in 3..=200 {
        for r in [0.5, 1.0, 2.0] {
            let s = fixed_coefficient(r, k)?;
            let beta = r * r / (r * r + lambdas(&s)[0]) / s.etas[0];
            worst = worst.max((s.etas[0] * beta - 1.0 / (k as f64).ln()).abs());
        }
    }
    out.push(Check::at_most("fixed coefficient smoothness is 1/ln k", worst, 1e-12, "k = 3..200"));

    let s = fixed_budget(1.0, 0.5, 8)?;
    out.push(Check::flag(
        "fixed budget rounds to one step at k = 8",
        s.strengths.at(0) == Some(StepParams::Budget { gamma: 0.5, steps: 1 }),
        format!("N* = {:?}", s.budget_target),
    ));
    out.push(Check::flag("fixed budget rejects k = 2", fixed_budget(1.0, 0.5, 2).is_err(), ""));

    let s = increasing_coefficient(1.0, 10)?;
    let l = lambdas(&s);
    out.push(Check::flag(
        "increasing coefficient endpoints",
        close(l[0], 13.0 / 3.0, 1e-12) && close(l[9], 13.0 / 3.0 * 5.5, 1e-12),
        format!("lambda_1 = {}, lambda_10 = {}", l[0], l[9]),
    ));
    let mut monotone = true;
    let mut product = 0.0f64;
    for k in 2..=300 {
        let s = increasing_coefficient(1.0, k)?;
        let l = lambdas(&s);
        monotone &= l.windows(2).all(|p| p[1] > p[0]);
        product = l.iter().zip(&s.etas).map(|(l, e)| (l * e - 1.0).abs()).fold(product, f64::max);
        let b = increasing_budget(1.0, k, 3)?;
        if let Strengths::Budget { gammas, steps } = &b.strengths {
            monotone &= b.etas.windows(2).all(|p| p[1] < p[0]);
            for ((g, &n), e) in gammas.iter().zip(steps).zip(&b.etas) {
                product = product.max((e / (g * f64::from(n)) - 1.0).abs());
            }
        }
    }
    out.push(Check::flag("increasing schedules are monotone", monotone, "k = 2..300"));
    out.push(Check::at_most(
        "strength times step is one",
        product,
        4.0 * f64::EPSILON,
        "lambda_t eta_t and eta_t/(gamma_t N_t), k = 2..300",
    ));
    let s = increasing_budget(1.0, 10, 1)?;
    out.push(Check::flag(
        "increasing budget first step",
        matches!(s.strengths.at(0), Some(StepParams::Budget { gamma, steps: 1 }) if close(gamma, 3.0 / 13.0, 1e-15)),
        format!("{:?}", s.strengths.at(0)),
    ));

    let steps = linear_decay_steps(3.0 / 13.0, 12, 1.0)?;
    out.push(Check::flag(
        "linear decay endpoints",
        close(steps[0], 3.0 / 13.0, 1e-15) && close(steps[11], 2.0 * 3.0 / 13.0 / 13.0, 1e-15),
        format!("first {}, last {}", steps[0], steps[11]),
    ));
    out.push(Check::flag("linear decay rejects a large step", linear_decay_steps(0.3, 12, 1.0).is_err(), ""));
    Ok(out)
}

/// Seen-task and any-algorithm lower bounds at the acceptance horizons.
pub fn adversarial_checks(orderings: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let ridge = Method::new(SchemeName::Regularized, ScheduleConfig::IncreasingCoefficient);
    for k in [16, 64, 256] {
        let r = seen_task_trial(ridge, k, orderings, seed)?;
        out.push(Check::at_least(
            format!("seen-task lower bound, k = {k}"),
            r.statistic,
            r.required,
            format!("{}: Pr[seen loss >= {:.3e}] over {orderings} orderings", r.method, r.threshold),
        ));
    }
    for method in builtin_methods() {
        for k in [16, 64] {
            let r = any_algorithm_trial(method, k, orderings, 1000, seed)?;
            out.push(Check::at_least(
                format!("any-algorithm lower bound, {}, k = {k}", r.method),
                r.statistic,
                r.required,
                format!("mean excess over {orderings} orderings, sign {:?}", r.sign),
            ));
        }
    }
    Ok(out)
}
