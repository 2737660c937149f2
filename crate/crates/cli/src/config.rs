//! Experiment configuration (strict JSON).

use std::path::{Path, PathBuf};

use contreg_core::{
    fixed_budget, fixed_coefficient, generate_realizable, increasing_budget,
    increasing_coefficient, Matrix, OrderingKind, RealizableSpec, RegressionTask, Schedule,
    SchemeKind, TaskCollection, Vector,
};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub collection: CollectionSource,
    pub scheme: SchemeName,
    pub schedule: ScheduleConfig,
    pub ordering: OrderingName,
    pub k_grid: Vec<usize>,
    pub trials: u32,
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub init: Init,
    #[serde(default)]
    pub unregularized_first: bool,
}

/// Synthetic realizable collection or a JSON file of tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CollectionSource {
    Generated(GeneratedCollection),
    File(CollectionFile),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratedCollection {
    pub dim: usize,
    pub tasks: usize,
    pub rows: usize,
    pub radius: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionFile {
    pub path: PathBuf,
}

/// On-disk task collection: row-major `x` per task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SerializedCollection {
    pub tasks: Vec<SerializedTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SerializedTask {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl SerializedCollection {
    pub fn from_collection(c: &TaskCollection) -> Self {
        SerializedCollection {
            tasks: c
                .tasks()
                .iter()
                .map(|t| SerializedTask {
                    x: t.x().row_iter().map(|r| r.iter().copied().collect()).collect(),
                    y: t.y().iter().copied().collect(),
                })
                .collect(),
            planted: c.planted().map(|w| w.iter().copied().collect()),
        }
    }

    pub fn into_collection(self) -> Result<TaskCollection> {
        let mut tasks = Vec::with_capacity(self.tasks.len());
        for (m, t) in self.tasks.into_iter().enumerate() {
            let rows = t.x.len();
            let cols = t.x.first().map_or(0, Vec::len);
            if t.x.iter().any(|r| r.len() != cols) {
                return Err(HarnessError::config(format!("task {m}: ragged feature rows")));
            }
            let flat: Vec<f64> = t.x.into_iter().flatten().collect();
            let x = Matrix::from_row_slice(rows, cols, &flat);
            tasks.push(RegressionTask::new(x, Vector::from_vec(t.y))?);
        }
        let c = TaskCollection::new(tasks)?;
        Ok(match self.planted {
            Some(w) => c.with_planted(Vector::from_vec(w))?,
            None => c,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    Regularized,
    Budgeted,
    Unregularized,
    IgdOfRegularized,
    IgdOfBudgeted,
}

impl From<SchemeName> for SchemeKind {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::Regularized => SchemeKind::Regularized,
            SchemeName::Budgeted => SchemeKind::Budgeted,
            SchemeName::Unregularized => SchemeKind::Unregularized,
            SchemeName::IgdOfRegularized => SchemeKind::IgdRegularized,
            SchemeName::IgdOfBudgeted => SchemeKind::IgdBudgeted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingName {
    WithReplacement,
    WithoutReplacement,
}

impl From<OrderingName> for OrderingKind {
    fn from(o: OrderingName) -> Self {
        match o {
            OrderingName::WithReplacement => OrderingKind::WithReplacement,
            OrderingName::WithoutReplacement => OrderingKind::WithoutReplacement,
        }
    }
}

/// Schedule family. Budget step sizes are given as `γR²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleConfig {
    FixedCoefficient,
    FixedBudget { step_fraction: f64 },
    IncreasingCoefficient,
    IncreasingBudget { inner_steps: u32 },
    ConstantCoefficient { lambda: f64 },
    ConstantBudget { step_fraction: f64, inner_steps: u32 },
    Unregularized,
}

impl ScheduleConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleConfig::FixedCoefficient => "fixed-coefficient",
            ScheduleConfig::FixedBudget { .. } => "fixed-budget",
            ScheduleConfig::IncreasingCoefficient => "increasing-coefficient",
            ScheduleConfig::IncreasingBudget { .. } => "increasing-budget",
            ScheduleConfig::ConstantCoefficient { .. } => "constant-coefficient",
            ScheduleConfig::ConstantBudget { .. } => "constant-budget",
            ScheduleConfig::Unregularized => "unregularized",
        }
    }

    /// Schedule of horizon `k` for data radius `r`.
    pub fn build(&self, r: f64, k: usize) -> Result<Schedule> {
        let r2 = r * r;
        Ok(match *self {
            ScheduleConfig::FixedCoefficient => fixed_coefficient(r, k)?,
            ScheduleConfig::FixedBudget { step_fraction } => fixed_budget(r, step_fraction / r2, k)?,
            ScheduleConfig::IncreasingCoefficient => increasing_coefficient(r, k)?,
            ScheduleConfig::IncreasingBudget { inner_steps } => increasing_budget(r, k, inner_steps)?,
            ScheduleConfig::ConstantCoefficient { lambda } => Schedule::constant_coefficient(lambda, k)?,
            ScheduleConfig::ConstantBudget {
                step_fraction,
                inner_steps,
            } => {
                let s = Schedule::constant_budget(step_fraction / r2, inner_steps, k)?;
                s.validate_radius(r)?;
                s
            }
            ScheduleConfig::Unregularized => Schedule::unregularized(k),
        })
    }
}

/// Initial iterate `w_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    #[default]
    Zero,
    /// The collection's joint solution.
    Planted,
    Explicit(Vec<f64>),
}

impl Init {
    pub fn resolve(&self, c: &TaskCollection) -> Result<Vector> {
        match self {
            Init::Zero => Ok(Vector::zeros(c.dim())),
            Init::Planted => Ok(c.joint_solution()),
            Init::Explicit(w) if w.len() == c.dim() => Ok(Vector::from_column_slice(w)),
            Init::Explicit(w) => Err(HarnessError::config(format!(
                "init has length {}, collection dimension is {}",
                w.len(),
                c.dim()
            ))),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(HarnessError::config("trials must be >= 1"));
        }
        if self.k_grid.is_empty() {
            return Err(HarnessError::config("k_grid must be nonempty"));
        }
        if self.k_grid.windows(2).any(|p| p[0] >= p[1]) {
            return Err(HarnessError::config("k_grid must be strictly increasing"));
        }
        if self.k_grid.iter().any(|&k| k > u32::MAX as usize) {
            return Err(HarnessError::config("k_grid entries must fit in 32 bits"));
        }
        if let CollectionSource::Generated(g) = &self.collection {
            if !(g.radius.is_finite() && g.radius >= 0.0) {
                return Err(HarnessError::config("collection radius must be finite and >= 0"));
            }
        }
        Ok(())
    }

    /// Builds or loads the task collection. Relative file paths resolve
    /// against `base_dir`.
    pub fn collection(&self, base_dir: Option<&Path>) -> Result<TaskCollection> {
        match &self.collection {
            CollectionSource::Generated(g) => Ok(generate_realizable(&RealizableSpec {
                dim: g.dim,
                tasks: g.tasks,
                rows: g.rows,
                radius: g.radius,
                seed: g.seed,
            })?),
            CollectionSource::File(f) => {
                let path = match base_dir {
                    Some(dir) if f.path.is_relative() => dir.join(&f.path),
                    _ => f.path.clone(),
                };
                let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
                let raw: SerializedCollection = serde_json::from_str(&text)?;
                raw.into_collection()
            }
        }
    }
}
