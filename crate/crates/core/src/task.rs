//! Regression tasks, task collections and the jointly realizable generator.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{all_finite, check_len, pinv_and_norm, GramEigen, Matrix, Vector};
use crate::ordering::Seed;
use crate::{Error, Result};

/// One least-squares task `(X, y)` with the quantities every scheme needs
/// precomputed: the minimum-norm solution `X⁺y`, the minimum loss, the
/// spectral norm of `X` and the eigendecomposition of `XᵀX`.
#[derive(Debug, Clone)]
pub struct RegressionTask {
    x: Matrix,
    y: Vector,
    pinv: Matrix,
    solution: Vector,
    min_loss: f64,
    norm: f64,
    gram: Matrix,
    xty: Vector,
    gram_eigen: GramEigen,
}

impl RegressionTask {
    pub fn new(x: Matrix, y: Vector) -> Result<Self> {
        let (n, d) = x.shape();
        if n == 0 || d == 0 {
            return Err(Error::InvalidDimensions(format!(
                "task matrix must be at least 1x1, got {n}x{d}"
            )));
        }
        check_len("task targets", n, y.len())?;
        if !all_finite(x.iter()) {
            return Err(Error::NonFinite("task features"));
        }
        if !all_finite(y.iter()) {
            return Err(Error::NonFinite("task targets"));
        }

        let (pinv, norm) = pinv_and_norm(&x);
        let solution = &pinv * &y;
        let min_loss = 0.5 * (&x * &solution - &y).norm_squared();
        let gram = x.tr_mul(&x);
        let xty = x.tr_mul(&y);
        let gram_eigen = GramEigen::of(&gram);
        Ok(RegressionTask {
            x,
            y,
            pinv,
            solution,
            min_loss,
            norm,
            gram,
            xty,
            gram_eigen,
        })
    }

    /// Builds a task from row-major feature data.
    pub fn from_rows(rows: usize, cols: usize, features: &[f64], targets: &[f64]) -> Result<Self> {
        check_len("row-major features", rows * cols, features.len())?;
        Self::new(
            Matrix::from_row_slice(rows, cols, features),
            Vector::from_column_slice(targets),
        )
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &Vector {
        &self.y
    }

    pub fn rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    /// `X⁺`.
    pub fn pinv(&self) -> &Matrix {
        &self.pinv
    }

    /// `X⁺y`, the minimum-norm least-squares solution.
    pub fn solution(&self) -> &Vector {
        &self.solution
    }

    /// `½‖(XX⁺ − I)y‖²`.
    pub fn min_loss(&self) -> f64 {
        self.min_loss
    }

    /// Spectral norm `‖X‖₂` (the per-task radius `R_m`).
    pub fn spectral_norm(&self) -> f64 {
        self.norm
    }

    /// `XᵀX`.
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// `Xᵀy`.
    pub fn xty(&self) -> &Vector {
        &self.xty
    }

    pub fn gram_eigen(&self) -> &GramEigen {
        &self.gram_eigen
    }

    /// `½‖Xw − y‖²`.
    pub fn loss(&self, w: &Vector) -> Result<f64> {
        check_len("task loss", self.dim(), w.len())?;
        Ok(0.5 * (&self.x * w - &self.y).norm_squared())
    }

    /// `L(w) − min L`, computed as `½‖X(w − X⁺y)‖²` so it stays nonnegative.
    pub fn excess_loss(&self, w: &Vector) -> Result<f64> {
        check_len("task excess loss", self.dim(), w.len())?;
        Ok(0.5 * (&self.x * (w - &self.solution)).norm_squared())
    }

    /// `‖Xᵀ(Xp − y)‖`, which vanishes for the pseudo-inverse solution.
    pub fn normal_equation_residual(&self) -> f64 {
        self.x.tr_mul(&(&self.x * &self.solution - &self.y)).norm()
    }
}

/// A nonempty set of tasks sharing one feature dimension.
#[derive(Debug, Clone)]
pub struct TaskCollection {
    tasks: Vec<RegressionTask>,
    dim: usize,
    radius: f64,
    planted: Option<Vector>,
}

impl TaskCollection {
    pub fn new(tasks: Vec<RegressionTask>) -> Result<Self> {
        let first = tasks.first().ok_or(Error::EmptyCollection)?;
        let dim = first.dim();
        for task in &tasks {
            check_len("collection feature dimension", dim, task.dim())?;
        }
        let radius = tasks.iter().map(|t| t.spectral_norm()).fold(0.0, f64::max);
        Ok(TaskCollection {
            tasks,
            dim,
            radius,
            planted: None,
        })
    }

    /// Attaches a known joint solution (used for distance-to-solution metrics).
    pub fn with_planted(mut self, planted: Vector) -> Result<Self> {
        check_len("planted solution", self.dim, planted.len())?;
        self.planted = Some(planted);
        Ok(self)
    }

    /// Returns a new collection with `task` appended.
    pub fn with_task(&self, task: RegressionTask) -> Result<Self> {
        let mut tasks = self.tasks.clone();
        tasks.push(task);
        let mut next = Self::new(tasks)?;
        next.planted = self.planted.clone();
        Ok(next)
    }

    pub fn tasks(&self) -> &[RegressionTask] {
        &self.tasks
    }

    pub fn task(&self, index: usize) -> Result<&RegressionTask> {
        self.tasks.get(index).ok_or(Error::TaskIndex {
            index,
            tasks: self.tasks.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R = max_m ‖X_m‖₂`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn planted(&self) -> Option<&Vector> {
        self.planted.as_ref()
    }

    /// The planted solution when known, otherwise the minimum-norm
    /// least-squares solution of all tasks stacked together.
    pub fn joint_solution(&self) -> Vector {
        if let Some(w) = &self.planted {
            return w.clone();
        }
        let rows: usize = self.tasks.iter().map(|t| t.rows()).sum();
        let mut x = Matrix::zeros(rows, self.dim);
        let mut y = Vector::zeros(rows);
        let mut offset = 0;
        for task in &self.tasks {
            let n = task.rows();
            x.rows_mut(offset, n).copy_from(task.x());
            y.rows_mut(offset, n).copy_from(task.y());
            offset += n;
        }
        let (pinv, _) = pinv_and_norm(&x);
        pinv * y
    }
}

/// Data radius of a collection.
pub fn radius(collection: &TaskCollection) -> f64 {
    collection.radius()
}

/// Parameters of a synthetic jointly realizable collection.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizableSpec {
    pub dim: usize,
    pub tasks: usize,
    pub rows: usize,
    /// Target data radius; `0` keeps the raw Gaussian scale.
    pub radius: f64,
    pub seed: u64,
}

/// Draws a jointly realizable collection.
///
/// Draw order from `Seed::new(seed)` (stream 0): the `dim` entries of `w★`,
/// then every task's `rows x dim` feature block in row-major order, one task
/// after another. All features are then scaled by one common factor so that
/// the collection radius equals `spec.radius`, and targets are set to
/// `X_m w★`.
pub fn generate_realizable(spec: &RealizableSpec) -> Result<TaskCollection> {
    if spec.dim == 0 || spec.tasks == 0 || spec.rows == 0 {
        return Err(Error::InvalidDimensions(format!(
            "d, M and n must all be >= 1 (d = {}, M = {}, n = {})",
            spec.dim, spec.tasks, spec.rows
        )));
    }
    if !(spec.radius.is_finite() && spec.radius >= 0.0) {
        return Err(Error::param("radius", "must be finite and >= 0"));
    }
    let mut rng = Seed::new(spec.seed).rng();
    let planted = Vector::from_fn(spec.dim, |_, _| rng.sample(StandardNormal));
    let mut blocks: Vec<Matrix> = (0..spec.tasks)
        .map(|_| {
            let mut x = Matrix::zeros(spec.rows, spec.dim);
            for i in 0..spec.rows {
                for j in 0..spec.dim {
                    x[(i, j)] = rng.sample(StandardNormal);
                }
            }
            x
        })
        .collect();

    if spec.radius > 0.0 {
        let raw = blocks
            .iter()
            .map(crate::linalg::spectral_norm)
            .fold(0.0, f64::max);
        if raw > 0.0 {
            let scale = spec.radius / raw;
            for x in &mut blocks {
                *x *= scale;
            }
        }
    }

    let tasks = blocks
        .into_iter()
        .map(|x| {
            let y = &x * &planted;
            RegressionTask::new(x, y)
        })
        .collect::<Result<Vec<_>>>()?;
    TaskCollection::new(tasks)?.with_planted(planted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn task(rows: usize, cols: usize, x: &[f64], y: &[f64]) -> RegressionTask {
        RegressionTask::from_rows(rows, cols, x, y).unwrap()
    }

    #[test]
    fn scalar_task() {
        // 1x1: X⁺ = 1/x by hand.
        let t = task(1, 1, &[1.0], &[2.0]);
        assert!((t.solution()[0] - 2.0).abs() < 1e-15);
        assert!(t.min_loss().abs() < 1e-30);
    }

    #[test]
    fn underdetermined_row_picks_min_norm() {
        // Exhaustive grid oracle: among all (a, b) on a grid with a = 3 (exact
        // fit of [1, 0]·w = 3), the smallest-norm point has b = 0.
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in -300..=300 {
            for j in -300..=300 {
                let (a, b) = (i as f64 * 0.01, j as f64 * 0.01);
                let resid = (a - 3.0).abs();
                let norm = a * a + b * b;
                if resid < 1e-9 && norm < best.0 {
                    best = (norm, a, b);
                }
            }
        }
        let t = task(1, 2, &[1.0, 0.0], &[3.0]);
        assert!((t.solution()[0] - best.1).abs() < 1e-12);
        assert!((t.solution()[1] - best.2).abs() < 1e-12);
        assert!(t.min_loss().abs() < 1e-30);
    }

    #[test]
    fn zero_matrix_forces_zero_solution() {
        let t = task(1, 1, &[0.0], &[1.0]);
        assert_eq!(t.solution()[0], 0.0);
        assert_eq!(t.min_loss(), 0.5);
    }

    #[test]
    fn construction_errors() {
        let err = RegressionTask::new(Matrix::zeros(2, 2), Vector::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let err = RegressionTask::from_rows(1, 1, &[f64::NAN], &[1.0]).unwrap_err();
        assert_eq!(err, Error::NonFinite("task features"));
        let err = RegressionTask::from_rows(1, 1, &[1.0], &[f64::INFINITY]).unwrap_err();
        assert_eq!(err, Error::NonFinite("task targets"));
        assert!(RegressionTask::new(Matrix::zeros(0, 2), Vector::zeros(0)).is_err());
    }

    #[test]
    fn radius_examples() {
        let c = TaskCollection::new(vec![task(1, 1, &[3.0], &[0.0])]).unwrap();
        assert!((radius(&c) - 3.0).abs() < 1e-14);

        // Singular values of [[1, 0]] and [[0, 2]] are 1 and 2.
        let c = TaskCollection::new(vec![
            task(1, 2, &[1.0, 0.0], &[0.0]),
            task(1, 2, &[0.0, 2.0], &[0.0]),
        ])
        .unwrap();
        assert!((radius(&c) - 2.0).abs() < 1e-14);

        let c = TaskCollection::new(vec![task(2, 2, &[1.0, 0.0, 0.0, 1.0], &[0.0, 0.0])]).unwrap();
        assert!((radius(&c) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_radius_only_for_zero_tasks() {
        let c = TaskCollection::new(vec![task(2, 2, &[0.0; 4], &[1.0, 1.0])]).unwrap();
        assert_eq!(c.radius(), 0.0);
    }

    #[test]
    fn collection_rejects_mixed_dimensions() {
        let err = TaskCollection::new(vec![
            task(1, 2, &[1.0, 0.0], &[0.0]),
            task(1, 3, &[1.0, 0.0, 0.0], &[0.0]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        assert_eq!(TaskCollection::new(vec![]).unwrap_err(), Error::EmptyCollection);
    }

    #[test]
    fn generator_is_deterministic_and_realizable() {
        let spec = RealizableSpec {
            dim: 6,
            tasks: 4,
            rows: 3,
            radius: 1.0,
            seed: 17,
        };
        let a = generate_realizable(&spec).unwrap();
        let b = generate_realizable(&spec).unwrap();
        for (ta, tb) in a.tasks().iter().zip(b.tasks()) {
            assert_eq!(ta.x(), tb.x());
            assert_eq!(ta.y(), tb.y());
        }
        assert_eq!(a.planted(), b.planted());

        let w = a.planted().unwrap();
        for t in a.tasks() {
            assert_eq!((t.x() * w - t.y()).norm(), 0.0);
            assert!(t.min_loss() < 1e-20);
        }
        assert!((a.radius() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn generator_rejects_zero_dimensions() {
        let spec = RealizableSpec {
            dim: 0,
            tasks: 1,
            rows: 1,
            radius: 1.0,
            seed: 0,
        };
        assert!(matches!(
            generate_realizable(&spec),
            Err(Error::InvalidDimensions(_))
        ));
    }

    #[test]
    fn joint_solution_without_planted() {
        let c = TaskCollection::new(vec![
            task(1, 2, &[1.0, 0.0], &[2.0]),
            task(1, 2, &[0.0, 1.0], &[-1.0]),
        ])
        .unwrap();
        let w = c.joint_solution();
        assert!((w[0] - 2.0).abs() < 1e-14 && (w[1] + 1.0).abs() < 1e-14);
    }
}
