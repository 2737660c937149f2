//! Dense linear-algebra helpers on top of `nalgebra`.
//!
//! Rank decisions use the usual relative cutoff
//! `max(n, d) * f64::EPSILON * sigma_max`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Singular-value cutoff below which a direction is treated as rank-deficient.
pub fn rank_cutoff(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    (rows.max(cols) as f64) * f64::EPSILON * sigma_max
}

/// Largest singular value, from a full SVD.
pub fn spectral_norm(x: &Matrix) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Moore-Penrose pseudo-inverse and spectral norm of `x`, sharing one SVD.
pub fn pinv_and_norm(x: &Matrix) -> (Matrix, f64) {
    let (n, d) = x.shape();
    let svd = x.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rank_cutoff(n, d, sigma_max);
    // Both factors were requested above.
    let u = svd.u.as_ref().expect("svd computed u");
    let v_t = svd.v_t.as_ref().expect("svd computed v_t");
    let mut pinv = Matrix::zeros(d, n);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            pinv.ger(1.0 / s, &v_t.row(i).transpose(), &u.column(i), 1.0);
        }
    }
    (pinv, sigma_max)
}

/// Eigendecomposition of a symmetric matrix, with eigenvalues clamped to be
/// nonnegative (for Gram matrices, where negatives are rounding noise).
#[derive(Debug, Clone)]
pub struct GramEigen {
    pub eigenvalues: Vector,
    pub eigenvectors: Matrix,
}

impl GramEigen {
    pub fn of(gram: &Matrix) -> Self {
        let eig = SymmetricEigen::new(gram.clone());
        let eigenvalues = eig.eigenvalues.map(|v| v.max(0.0));
        GramEigen {
            eigenvalues,
            eigenvectors: eig.eigenvectors,
        }
    }

    /// `V diag(f(xi)) V^T`, symmetrized.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Matrix {
        let v = &self.eigenvectors;
        let mapped = self.eigenvalues.map(f);
        let mut scaled = v.clone();
        for (j, &m) in mapped.iter().enumerate() {
            scaled.column_mut(j).scale_mut(m);
        }
        let a = scaled * v.transpose();
        symmetrize(a)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(0.0, f64::max)
    }
}

pub fn symmetrize(a: Matrix) -> Matrix {
    let t = a.transpose();
    (a + t) * 0.5
}

/// Solves `(gram + shift I) z = rhs` with a Cholesky factorization.
pub fn solve_shifted_spd(gram: &Matrix, shift: f64, rhs: &Vector) -> Result<Vector> {
    let d = gram.nrows();
    let mut m = gram.clone();
    for i in 0..d {
        m[(i, i)] += shift;
    }
    let chol = m
        .cholesky()
        .ok_or(Error::Solve("shifted Gram matrix is not positive definite"))?;
    Ok(chol.solve(rhs))
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_symmetric_eigenvalue(a: &Matrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(a.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn all_finite<'a, I: IntoIterator<Item = &'a f64>>(values: I) -> bool {
    values.into_iter().all(|v| v.is_finite())
}

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
