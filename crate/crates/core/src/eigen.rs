//! Cyclic Jacobi eigensolver for real symmetric matrices.

use crate::error::{RelarmError, Result};
use crate::matrix::Matrix;

/// Convergence threshold on the off-diagonal Frobenius norm, relative to the
/// Frobenius norm of the input.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    /// Eigenvalues in the order the rotations left them on the diagonal.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, matching `values`.
    pub vectors: Matrix,
    pub sweeps: usize,
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Diagonalizes `a` by sweeping plane rotations over every (p, q) pair in
/// row order until the off-diagonal mass drops below tolerance.
///
/// Only the symmetric part of `a` is meaningful; callers pass covariance
/// matrices, which are symmetric by construction.
pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(RelarmError::DimensionMismatch {
            context: "eigensolver input (square)",
            expected: n,
            found: a.ncols(),
        });
    }
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(RelarmError::Numerical("eigensolver input has non-finite entries".into()));
    }

    let mut a = a.clone();
    let mut v = Matrix::identity(n);
    let scale = a.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = JACOBI_TOLERANCE * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(RelarmError::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }

    let values = (0..n).map(|i| a[(i, i)]).collect();
    Ok(SymmetricEigen {
        values,
        vectors: v,
        sweeps,
    })
}

// A <- Jᵀ A J and V <- V J for the rotation in the (p, q) plane.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.nrows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Largest absolute entry of `A·v − μ·v`.
pub fn eigen_residual(a: &Matrix, vector: &[f64], value: f64) -> f64 {
    (0..a.nrows())
        .map(|i| {
            let av: f64 = a.row(i).iter().zip(vector).map(|(x, y)| x * y).sum();
            (av - value * vector[i]).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_decomposition(a: &Matrix, eig: &SymmetricEigen) {
        let n = a.nrows();
        for k in 0..n {
            let vk = eig.vectors.column(k);
            assert!(eigen_residual(a, &vk, eig.values[k]) < 1e-10);
            for l in 0..n {
                let d: f64 = vk.iter().zip(eig.vectors.column(l)).map(|(x, y)| x * y).sum();
                let expected = if k == l { 1.0 } else { 0.0 };
                assert!((d - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let eig = symmetric_eigen(&a).unwrap();
        let mut vals = eig.values.clone();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
        check_decomposition(&a, &eig);
    }

    #[test]
    fn diagonal_input_needs_no_sweeps() {
        let a = Matrix::from_rows(&[[3.0, 0.0], [0.0, 0.0]]).unwrap();
        let eig = symmetric_eigen(&a).unwrap();
        assert_eq!(eig.sweeps, 0);
        assert_eq!(eig.values, vec![3.0, 0.0]);
        assert_eq!(eig.vectors, Matrix::identity(2));
    }

    #[test]
    fn zero_matrix() {
        let eig = symmetric_eigen(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!(eig.values, vec![0.0; 3]);
    }

    #[test]
    fn larger_matrix_with_repeated_eigenvalue() {
        // eigenvalues 1, 1, 4 for J + I with J all-ones
        let a = Matrix::from_rows(&[[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]).unwrap();
        let eig = symmetric_eigen(&a).unwrap();
        let mut vals = eig.values.clone();
        vals.sort_by(f64::total_cmp);
        for (got, want) in vals.iter().zip([1.0, 1.0, 4.0]) {
            assert!((got - want).abs() < 1e-13);
        }
        check_decomposition(&a, &eig);
    }

    #[test]
    fn rejects_non_square() {
        assert!(symmetric_eigen(&Matrix::zeros(2, 3)).is_err());
    }
}
