//! Deterministic symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Each Jacobi rotation is a plane rotation annihilating one off-diagonal
//! element; sweeping all pairs in a fixed order drives the matrix to diagonal
//! form while the accumulated rotations yield the eigenvectors. The method is
//! unconditionally convergent for real symmetric matrices, and the fixed
//! sweep order (no pivot search, no parallel reduction) makes the output a
//! pure function of the input bytes. For the matrix sizes handled here
//! (n of order 100 at most) its cost is irrelevant.

use crate::math;
use alloc::vec::Vec;
use core::fmt;

/// Stop once every off-diagonal magnitude is below this fraction of the
/// Frobenius norm.
const OFF_DIAG_TOL: f64 = 1e-12;
/// Hard sweep cap; cyclic Jacobi converges far earlier in practice.
const MAX_SWEEPS: usize = 100;
/// Relative tolerance for the symmetry check on input.
const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum EigenError {
    NotSquare { rows: usize, cols: usize },
    NotSymmetric { row: usize, col: usize, delta: f64 },
    NotConverged,
    NonFinite { row: usize, col: usize },
}

impl fmt::Display for EigenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenError::NotSquare { rows, cols } => {
                write!(f, "matrix is {rows}x{cols}, not square")
            }
            EigenError::NotSymmetric { row, col, delta } => write!(
                f,
                "matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {delta:e}"
            ),
            EigenError::NotConverged => write!(f, "Jacobi sweeps did not converge"),
            EigenError::NonFinite { row, col } => {
                write!(f, "matrix entry [{row}][{col}] is not finite")
            }
        }
    }
}

impl core::error::Error for EigenError {}

/// Eigenvalues in descending order (ties keep the pre-sort order) with the
/// matching orthonormal eigenvectors. `vectors[i]` pairs with `values[i]`,
/// and each vector is sign-fixed so its largest-magnitude entry is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

fn frobenius(a: &[Vec<f64>]) -> f64 {
    math::sqrt(a.iter().flatten().map(|x| x * x).sum())
}

/// Eigendecomposition of a real symmetric matrix.
///
/// The input must be square and symmetric within `1e-10` relative tolerance.
/// Rotations run in cyclic sweeps over the strict upper triangle until the
/// largest off-diagonal magnitude falls below `1e-12 * ||A||_F` or 100 sweeps
/// have been made.
pub fn jacobi_eigh(matrix: &[Vec<f64>]) -> Result<EigenResult, EigenError> {
    let n = matrix.len();
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(EigenError::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(EigenError::NonFinite { row: i, col: j });
            }
        }
    }
    let fro = frobenius(matrix);
    let scale = 1.0 + fro;
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = (matrix[i][j] - matrix[j][i]).abs();
            if delta > SYMMETRY_TOL * scale {
                return Err(EigenError::NotSymmetric {
                    row: i,
                    col: j,
                    delta,
                });
            }
        }
    }

    // Work on the symmetrized copy; the halves agree within tolerance.
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| 0.5 * (matrix[i][j] + matrix[j][i]))
                .collect()
        })
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();

    let stop = OFF_DIAG_TOL * fro;
    let mut converged = fro == 0.0 || n < 2;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut max_off = 0.0f64;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / apq;
                let t = {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (theta.abs() + math::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                let tau = s / (1.0 + c);

                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i][p];
                        let aiq = a[i][q];
                        a[i][p] = aip - s * (aiq + tau * aip);
                        a[p][i] = a[i][p];
                        a[i][q] = aiq + s * (aip - tau * aiq);
                        a[q][i] = a[i][q];
                    }
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = vip - s * (viq + tau * vip);
                    row[q] = viq + s * (vip - tau * viq);
                }
            }
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                max_off = max_off.max(a[p][q].abs());
            }
        }
        if max_off <= stop {
            converged = true;
        }
    }
    if !converged {
        return Err(EigenError::NotConverged);
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|j| {
            let mut col: Vec<f64> = (0..n).map(|i| v[i][j]).collect();
            fix_sign(&mut col);
            (a[j][j], col)
        })
        .collect();
    // Stable sort: descending values, ties keep the original column index.
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite eigenvalues"));

    Ok(EigenResult {
        values: pairs.iter().map(|(l, _)| *l).collect(),
        vectors: pairs.into_iter().map(|(_, v)| v).collect(),
    })
}

/// Flips the vector so its largest-magnitude entry is positive
/// (first such entry decides on magnitude ties).
fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).copied().unwrap_or(0.0) < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}
