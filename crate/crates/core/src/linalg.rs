//! Minimal dense matrix helpers for the Fréchet distance: fixed-order
//! multiplication and a cyclic Jacobi eigenvalue sweep for symmetric
//! matrices. Everything is deterministic: no pivoting heuristics, no
//! data-dependent thread scheduling.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// `C = A * B` for square row-major `d x d` matrices, accumulated in `k`
/// order.
pub fn matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut c = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut sum = 0.0;
            for k in 0..d {
                sum += a[i * d + k] * b[k * d + j];
            }
            c[i * d + j] = sum;
        }
    }
    c
}

/// Eigenvalues of a symmetric row-major `d x d` matrix by cyclic Jacobi
/// rotations. Returns the diagonal in index order (unsorted).
pub fn symmetric_eigenvalues(matrix: &[f64], d: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(matrix.len(), d * d);
    if d == 0 {
        return Ok(Vec::new());
    }
    if d == 1 {
        return Ok(vec![matrix[0]]);
    }

    let mut a = matrix.to_vec();

    // Convergence threshold relative to the initial Frobenius norm.
    let mut fro = 0.0;
    for &v in &a {
        fro += v * v;
    }
    let fro = math::sqrt(fro);
    let tol = 1e-14 * fro.max(f64::MIN_POSITIVE);

    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..d {
            for q in p + 1..d {
                off += a[p * d + q] * a[p * d + q];
            }
        }
        if math::sqrt(2.0 * off) <= tol {
            let mut eigs = Vec::with_capacity(d);
            for i in 0..d {
                eigs.push(a[i * d + i]);
            }
            return Ok(eigs);
        }

        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                // Smaller-angle root keeps the sweep numerically stable.
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + math::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;

                // Rotate rows/columns p and q in place.
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::ConvergenceFailed)
}
