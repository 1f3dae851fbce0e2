//! Dense LU with partial pivoting, used for the coarsest multigrid level.

use alloc::vec::Vec;

use crate::{CsrMatrix, Error, Result};

#[derive(Clone, Debug)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                op: "dense LU",
                nrows: a.nrows(),
                ncols: a.ncols(),
            });
        }
        let n = a.nrows();
        let mut lu = a.to_dense();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let mut p = k;
            for i in k + 1..n {
                if lu[i * n + k].abs() > lu[p * n + k].abs() {
                    p = i;
                }
            }
            if lu[p * n + k].abs() <= 1e-14 * scale {
                return Err(Error::SingularCoarse);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Ok(DenseLu { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

/// Solves a small dense system once; convenience for tests and callers
/// that do not need to reuse the factorization.
pub fn solve(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            op: "dense solve",
            expected: a.nrows(),
            found: b.len(),
        });
    }
    Ok(DenseLu::factor(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{dense_matvec, random_diag_dominant, random_vec};

    #[test]
    fn solves_random_system() {
        let a = random_diag_dominant(30, 0.3, 4);
        let x = random_vec(30, 5);
        let b = dense_matvec(&a.to_dense(), &x, 30, 30);
        let y = solve(&a, &b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn needs_pivoting() {
        let a = CsrMatrix::from_dense(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(solve(&a, &[2.0, 3.0]).unwrap(), [3.0, 2.0]);
    }

    #[test]
    fn singular_is_reported() {
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(DenseLu::factor(&a), Err(Error::SingularCoarse)));
    }
}
