//! Test-only helpers: random matrices and dense reference routines.
//! The dense routines are deliberately naive and share no code with the
//! sparse implementations they check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::vec;
use std::vec::Vec;

use crate::CsrMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.random_range(-1.0..1.0)).collect()
}

/// Random sparse matrix with nonzero values in `[-1, -0.1] ∪ [0.1, 1]`.
pub fn random_sparse(n: usize, m: usize, density: f64, seed: u64) -> CsrMatrix {
    let mut r = rng(seed);
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if r.random_bool(density) {
                let mag: f64 = r.random_range(0.1..1.0);
                let v = if r.random_bool(0.5) { mag } else { -mag };
                t.push((i, j, v));
            }
        }
    }
    CsrMatrix::from_triplets(n, m, t).unwrap()
}

/// Random strictly diagonally dominant square matrix with full diagonal.
pub fn random_diag_dominant(n: usize, density: f64, seed: u64) -> CsrMatrix {
    let off = random_sparse(n, n, density, seed).filter(|i, j, _| i != j);
    let mut t: Vec<_> = off.triplets().collect();
    for i in 0..n {
        let s: f64 = off.row(i).1.iter().map(|v| v.abs()).sum();
        t.push((i, i, s + 1.0));
    }
    CsrMatrix::from_triplets(n, n, t).unwrap()
}

/// Random triangular matrix; `unit` stores ones on the diagonal, otherwise
/// diagonal magnitudes lie in `[0.5, 2]`.
pub fn random_triangular(n: usize, density: f64, lower: bool, unit: bool, seed: u64) -> CsrMatrix {
    let base = random_sparse(n, n, density, seed);
    let off = base.filter(|i, j, _| if lower { j < i } else { j > i });
    let mut r = rng(seed ^ 0xdead_beef);
    let mut t: Vec<_> = off.triplets().collect();
    for i in 0..n {
        let d = if unit {
            1.0
        } else {
            let m: f64 = r.random_range(0.5..2.0);
            if r.random_bool(0.5) { m } else { -m }
        };
        t.push((i, i, d));
    }
    CsrMatrix::from_triplets(n, n, t).unwrap()
}

pub fn tridiag(n: usize, lo: f64, d: f64, up: f64) -> CsrMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        if i > 0 {
            t.push((i, i - 1, lo));
        }
        t.push((i, i, d));
        if i + 1 < n {
            t.push((i, i + 1, up));
        }
    }
    CsrMatrix::from_triplets(n, n, t).unwrap()
}

pub fn dense_matvec(a: &[f64], x: &[f64], n: usize, m: usize) -> Vec<f64> {
    (0..n).map(|i| (0..m).map(|j| a[i * m + j] * x[j]).sum()).collect()
}

pub fn dense_matmul(a: &[f64], b: &[f64], n: usize, k: usize, m: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * m];
    for i in 0..n {
        for p in 0..k {
            for j in 0..m {
                c[i * m + j] += a[i * k + p] * b[p * m + j];
            }
        }
    }
    c
}

/// Doolittle LU without pivoting: returns (L unit lower, U upper), row-major.
pub fn dense_lu_nopivot(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut l = vec![0.0; n * n];
    let mut u = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let s: f64 = (0..i).map(|k| l[i * n + k] * u[k * n + j]).sum();
            u[i * n + j] = a[i * n + j] - s;
        }
        l[i * n + i] = 1.0;
        for j in i + 1..n {
            let s: f64 = (0..i).map(|k| l[j * n + k] * u[k * n + i]).sum();
            l[j * n + i] = (a[j * n + i] - s) / u[i * n + i];
        }
    }
    (l, u)
}

/// Gaussian elimination with partial pivoting on a copy.
pub fn dense_solve(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i * n + k].abs().partial_cmp(&m[j * n + k].abs()).unwrap())
            .unwrap();
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        for i in k + 1..n {
            let f = m[i * n + k] / m[k * n + k];
            for j in k..n {
                m[i * n + j] -= f * m[k * n + j];
            }
            x[i] -= f * x[k];
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k * n + j] * x[j]).sum();
        x[k] = (x[k] - s) / m[k * n + k];
    }
    x
}

pub fn dense_inverse(a: &[f64], n: usize) -> Vec<f64> {
    let mut inv = vec![0.0; n * n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let c = dense_solve(a, &e, n);
        for i in 0..n {
            inv[i * n + j] = c[i];
        }
    }
    inv
}

pub fn dense_one_norm(a: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Dense 5-point Laplacian on an `nx` by `ny` grid with Dirichlet boundaries.
pub fn poisson2d(nx: usize, ny: usize) -> CsrMatrix {
    let mut t = Vec::new();
    for y in 0..ny {
        for x in 0..nx {
            let i = y * nx + x;
            t.push((i, i, 4.0));
            if x > 0 {
                t.push((i, i - 1, -1.0));
            }
            if x + 1 < nx {
                t.push((i, i + 1, -1.0));
            }
            if y > 0 {
                t.push((i, i - nx, -1.0));
            }
            if y + 1 < ny {
                t.push((i, i + nx, -1.0));
            }
        }
    }
    CsrMatrix::from_triplets(nx * ny, nx * ny, t).unwrap()
}
