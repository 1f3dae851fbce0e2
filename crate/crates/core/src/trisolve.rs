//! Triangular solves: exact substitution and fixed-count Richardson sweeps.
//!
//! For a unit-diagonal factor `I + N` with `N` strictly triangular, the
//! Richardson recurrence `x <- b - N x` started from zero produces after `m`
//! sweeps the truncated Neumann sum `sum_{i<m} (-N)^i b`. `N` is nilpotent,
//! so once `m` reaches its nilpotency index the result is the exact solve.
//!
//! Upper solves work on row-scaled (or row/column-scaled) factors. With
//! `U = diag(r) Ũ diag(c)` the solve of `U x = b` is: `b_s = b / r`, iterate
//! on `Ũ`, then `x = z / c`. For row scaling alone `c` is absent and no
//! post-multiplication happens, which is the LDU reading of the ILU+Richardson
//! smoother. The row permutation hook of that smoother is the identity here
//! since no pivoting or reordering is used.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::factor::IluFactors;
use crate::sparse::TriangularShape;
use crate::vector::two_norm;
use crate::{CsrMatrix, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriSolveMode {
    Direct,
    Richardson,
}

/// Iteration counts for the two triangular solves inside an ILU smoother.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriSolveConfig {
    pub mode: TriSolveMode,
    pub m_l: usize,
    pub m_u: usize,
}

impl TriSolveConfig {
    pub fn direct() -> Self {
        TriSolveConfig {
            mode: TriSolveMode::Direct,
            m_l: 1,
            m_u: 1,
        }
    }

    pub fn richardson(m_l: usize, m_u: usize) -> Self {
        TriSolveConfig {
            mode: TriSolveMode::Richardson,
            m_l,
            m_u,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == TriSolveMode::Richardson && (self.m_l == 0 || self.m_u == 0) {
            return Err(Error::InvalidParameter(
                "Richardson triangular solves need m_L >= 1 and m_U >= 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for TriSolveConfig {
    fn default() -> Self {
        TriSolveConfig::richardson(10, 10)
    }
}

fn check_len(op: &'static str, t: &CsrMatrix, b: &[f64]) -> Result<()> {
    if b.len() != t.nrows() {
        return Err(Error::DimensionMismatch {
            op,
            expected: t.nrows(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Substitution for a lower or upper triangular `t`. With `unit` the
/// diagonal is taken as one and any stored diagonal entry is skipped.
pub(crate) fn triangular_solve(t: &CsrMatrix, lower: bool, unit: bool, b: &[f64]) -> Result<Vec<f64>> {
    check_len("triangular solve", t, b)?;
    let n = t.nrows();
    let mut x = b.to_vec();
    let step = |i: usize, x: &mut [f64]| -> Result<()> {
        let mut s = x[i];
        let mut d = if unit { 1.0 } else { 0.0 };
        for (j, v) in t.row_iter(i) {
            if j == i {
                if !unit {
                    d = v;
                }
            } else {
                s -= v * x[j];
            }
        }
        if d == 0.0 {
            return Err(Error::ZeroDiagonal { row: i });
        }
        x[i] = s / d;
        Ok(())
    };
    if lower {
        for i in 0..n {
            step(i, &mut x)?;
        }
    } else {
        for i in (0..n).rev() {
            step(i, &mut x)?;
        }
    }
    Ok(x)
}

/// Forward substitution with the unit-lower matrix `I + L_s`; `l` holds the
/// strictly lower part (stored unit diagonal entries are also accepted).
pub fn solve_lower_direct(l: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    l.check_shape(TriangularShape::UnitLower)?;
    triangular_solve(l, true, true, b)
}

/// Back substitution with an upper triangular `u` with nonzero diagonal.
pub fn solve_upper_direct(u: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    u.check_shape(TriangularShape::Upper)?;
    triangular_solve(u, false, false, b)
}

/// `y = b - N x`, skipping any diagonal entries of `n`.
#[inline]
fn strict_residual(n: &CsrMatrix, b: &[f64], x: &[f64], y: &mut [f64]) {
    for i in 0..n.nrows() {
        let mut s = b[i];
        for (j, v) in n.row_iter(i) {
            if j != i {
                s -= v * x[j];
            }
        }
        y[i] = s;
    }
}

/// `m` Richardson sweeps `x <- b - N x` from `x = 0` on the strictly
/// triangular part of `n`.
pub(crate) fn richardson_unit(n: &CsrMatrix, b: &[f64], m: usize) -> Vec<f64> {
    if m == 0 {
        return vec![0.0; b.len()];
    }
    let mut x = b.to_vec();
    let mut y = vec![0.0; b.len()];
    for _ in 1..m {
        strict_residual(n, b, &x, &mut y);
        core::mem::swap(&mut x, &mut y);
    }
    x
}

/// Richardson iteration for `(I + L_s) y = b`: returns
/// `sum_{i=0}^{m-1} (-L_s)^i b`.
pub fn richardson_lower(l_s: &CsrMatrix, b: &[f64], m: usize) -> Result<Vec<f64>> {
    l_s.check_shape(TriangularShape::UnitLower)?;
    check_len("richardson_lower", l_s, b)?;
    Ok(richardson_unit(l_s, b, m))
}

fn scaled_rhs(f: &IluFactors, b: &[f64]) -> Result<Vec<f64>> {
    let r = f.row_scale().ok_or(Error::MissingScaling)?;
    check_len("upper solve", f.u(), b)?;
    Ok(b.iter().zip(r).map(|(bi, ri)| bi / ri).collect())
}

fn unscale_solution(f: &IluFactors, mut z: Vec<f64>) -> Vec<f64> {
    if let Some(c) = f.col_scale() {
        for (zi, ci) in z.iter_mut().zip(c) {
            *zi /= ci;
        }
    }
    z
}

/// Solves `U x = b` with `m_u` Richardson sweeps on the scaled factor.
///
/// `f` must carry a row scaling; its stored `U` is assumed unit-diagonal and
/// only its strictly upper part is used.
pub fn richardson_upper_scaled(f: &IluFactors, b: &[f64], m_u: usize) -> Result<Vec<f64>> {
    let bs = scaled_rhs(f, b)?;
    let z = richardson_unit(f.u(), &bs, m_u);
    Ok(unscale_solution(f, z))
}

/// Exact solve of `U x = b` through the scaled factor.
pub fn direct_upper_scaled(f: &IluFactors, b: &[f64]) -> Result<Vec<f64>> {
    let bs = scaled_rhs(f, b)?;
    let z = triangular_solve(f.u(), false, true, &bs)?;
    Ok(unscale_solution(f, z))
}

/// Applies `(LU)^{-1}` to `r` with the configured triangular solves.
pub fn apply_factors(f: &IluFactors, cfg: &TriSolveConfig, r: &[f64]) -> Result<Vec<f64>> {
    match cfg.mode {
        TriSolveMode::Direct => {
            let y = triangular_solve(f.l(), true, true, r)?;
            if f.is_scaled() {
                direct_upper_scaled(f, &y)
            } else {
                triangular_solve(f.u(), false, false, &y)
            }
        }
        TriSolveMode::Richardson => {
            check_len("apply_factors", f.l(), r)?;
            let y = richardson_unit(f.l(), r, cfg.m_l);
            richardson_upper_scaled(f, &y, cfg.m_u)
        }
    }
}

/// Length of the longest chain in the pattern of a strictly triangular
/// matrix plus one: the smallest `p` with `N^p = 0` structurally.
pub fn nilpotency_index(strict: &CsrMatrix) -> usize {
    let n = strict.nrows();
    let mut depth = vec![0usize; n];
    let lower = strict.triplets().all(|(i, j, _)| j <= i);
    let order: Vec<usize> = if lower { (0..n).collect() } else { (0..n).rev().collect() };
    let mut longest = 0;
    for i in order {
        let mut d = 0;
        for (j, _) in strict.row_iter(i) {
            if j != i {
                d = d.max(depth[j] + 1);
            }
        }
        depth[i] = d;
        longest = longest.max(d);
    }
    longest + 1
}

/// Randomized estimate of `||N^p||_2`: applies `N` `p` times to `probes`
/// random unit vectors and reports the largest amplification.
/// Deterministic for a given seed.
pub fn neumann_tail_norm(n: &CsrMatrix, p: usize, probes: usize, seed: u64) -> f64 {
    let dim = n.ncols();
    if dim == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    let mut y = vec![0.0; n.nrows()];
    for _ in 0..probes.max(1) {
        let mut x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nx = two_norm(&x);
        if nx == 0.0 {
            continue;
        }
        for v in &mut x {
            *v /= nx;
        }
        for _ in 0..p {
            n.spmv_into(&x, &mut y);
            core::mem::swap(&mut x, &mut y);
        }
        best = best.max(two_norm(&x));
    }
    best
}
