//! Prolongation operators.
//!
//! Every off-diagonal entry of an F-row falls in exactly one of four sets:
//! strong C (`C_i^s`), strong F, weak C and weak F. Direct interpolation
//! lumps strong F and weak C into `beta_i`, and weak F into the denominator,
//! so the four sets plus the diagonal cover the whole row and zero row sums
//! give unit interpolation row sums.

use alloc::vec;
use alloc::vec::Vec;

use super::coarsen::CfSplit;
use crate::{CsrMatrix, Error, Result};

fn check(a: &CsrMatrix, split: &CfSplit, s: &CsrMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "interpolation",
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    for len in [split.len(), s.nrows()] {
        if len != a.nrows() {
            return Err(Error::DimensionMismatch {
                op: "interpolation",
                expected: a.nrows(),
                found: len,
            });
        }
    }
    Ok(())
}

/// Marks the strong columns of row `i` in `mark` (stamped with `i + 1`).
fn mark_strong(s: &CsrMatrix, i: usize, mark: &mut [usize]) {
    for &j in s.row(i).0 {
        mark[j] = i + 1;
    }
}

/// Weights of F-row `i` as `(coarse column, weight)` pairs.
fn direct_row(a: &CsrMatrix, split: &CfSplit, i: usize, mark: &[usize]) -> Result<Vec<(usize, f64)>> {
    let mut aii = 0.0;
    let mut beta = 0.0;
    let mut weak_f = 0.0;
    let mut strong_c = Vec::new();
    for (j, v) in a.row_iter(i) {
        if j == i {
            aii = v;
            continue;
        }
        let strong = mark[j] == i + 1;
        match (strong, split.coarse_index(j)) {
            (true, Some(cj)) => strong_c.push((cj, v)),
            (true, None) | (false, Some(_)) => beta += v,
            (false, None) => weak_f += v,
        }
    }
    if strong_c.is_empty() {
        return Err(Error::NoCoarseNeighbour { row: i });
    }
    let denom = aii + weak_f;
    if denom == 0.0 {
        return Err(Error::ZeroDiagonal { row: i });
    }
    let share = beta / strong_c.len() as f64;
    Ok(strong_c
        .into_iter()
        .map(|(cj, v)| (cj, -(v + share) / denom))
        .collect())
}

fn assemble(n: usize, split: &CfSplit, mut f_row: impl FnMut(usize) -> Result<Vec<(usize, f64)>>) -> Result<CsrMatrix> {
    let mut t = Vec::new();
    for i in 0..n {
        match split.coarse_index(i) {
            Some(ci) => t.push((i, ci, 1.0)),
            None => t.extend(f_row(i)?.into_iter().map(|(cj, w)| (i, cj, w))),
        }
    }
    CsrMatrix::from_triplets(n, split.n_coarse(), t)
}

/// Direct interpolation with constant-preserving least-squares weights
/// `w_ij = -(a_ij + beta_i / n_{C_i^s}) / (a_ii + sum_{k in N_i^w} a_ik)`.
pub fn interp_direct(a: &CsrMatrix, split: &CfSplit, s: &CsrMatrix) -> Result<CsrMatrix> {
    check(a, split, s)?;
    let mut mark = vec![0usize; a.nrows()];
    assemble(a.nrows(), split, |i| {
        mark_strong(s, i, &mut mark);
        direct_row(a, split, i, &mark)
    })
}

/// Extended interpolation written as sparse products:
/// `W = -[(D_FF + D_gamma)⁻¹ (A^s_FF + D_beta)] [D_beta⁻¹ A^s_FC]` with
/// `D_beta = diag(A^s_FC 1_C)` and `D_gamma = diag(A^w_FF 1_F + A^w_FC 1_C)`.
///
/// Rows where `D_beta` vanishes (on the row itself or a strong F-neighbour)
/// or the left diagonal is singular use direct interpolation instead.
pub fn interp_mm_ext(a: &CsrMatrix, split: &CfSplit, s: &CsrMatrix) -> Result<CsrMatrix> {
    check(a, split, s)?;
    let n = a.nrows();
    let mut f_index = vec![None; n];
    let fine: Vec<usize> = (0..n).filter(|&i| !split.is_coarse(i)).collect();
    for (k, &i) in fine.iter().enumerate() {
        f_index[i] = Some(k);
    }
    let nf = fine.len();

    let mut mark = vec![0usize; n];
    let mut ff = Vec::new();
    let mut fc = Vec::new();
    let mut d_beta = vec![0.0; nf];
    let mut left_diag = vec![0.0; nf];
    for (fi, &i) in fine.iter().enumerate() {
        mark_strong(s, i, &mut mark);
        let mut gamma = 0.0;
        for (j, v) in a.row_iter(i) {
            if j == i {
                left_diag[fi] += v;
            } else if mark[j] == i + 1 {
                match split.coarse_index(j) {
                    Some(cj) => {
                        fc.push((fi, cj, v));
                        d_beta[fi] += v;
                    }
                    None => ff.push((fi, f_index[j].expect("F-point"), v)),
                }
            } else {
                gamma += v;
            }
        }
        left_diag[fi] += gamma;
    }
    let a_ff = CsrMatrix::from_triplets(nf, nf, ff)?;
    let a_fc = CsrMatrix::from_triplets(nf, split.n_coarse(), fc)?;

    let usable = |k: usize| d_beta[k] != 0.0;
    let fallback: Vec<bool> = (0..nf)
        .map(|k| !usable(k) || left_diag[k] == 0.0 || a_ff.row(k).0.iter().any(|&m| !usable(m)))
        .collect();

    // (A^s_FF + D_beta) scaled on the left; D_beta⁻¹ A^s_FC with unusable rows zeroed.
    let left = a_ff
        .add(&CsrMatrix::from_diagonal(&d_beta))?
        .map_values(|i, _, v| v / if fallback[i] { 1.0 } else { left_diag[i] });
    let right = a_fc.map_values(|i, _, v| if usable(i) { v / d_beta[i] } else { 0.0 });
    let w = left.matmul(&right)?;

    let mut mark = vec![0usize; n];
    let mut n_fallback = 0;
    let p = assemble(n, split, |i| {
        let k = f_index[i].expect("F-point");
        if fallback[k] {
            n_fallback += 1;
            mark_strong(s, i, &mut mark);
            direct_row(a, split, i, &mark)
        } else {
            Ok(w.row_iter(k).map(|(cj, v)| (cj, -v)).collect())
        }
    })?;
    if n_fallback > 0 {
        log::debug!("MM-ext interpolation: {n_fallback} rows fell back to direct weights");
    }
    Ok(p)
}
