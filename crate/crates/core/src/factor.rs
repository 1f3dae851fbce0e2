//! Incomplete LU factorizations and the diagnostics that decide whether
//! their triangular solves can be replaced by Richardson sweeps.
//!
//! Factors are stored as `L` strictly lower (the unit diagonal is implicit)
//! and `U` upper with its diagonal stored. After [`IluFactors::row_scale`] or
//! [`IluFactors::row_col_scale`] the stored `U` is the unit-diagonal factor
//! `Ũ` and the original factor is `diag(row_scale) · Ũ · diag(col_scale)`.
//! No pivoting or reordering is ever performed.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use crate::sparse::TriangularShape;
use crate::trisolve;
use crate::{CsrMatrix, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IluVariant {
    Ilu0,
    Ilut,
}

/// What to do when a pivot comes out exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotPatch {
    Error,
    /// Substitute `sign(u_kk) * max(droptol * ||a_k||_2, 1e-16 * ||A||_F)`.
    Replace,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IluParams {
    pub variant: IluVariant,
    /// Relative drop tolerance (ILUT only).
    pub droptol: f64,
    /// Largest number of off-diagonal entries kept per row in each of the
    /// `L` and `U` parts (ILUT only).
    pub lfill: usize,
    pub pivot_patch: PivotPatch,
}

impl Default for IluParams {
    fn default() -> Self {
        IluParams {
            variant: IluVariant::Ilu0,
            droptol: 0.0,
            lfill: 0,
            pivot_patch: PivotPatch::Error,
        }
    }
}

impl IluParams {
    pub fn ilu0() -> Self {
        Self::default()
    }

    pub fn ilut(droptol: f64, lfill: usize) -> Self {
        IluParams {
            variant: IluVariant::Ilut,
            droptol,
            lfill,
            pivot_patch: PivotPatch::Error,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.droptol.is_finite() || self.droptol < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "droptol must be finite and non-negative, got {}",
                self.droptol
            )));
        }
        Ok(())
    }
}

/// Result of an incomplete factorization.
#[derive(Clone, Debug)]
pub struct IluFactors {
    l: CsrMatrix,
    u: CsrMatrix,
    row_scale: Option<Vec<f64>>,
    col_scale: Option<Vec<f64>>,
}

impl IluFactors {
    /// Wraps externally built factors: `l` strictly lower, `u` upper.
    pub fn new(l: CsrMatrix, u: CsrMatrix) -> Result<Self> {
        l.check_shape(TriangularShape::StrictlyLower)?;
        u.check_shape(TriangularShape::Upper)?;
        if l.nrows() != u.nrows() {
            return Err(Error::DimensionMismatch {
                op: "IluFactors::new",
                expected: l.nrows(),
                found: u.nrows(),
            });
        }
        Ok(IluFactors {
            l,
            u,
            row_scale: None,
            col_scale: None,
        })
    }

    pub fn compute(a: &CsrMatrix, params: &IluParams) -> Result<Self> {
        match params.variant {
            IluVariant::Ilu0 => ilu0(a, params),
            IluVariant::Ilut => ilut(a, params),
        }
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// Strictly lower part of the unit-lower factor.
    pub fn l(&self) -> &CsrMatrix {
        &self.l
    }

    /// Upper factor as stored (unit diagonal once scaled).
    pub fn u(&self) -> &CsrMatrix {
        &self.u
    }

    pub fn row_scale(&self) -> Option<&[f64]> {
        self.row_scale.as_deref()
    }

    pub fn col_scale(&self) -> Option<&[f64]> {
        self.col_scale.as_deref()
    }

    pub fn is_scaled(&self) -> bool {
        self.row_scale.is_some()
    }

    /// Off-diagonal count of `L`.
    pub fn nnz_l(&self) -> usize {
        self.l.nnz()
    }

    pub fn nnz_u(&self) -> usize {
        self.u.nnz()
    }

    /// Strictly upper part of the stored `U`.
    pub fn u_strict(&self) -> CsrMatrix {
        self.u.filter(|i, j, _| j > i)
    }

    /// The upper factor before any scaling.
    pub fn unscaled_u(&self) -> CsrMatrix {
        match (&self.row_scale, &self.col_scale) {
            (None, _) => self.u.clone(),
            (Some(r), None) => self.u.map_values(|i, _, v| r[i] * v),
            (Some(r), Some(c)) => self.u.map_values(|i, j, v| r[i] * v * c[j]),
        }
    }

    /// Row scaling `Ũ = D⁻¹U` with `D = diag(U)`; `L` is untouched.
    pub fn row_scale_u(&self) -> Result<IluFactors> {
        if self.is_scaled() {
            return Err(Error::AlreadyScaled);
        }
        let d = upper_diagonal(&self.u)?;
        let u = self
            .u
            .map_values(|i, j, v| if i == j { 1.0 } else { v / d[i] });
        Ok(IluFactors {
            l: self.l.clone(),
            u,
            row_scale: Some(d),
            col_scale: None,
        })
    }

    /// Row and column scaling `Ũ = D_r U D_c` with unit diagonal, using
    /// `d_c,i = |u_ii|^(-1/2)` and `d_r,i = sign(u_ii) |u_ii|^(-1/2)`.
    ///
    /// The stored scale vectors are the inverses `D_r⁻¹` and `D_c⁻¹`, so the
    /// original factor is always `diag(row_scale) · Ũ · diag(col_scale)`.
    pub fn row_col_scale_u(&self) -> Result<IluFactors> {
        if self.is_scaled() {
            return Err(Error::AlreadyScaled);
        }
        let d = upper_diagonal(&self.u)?;
        let dc: Vec<f64> = d.iter().map(|v| 1.0 / libm::sqrt(v.abs())).collect();
        let dr: Vec<f64> = d
            .iter()
            .zip(&dc)
            .map(|(v, c)| if *v < 0.0 { -c } else { *c })
            .collect();
        let u = self.u.map_values(|i, j, v| dr[i] * v * dc[j]);
        Ok(IluFactors {
            l: self.l.clone(),
            u,
            row_scale: Some(dr.iter().map(|v| 1.0 / v).collect()),
            col_scale: Some(dc.iter().map(|v| 1.0 / v).collect()),
        })
    }

    pub fn dep_l(&self) -> f64 {
        departure_strict_sum(&self.l)
    }

    /// Departure from normality of the stored `U`.
    pub fn dep_u(&self) -> f64 {
        departure_strict_sum(&self.u)
    }
}

fn upper_diagonal(u: &CsrMatrix) -> Result<Vec<f64>> {
    let mut d = Vec::with_capacity(u.nrows());
    for i in 0..u.nrows() {
        match u.get(i, i) {
            Some(v) if v != 0.0 => d.push(v),
            _ => return Err(Error::ZeroDiagonal { row: i }),
        }
    }
    Ok(d)
}

fn patch_value(computed: f64, droptol: f64, row_norm: f64, a_fro: f64) -> f64 {
    let mag = f64::max(droptol * row_norm, 1e-16 * a_fro);
    let mag = if mag > 0.0 { mag } else { f64::MIN_POSITIVE };
    if computed.is_sign_negative() {
        -mag
    } else {
        mag
    }
}

fn require_square(a: &CsrMatrix, op: &'static str) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            op,
            nrows: a.nrows(),
            ncols: a.ncols(),
        })
    }
}

/// ILU(0): `L` and `U` inherit exactly the lower and upper patterns of `A`.
pub fn ilu0(a: &CsrMatrix, params: &IluParams) -> Result<IluFactors> {
    require_square(a, "ilu0")?;
    params.validate()?;
    let n = a.nrows();
    let rp = a.row_ptr();
    let ci = a.col_idx();
    let mut diag_pos = vec![0usize; n];
    for i in 0..n {
        let cols = &ci[rp[i]..rp[i + 1]];
        match cols.binary_search(&i) {
            Ok(k) => diag_pos[i] = rp[i] + k,
            Err(_) => return Err(Error::MissingDiagonal { row: i }),
        }
    }
    let row_norms = a.row_two_norms();
    let a_fro = a.frobenius_norm();
    let mut vals = a.values().to_vec();
    let mut pos_of = vec![usize::MAX; n];
    for i in 0..n {
        for k in rp[i]..rp[i + 1] {
            pos_of[ci[k]] = k;
        }
        for kk in rp[i]..diag_pos[i] {
            let k = ci[kk];
            let lik = vals[kk] / vals[diag_pos[k]];
            vals[kk] = lik;
            if lik == 0.0 {
                continue;
            }
            for jj in diag_pos[k] + 1..rp[k + 1] {
                let p = pos_of[ci[jj]];
                if p != usize::MAX {
                    vals[p] -= lik * vals[jj];
                }
            }
        }
        let d = vals[diag_pos[i]];
        if d == 0.0 || !d.is_finite() {
            match params.pivot_patch {
                PivotPatch::Error => return Err(Error::ZeroPivot { row: i }),
                PivotPatch::Replace => {
                    let v = patch_value(d, params.droptol, row_norms[i], a_fro);
                    log::warn!("ilu0: replaced zero pivot at row {i} with {v:e}");
                    vals[diag_pos[i]] = v;
                }
            }
        }
        for k in rp[i]..rp[i + 1] {
            pos_of[ci[k]] = usize::MAX;
        }
    }
    let mut lt = (Vec::new(), Vec::new(), vec![0usize]);
    let mut ut = (Vec::new(), Vec::new(), vec![0usize]);
    for i in 0..n {
        for k in rp[i]..rp[i + 1] {
            let dst = if ci[k] < i { &mut lt } else { &mut ut };
            dst.0.push(ci[k]);
            dst.1.push(vals[k]);
        }
        lt.2.push(lt.0.len());
        ut.2.push(ut.0.len());
    }
    Ok(IluFactors {
        l: CsrMatrix::from_parts_unchecked(n, n, lt.2, lt.0, lt.1),
        u: CsrMatrix::from_parts_unchecked(n, n, ut.2, ut.0, ut.1),
        row_scale: None,
        col_scale: None,
    })
}

/// Keeps the `limit` largest-magnitude entries (ties broken by lower column
/// index) and returns them sorted by column.
fn keep_largest(entries: &mut Vec<(usize, f64)>, limit: usize) {
    if entries.len() > limit {
        entries.sort_unstable_by(|a, b| match b.1.abs().partial_cmp(&a.1.abs()) {
            Some(Ordering::Equal) | None => a.0.cmp(&b.0),
            Some(o) => o,
        });
        entries.truncate(limit);
    }
    entries.sort_unstable_by_key(|e| e.0);
}

/// Dual-threshold ILUT.
///
/// Row `i` is eliminated with a drop threshold `tau_i = droptol * ||a_i||_2`:
/// a multiplier `l_ik` below `tau_i` is discarded before it updates the
/// working row, and after elimination every off-diagonal entry below
/// `tau_i` is dropped. Of the survivors at most `lfill` entries are kept in
/// the `L` part and at most `lfill` in the strictly upper part, largest
/// magnitude first. The diagonal is always kept, so every row of `U` has at
/// most `lfill + 1` entries and every row of `L` at most `lfill`.
pub fn ilut(a: &CsrMatrix, params: &IluParams) -> Result<IluFactors> {
    require_square(a, "ilut")?;
    params.validate()?;
    let n = a.nrows();
    let row_norms = a.row_two_norms();
    let a_fro = a.frobenius_norm();

    let mut w = vec![0.0; n];
    let mut marked = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut heap: BinaryHeap<Reverse<usize>> = BinaryHeap::new();

    let (mut l_ptr, mut l_idx, mut l_val) = (vec![0usize], Vec::new(), Vec::new());
    // U rows excluding the diagonal, plus the diagonal separately
    let (mut u_ptr, mut u_idx, mut u_val) = (vec![0usize], Vec::<usize>::new(), Vec::<f64>::new());
    let mut u_diag = vec![0.0; n];
    let mut lower: Vec<(usize, f64)> = Vec::new();
    let mut upper: Vec<(usize, f64)> = Vec::new();

    for i in 0..n {
        let tau = params.droptol * row_norms[i];
        for (j, v) in a.row_iter(i) {
            w[j] = v;
            marked[j] = true;
            touched.push(j);
            if j < i {
                heap.push(Reverse(j));
            }
        }
        if !marked[i] {
            marked[i] = true;
            w[i] = 0.0;
            touched.push(i);
        }
        while let Some(Reverse(k)) = heap.pop() {
            let lik = w[k] / u_diag[k];
            if lik == 0.0 || lik.abs() < tau {
                w[k] = 0.0;
                continue;
            }
            w[k] = lik;
            for p in u_ptr[k]..u_ptr[k + 1] {
                let j = u_idx[p];
                if !marked[j] {
                    marked[j] = true;
                    w[j] = 0.0;
                    touched.push(j);
                    if j < i {
                        heap.push(Reverse(j));
                    }
                }
                w[j] -= lik * u_val[p];
            }
        }
        lower.clear();
        upper.clear();
        for &j in &touched {
            let v = w[j];
            if j == i || v == 0.0 || v.abs() < tau {
                continue;
            }
            if j < i {
                lower.push((j, v));
            } else {
                upper.push((j, v));
            }
        }
        keep_largest(&mut lower, params.lfill);
        keep_largest(&mut upper, params.lfill);

        let mut d = w[i];
        if d == 0.0 || !d.is_finite() {
            match params.pivot_patch {
                PivotPatch::Error => return Err(Error::ZeroPivot { row: i }),
                PivotPatch::Replace => {
                    d = patch_value(d, params.droptol, row_norms[i], a_fro);
                    log::warn!("ilut: replaced zero pivot at row {i} with {d:e}");
                }
            }
        }
        u_diag[i] = d;
        for &(j, v) in &lower {
            l_idx.push(j);
            l_val.push(v);
        }
        l_ptr.push(l_idx.len());
        for &(j, v) in &upper {
            u_idx.push(j);
            u_val.push(v);
        }
        u_ptr.push(u_idx.len());

        for &j in &touched {
            marked[j] = false;
            w[j] = 0.0;
        }
        touched.clear();
    }

    let mut full_ptr = vec![0usize];
    let mut full_idx = Vec::with_capacity(u_idx.len() + n);
    let mut full_val = Vec::with_capacity(u_idx.len() + n);
    for i in 0..n {
        full_idx.push(i);
        full_val.push(u_diag[i]);
        full_idx.extend_from_slice(&u_idx[u_ptr[i]..u_ptr[i + 1]]);
        full_val.extend_from_slice(&u_val[u_ptr[i]..u_ptr[i + 1]]);
        full_ptr.push(full_idx.len());
    }
    Ok(IluFactors {
        l: CsrMatrix::from_parts_unchecked(n, n, l_ptr, l_idx, l_val),
        u: CsrMatrix::from_parts_unchecked(n, n, full_ptr, full_idx, full_val),
        row_scale: None,
        col_scale: None,
    })
}

fn departure_strict_sum(t: &CsrMatrix) -> f64 {
    let s: f64 = t
        .triplets()
        .filter(|&(i, j, _)| i != j)
        .map(|(_, _, v)| v * v)
        .sum();
    libm::sqrt(s)
}

/// Henrici departure from normality `sqrt(||T||_F^2 - sum |lambda_i|^2)` of a
/// triangular matrix.
///
/// The eigenvalues of a triangular matrix are its diagonal, so the radicand
/// is exactly the sum of squared off-diagonal entries. It is accumulated in
/// that form, which avoids the cancellation the subtraction suffers when the
/// diagonal dominates the Frobenius norm.
pub fn departure_from_normality(t: &CsrMatrix, shape: TriangularShape) -> Result<f64> {
    t.check_shape(shape)?;
    Ok(departure_strict_sum(t))
}

/// Estimate of the 1-norm condition number `||T||_1 ||T^-1||_1` of a
/// triangular matrix (Hager's method with Higham's refinements).
///
/// Order-of-magnitude diagnostic only; it is a lower bound for `κ_1` and is
/// not the 2-norm condition number.
pub fn condition_estimate(t: &CsrMatrix, shape: TriangularShape) -> Result<f64> {
    t.check_shape(shape)?;
    let n = t.nrows();
    if n == 0 {
        return Ok(1.0);
    }
    let unit = shape == TriangularShape::UnitLower;
    let lower = shape.is_lower();
    if matches!(
        shape,
        TriangularShape::StrictlyLower | TriangularShape::StrictlyUpper
    ) {
        return Err(Error::ZeroDiagonal { row: 0 });
    }
    if !unit {
        for i in 0..n {
            match t.get(i, i) {
                Some(v) if v != 0.0 => {}
                _ => return Err(Error::ZeroDiagonal { row: i }),
            }
        }
    }
    let tt = t.transpose();
    let solve = |b: &[f64]| trisolve::triangular_solve(t, lower, unit, b);
    let solve_t = |b: &[f64]| trisolve::triangular_solve(&tt, !lower, unit, b);

    let mut col_sums = vec![0.0; n];
    for (i, j, v) in t.triplets() {
        if !(unit && i == j) {
            col_sums[j] += v.abs();
        }
    }
    if unit {
        for s in &mut col_sums {
            *s += 1.0;
        }
    }
    let t_norm = col_sums.iter().copied().fold(0.0, f64::max);

    let one_norm = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();
    let sign = |v: &[f64]| -> Vec<f64> { v.iter().map(|&x| if x < 0.0 { -1.0 } else { 1.0 }).collect() };
    let argmax = |v: &[f64]| {
        let mut best = 0;
        for k in 1..v.len() {
            if v[k].abs() > v[best].abs() {
                best = k;
            }
        }
        best
    };

    let x = vec![1.0 / n as f64; n];
    let y = solve(&x)?;
    let mut est = one_norm(&y);
    let mut xi = sign(&y);
    let z = solve_t(&xi)?;
    let mut j = argmax(&z);
    for _ in 0..4 {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let y = solve(&e)?;
        let new_est = one_norm(&y);
        let new_xi = sign(&y);
        if new_est <= est || new_xi == xi {
            est = est.max(new_est);
            break;
        }
        est = new_est;
        xi = new_xi;
        let z = solve_t(&xi)?;
        let jn = argmax(&z);
        if z[jn].abs() <= z[j].abs() || jn == j {
            break;
        }
        j = jn;
    }
    // Higham's alternative probe guards against badly chosen unit vectors
    let alt: Vec<f64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            let frac = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            s * (1.0 + frac)
        })
        .collect();
    let y = solve(&alt)?;
    let alt_est = 2.0 * one_norm(&y) / (3.0 * n as f64);
    Ok(t_norm * est.max(alt_est))
}

/// Column-wise magnitude diagnostics for `L + U`.
#[derive(Clone, Debug)]
pub struct StripingReport {
    /// Median absolute value over all stored entries of `L + U`.
    pub median_abs: f64,
    /// Per column: largest absolute entry divided by `median_abs`.
    pub column_ratio: Vec<f64>,
    pub threshold: f64,
    /// Columns whose ratio exceeds `threshold`, ascending.
    pub flagged: Vec<usize>,
}

pub const DEFAULT_STRIPING_THRESHOLD: f64 = 1e8;

/// Detects vertical stripes in `L + U`: columns whose entries are orders of
/// magnitude larger than a typical factor entry.
pub fn striping_report(f: &IluFactors, threshold: f64) -> StripingReport {
    let n = f.dim();
    let mut col_max = vec![0.0f64; n];
    let mut mags: Vec<f64> = Vec::with_capacity(f.nnz_l() + f.nnz_u());
    for (_, j, v) in f.l.triplets().chain(f.u.triplets()) {
        let m = v.abs();
        if m > 0.0 {
            mags.push(m);
            col_max[j] = col_max[j].max(m);
        }
    }
    let median_abs = if mags.is_empty() {
        0.0
    } else {
        let mid = mags.len() / 2;
        let (_, m, _) = mags.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
        *m
    };
    let column_ratio: Vec<f64> = col_max
        .iter()
        .map(|&m| if median_abs > 0.0 { m / median_abs } else { 0.0 })
        .collect();
    let flagged = column_ratio
        .iter()
        .enumerate()
        .filter(|(_, &r)| r > threshold)
        .map(|(j, _)| j)
        .collect();
    StripingReport {
        median_abs,
        column_ratio,
        threshold,
        flagged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use proptest::prelude::*;
    use std::vec;

    fn dense_from_factors(f: &IluFactors) -> (std::vec::Vec<f64>, std::vec::Vec<f64>) {
        let n = f.dim();
        let mut l = f.l().to_dense();
        for i in 0..n {
            l[i * n + i] = 1.0;
        }
        (l, f.unscaled_u().to_dense())
    }

    fn spd_dense(n: usize, seed: u64) -> CsrMatrix {
        // B^T B + n I is SPD and fully dense
        let b = random_vec(n * n, seed);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| b[k * n + i] * b[k * n + j]).sum::<f64>();
            }
            a[i * n + i] += n as f64;
        }
        CsrMatrix::from_dense(n, n, &a).unwrap()
    }

    #[test]
    fn ilu0_of_diagonal() {
        let a = CsrMatrix::from_diagonal(&[2.0, -3.0, 5.0]);
        let f = ilu0(&a, &IluParams::ilu0()).unwrap();
        assert_eq!(f.nnz_l(), 0);
        assert_eq!(f.u(), &a);
    }

    #[test]
    fn ilu0_full_pattern_is_exact_lu() {
        let a = spd_dense(6, 7);
        let f = ilu0(&a, &IluParams::ilu0()).unwrap();
        let (lo, uo) = dense_lu_nopivot(&a.to_dense(), 6);
        let (l, u) = dense_from_factors(&f);
        assert!(max_abs_diff(&l, &lo) < 1e-12);
        assert!(max_abs_diff(&u, &uo) < 1e-12);
    }

    #[test]
    fn ilu0_missing_diagonal() {
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            ilu0(&a, &IluParams::ilu0()),
            Err(Error::MissingDiagonal { row: 1 })
        ));
    }

    #[test]
    fn zero_pivot_error_and_patch() {
        // second pivot is 1 - 1*1 = 0
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            ilu0(&a, &IluParams::ilu0()),
            Err(Error::ZeroPivot { row: 1 })
        ));
        let mut p = IluParams::ilu0();
        p.pivot_patch = PivotPatch::Replace;
        p.droptol = 1e-3;
        let f = ilu0(&a, &p).unwrap();
        let expect = 1e-3 * 2f64.sqrt();
        assert!((f.u().get(1, 1).unwrap() - expect).abs() < 1e-18);

        let mut p = IluParams::ilut(0.0, 4);
        assert!(matches!(ilut(&a, &p), Err(Error::ZeroPivot { row: 1 })));
        p.pivot_patch = PivotPatch::Replace;
        let f = ilut(&a, &p).unwrap();
        assert!((f.u().get(1, 1).unwrap() - 1e-16 * 2.0).abs() < 1e-30);
    }

    #[test]
    fn ilut_without_dropping_is_exact_lu() {
        let a = spd_dense(20, 9);
        let f = ilut(&a, &IluParams::ilut(0.0, 20)).unwrap();
        let (lo, uo) = dense_lu_nopivot(&a.to_dense(), 20);
        let (l, u) = dense_from_factors(&f);
        let scale = uo.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(max_abs_diff(&l, &lo) < 1e-10);
        assert!(max_abs_diff(&u, &uo) < 1e-10 * scale);
    }

    #[test]
    fn ilut_drop_everything_leaves_diagonal() {
        let a = poisson2d(5, 5);
        let f = ilut(&a, &IluParams::ilut(1e99, 0)).unwrap();
        assert_eq!(f.nnz_l(), 0);
        assert_eq!(f.nnz_u(), 25);
        assert!(f.u().check_shape(TriangularShape::Upper).is_ok());
        assert_eq!(f.dep_u(), 0.0);
        assert_eq!(f.u().diag().unwrap(), a.diag().unwrap());
    }

    #[test]
    fn ilut_matches_ilu0_when_pattern_allows() {
        // tridiagonal: ILU(0) is exact and ILUT(0, 1) keeps the same entries
        let a = tridiag(12, -1.0, 2.0, -1.0);
        let f0 = ilu0(&a, &IluParams::ilu0()).unwrap();
        let ft = ilut(&a, &IluParams::ilut(0.0, 1)).unwrap();
        assert!(max_abs_diff(&f0.l().to_dense(), &ft.l().to_dense()) < 1e-15);
        assert!(max_abs_diff(&f0.u().to_dense(), &ft.u().to_dense()) < 1e-15);
    }

    #[test]
    fn ilut_rejects_bad_droptol() {
        let a = tridiag(3, -1.0, 2.0, -1.0);
        assert!(ilut(&a, &IluParams::ilut(f64::NAN, 1)).is_err());
        assert!(ilut(&a, &IluParams::ilut(-1.0, 1)).is_err());
    }

    #[test]
    fn row_scale_identity_when_unit() {
        let u = random_triangular(10, 0.3, false, true, 3);
        let f = IluFactors::new(CsrMatrix::zeros(10, 10), u.clone()).unwrap();
        let s = f.row_scale_u().unwrap();
        assert_eq!(s.u(), &u);
        assert!(s.row_scale().unwrap().iter().all(|&d| d == 1.0));
    }

    #[test]
    fn row_scale_unit_diagonal_and_pattern() {
        let u = random_triangular(50, 0.1, false, false, 17);
        let f = IluFactors::new(CsrMatrix::zeros(50, 50), u.clone()).unwrap();
        let s = f.row_scale_u().unwrap();
        for d in s.u().diag().unwrap() {
            assert!((d - 1.0).abs() < 1e-14);
        }
        assert_eq!(s.u().col_idx(), u.col_idx());
        assert_eq!(s.u().row_ptr(), u.row_ptr());
        assert!(max_abs_diff(&s.unscaled_u().to_dense(), &u.to_dense()) < 1e-14);
        assert!(matches!(s.row_scale_u(), Err(Error::AlreadyScaled)));
    }

    #[test]
    fn row_col_scale_unit_diagonal() {
        let u = random_triangular(40, 0.15, false, false, 23);
        let f = IluFactors::new(CsrMatrix::zeros(40, 40), u.clone()).unwrap();
        let s = f.row_col_scale_u().unwrap();
        for d in s.u().diag().unwrap() {
            assert!((d - 1.0).abs() < 1e-14);
        }
        assert!(max_abs_diff(&s.unscaled_u().to_dense(), &u.to_dense()) < 1e-13);
        let diag_only = CsrMatrix::from_diagonal(&[4.0, -9.0, 0.25]);
        let g = IluFactors::new(CsrMatrix::zeros(3, 3), diag_only).unwrap();
        let s = g.row_col_scale_u().unwrap();
        assert!(max_abs_diff(&s.u().to_dense(), &CsrMatrix::identity(3).to_dense()) < 1e-15);
    }

    #[test]
    fn scaling_rejects_zero_diagonal() {
        let u = CsrMatrix::from_dense(2, 2, &[1.0, 2.0, 0.0, 0.0]).unwrap();
        let f = IluFactors::new(CsrMatrix::zeros(2, 2), u).unwrap();
        assert!(matches!(f.row_scale_u(), Err(Error::ZeroDiagonal { row: 1 })));
        assert!(matches!(f.row_col_scale_u(), Err(Error::ZeroDiagonal { row: 1 })));
    }

    #[test]
    fn departure_of_diagonal_is_zero() {
        let d = CsrMatrix::from_diagonal(&[3.0, -1.0, 7.0]);
        assert_eq!(departure_from_normality(&d, TriangularShape::Upper).unwrap(), 0.0);
        assert_eq!(departure_from_normality(&d, TriangularShape::Lower).unwrap(), 0.0);
    }

    #[test]
    fn departure_unit_upper_identity() {
        let u = random_triangular(30, 0.2, false, true, 8);
        let dep = departure_from_normality(&u, TriangularShape::Upper).unwrap();
        let fro = u.frobenius_norm();
        let expect = (fro * fro - 30.0).sqrt();
        assert!((dep - expect).abs() <= 1e-12 * expect.max(1.0));
    }

    #[test]
    fn departure_requires_triangular() {
        let a = tridiag(3, -1.0, 2.0, -1.0);
        assert!(matches!(
            departure_from_normality(&a, TriangularShape::Upper),
            Err(Error::ShapeViolation { .. })
        ));
    }

    #[test]
    fn departure_matches_dense_eigen_definition() {
        // ||T||_F^2 - sum of squared eigenvalues, eigenvalues = diagonal
        let u = random_triangular(25, 0.3, false, false, 31);
        let d = u.to_dense();
        let fro2: f64 = d.iter().map(|v| v * v).sum();
        let eig2: f64 = (0..25).map(|i| d[i * 25 + i] * d[i * 25 + i]).sum();
        let dep = departure_from_normality(&u, TriangularShape::Upper).unwrap();
        assert!((dep - (fro2 - eig2).sqrt()).abs() < 1e-12 * dep);
    }

    #[test]
    fn symmetric_ilu0_row_scaled_u_is_l_transpose() {
        // for symmetric A, ILU(0) gives U = D L^T, hence dep(D^-1 U) = dep(L)
        let a = poisson2d(9, 7);
        let f = ilu0(&a, &IluParams::ilu0()).unwrap();
        let s = f.row_scale_u().unwrap();
        let dl = f.dep_l();
        assert!((s.dep_u() - dl).abs() < 1e-12 * dl);
        assert!(s.dep_u() < f.dep_u());
    }

    #[test]
    fn condition_of_identity_and_diagonal() {
        let i = CsrMatrix::identity(5);
        assert!((condition_estimate(&i, TriangularShape::Upper).unwrap() - 1.0).abs() < 1e-15);
        let d = CsrMatrix::from_diagonal(&[1.0, 1e-8]);
        let k = condition_estimate(&d, TriangularShape::Lower).unwrap();
        assert!((k / 1e8 - 1.0).abs() < 1e-12);
        let l = CsrMatrix::zeros(4, 4);
        let k = condition_estimate(&l, TriangularShape::UnitLower).unwrap();
        assert!((k - 1.0).abs() < 1e-15);
    }

    #[test]
    fn condition_within_factor_ten_of_dense() {
        for seed in 0..5 {
            let t = random_triangular(30, 0.3, true, false, 100 + seed);
            let d = t.to_dense();
            let exact = dense_one_norm(&d, 30) * dense_one_norm(&dense_inverse(&d, 30), 30);
            let est = condition_estimate(&t, TriangularShape::Lower).unwrap();
            assert!(est <= exact * (1.0 + 1e-8), "seed {seed}: {est} > {exact}");
            assert!(est * 10.0 >= exact, "seed {seed}: {est} vs {exact}");
        }
    }

    #[test]
    fn condition_rejects_singular() {
        let u = CsrMatrix::from_dense(2, 2, &[1.0, 2.0, 0.0, 0.0]).unwrap();
        assert!(condition_estimate(&u, TriangularShape::Upper).is_err());
    }

    #[test]
    fn no_striping_on_tridiagonal() {
        let f = ilu0(&tridiag(50, -1.0, 2.0, -1.0), &IluParams::ilu0()).unwrap();
        let r = striping_report(&f, DEFAULT_STRIPING_THRESHOLD);
        assert!(r.flagged.is_empty());
    }

    #[test]
    fn scaled_column_is_flagged() {
        let f = ilu0(&tridiag(20, -1.0, 2.0, -1.0), &IluParams::ilu0()).unwrap();
        let u = f.u().map_values(|_, j, v| if j == 7 { v * 1e12 } else { v });
        let g = IluFactors::new(f.l().clone(), u).unwrap();
        let r = striping_report(&g, DEFAULT_STRIPING_THRESHOLD);
        assert_eq!(r.flagged, vec![7]);
    }

    #[test]
    fn mixed_row_scales_produce_stripes() {
        let a = poisson2d(8, 8).map_values(|i, _, v| if i % 3 == 0 { v * 1e-10 } else { v });
        let f = ilu0(&a, &IluParams::ilu0()).unwrap();
        let r = striping_report(&f, DEFAULT_STRIPING_THRESHOLD);
        assert!(!r.flagged.is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn ilu0_reproduces_a_on_its_pattern(n in 2usize..100, seed in any::<u64>()) {
            let a = random_diag_dominant(n, 0.08, seed);
            let f = ilu0(&a, &IluParams::ilu0()).unwrap();
            let (l, u) = dense_from_factors(&f);
            let lu = dense_matmul(&l, &u, n, n, n);
            let tol = 1e-10 * a.frobenius_norm();
            for (i, j, v) in a.triplets() {
                prop_assert!((lu[i * n + j] - v).abs() <= tol);
            }
            prop_assert_eq!(f.nnz_l() + f.nnz_u(), a.nnz());
        }

        #[test]
        fn ilut_honours_fill_bound(n in 2usize..60, lfill in 0usize..6, seed in any::<u64>()) {
            let a = random_diag_dominant(n, 0.2, seed);
            let f = ilut(&a, &IluParams::ilut(1e-3, lfill)).unwrap();
            for i in 0..n {
                prop_assert!(f.l().row(i).0.len() <= lfill);
                prop_assert!(f.u().row(i).0.len() <= lfill + 1);
                prop_assert_eq!(f.u().row(i).0[0], i);
            }
        }

        #[test]
        fn row_scaling_preserves_pattern_and_identity(n in 2usize..60, seed in any::<u64>()) {
            let a = random_diag_dominant(n, 0.15, seed);
            let f = ilu0(&a, &IluParams::ilu0()).unwrap();
            let s = f.row_scale_u().unwrap();
            prop_assert_eq!(s.u().col_idx(), f.u().col_idx());
            // unit diagonal: dep^2 = ||U||_F^2 - n
            let fro2 = s.u().frobenius_norm().powi(2);
            prop_assert!((s.dep_u().powi(2) - (fro2 - n as f64)).abs() <= 1e-12 * fro2);
        }
    }
}
