//! Compressed sparse row storage and the kernels every other module builds on.
//!
//! All accumulations run in ascending column order so results are
//! bit-reproducible from run to run.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Structural shape of a triangular matrix.
///
/// `UnitLower` allows the unit diagonal to be stored explicitly (as exact
/// ones) or left implicit; the ILU factors in this crate keep it implicit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangularShape {
    UnitLower,
    Lower,
    Upper,
    StrictlyLower,
    StrictlyUpper,
}

impl TriangularShape {
    fn admits(self, row: usize, col: usize, value: f64) -> bool {
        match self {
            TriangularShape::UnitLower => col < row || (col == row && value == 1.0),
            TriangularShape::Lower => col <= row,
            TriangularShape::Upper => col >= row,
            TriangularShape::StrictlyLower => col < row,
            TriangularShape::StrictlyUpper => col > row,
        }
    }

    pub fn is_lower(self) -> bool {
        matches!(
            self,
            TriangularShape::UnitLower | TriangularShape::Lower | TriangularShape::StrictlyLower
        )
    }
}

/// Compressed sparse row matrix of `f64`.
///
/// Invariants: `row_ptr` is non-decreasing with `row_ptr[0] == 0` and
/// `row_ptr[nrows] == nnz`; column indices are strictly increasing within a
/// row and bounded by `ncols`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Whether triplet assembly drops entries that sum to exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Zeros {
    Drop,
    Keep,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, validating every invariant.
    /// Stored zeros are kept as given.
    pub fn try_from_csr(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != nrows + 1 {
            return Err(Error::InvalidStructure(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                nrows + 1
            )));
        }
        if row_ptr[0] != 0 {
            return Err(Error::InvalidStructure("row_ptr[0] must be 0".into()));
        }
        let nnz = row_ptr[nrows];
        if col_idx.len() != nnz || values.len() != nnz {
            return Err(Error::InvalidStructure(format!(
                "row_ptr ends at {nnz} but there are {} column indices and {} values",
                col_idx.len(),
                values.len()
            )));
        }
        for i in 0..nrows {
            let (start, end) = (row_ptr[i], row_ptr[i + 1]);
            if start > end {
                return Err(Error::InvalidStructure(format!("row_ptr decreases at row {i}")));
            }
            let cols = &col_idx[start..end];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!(
                    "columns of row {i} are not strictly increasing"
                )));
            }
            if let Some(&c) = cols.last() {
                if c >= ncols {
                    return Err(Error::InvalidStructure(format!(
                        "column {c} in row {i} out of range for {ncols} columns"
                    )));
                }
            }
        }
        Ok(Self::from_parts_unchecked(nrows, ncols, row_ptr, col_idx, values))
    }

    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), nrows + 1);
        debug_assert_eq!(col_idx.len(), values.len());
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Assembles from `(row, col, value)` triplets in any order. Duplicates
    /// are summed; entries summing to exactly zero are dropped.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::from_triplets_with(nrows, ncols, triplets, Zeros::Drop)
    }

    pub fn from_triplets_with<I>(nrows: usize, ncols: usize, triplets: I, zeros: Zeros) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut t: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(i, j, _) in &t {
            if i >= nrows || j >= ncols {
                return Err(Error::InvalidStructure(format!(
                    "entry ({i}, {j}) out of range for a {nrows}x{ncols} matrix"
                )));
            }
        }
        // stable sort keeps the summation order of duplicates deterministic
        t.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut values = Vec::with_capacity(t.len());
        let mut k = 0;
        while k < t.len() {
            let (i, j, mut v) = t[k];
            k += 1;
            while k < t.len() && t[k].0 == i && t[k].1 == j {
                v += t[k].2;
                k += 1;
            }
            if zeros == Zeros::Keep || v != 0.0 {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self::from_parts_unchecked(nrows, ncols, row_ptr, col_idx, values))
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_parts_unchecked(nrows, ncols, vec![0; nrows + 1], Vec::new(), Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    /// Diagonal matrix; zero diagonal values are stored, not dropped.
    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self::from_parts_unchecked(n, n, (0..=n).collect(), (0..n).collect(), d.to_vec())
    }

    /// From a row-major dense array, dropping exact zeros.
    pub fn from_dense(nrows: usize, ncols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::DimensionMismatch {
                op: "from_dense",
                expected: nrows * ncols,
                found: data.len(),
            });
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..nrows {
            for j in 0..ncols {
                let v = data[i * ncols + j];
                if v != 0.0 {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self::from_parts_unchecked(nrows, ncols, row_ptr, col_idx, values))
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows * self.ncols];
        for i in 0..self.nrows {
            for (j, v) in self.row_iter(i) {
                d[i * self.ncols + j] = v;
            }
        }
        d
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    #[inline]
    pub fn row_iter(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (c, v) = self.row(i);
        c.iter().copied().zip(v.iter().copied())
    }

    /// Iterates over all stored `(row, col, value)` entries in row order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row_iter(i).map(move |(j, v)| (i, j, v)))
    }

    /// Stored value at `(i, j)`, if the position is in the pattern.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (c, v) = self.row(i);
        c.binary_search(&j).ok().map(|k| v[k])
    }

    fn require_square(&self, op: &'static str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                op,
                nrows: self.nrows,
                ncols: self.ncols,
            })
        }
    }

    /// `y = A x`
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                op: "spmv",
                expected: self.ncols,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` without dimension checks beyond debug assertions.
    #[inline]
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = 0.0;
            for k in s..e {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }

    /// `y = A^T x`
    pub fn spmv_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.nrows {
            return Err(Error::DimensionMismatch {
                op: "spmv_transpose",
                expected: self.nrows,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.ncols];
        for (i, xi) in x.iter().enumerate() {
            for (j, v) in self.row_iter(i) {
                y[j] += v * xi;
            }
        }
        Ok(y)
    }

    /// `r = b - A x`
    pub fn residual(&self, b: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.nrows {
            return Err(Error::DimensionMismatch {
                op: "residual",
                expected: self.nrows,
                found: b.len(),
            });
        }
        let mut r = self.spmv(x)?;
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        Ok(r)
    }

    pub(crate) fn residual_into(&self, b: &[f64], x: &[f64], r: &mut [f64]) {
        self.spmv_into(x, r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // rows visited in ascending order, so each output row comes out sorted
        for i in 0..self.nrows {
            for (j, v) in self.row_iter(i) {
                let dst = next[j];
                col_idx[dst] = i;
                values[dst] = v;
                next[j] += 1;
            }
        }
        Self::from_parts_unchecked(self.ncols, self.nrows, row_ptr, col_idx, values)
    }

    /// Sparse product `A B` (Gustavson). Exact-zero results are dropped.
    pub fn matmul(&self, b: &CsrMatrix) -> Result<CsrMatrix> {
        if self.ncols != b.nrows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                expected: self.ncols,
                found: b.nrows,
            });
        }
        let n = b.ncols;
        let mut marker = vec![usize::MAX; n];
        let mut acc = vec![0.0; n];
        let mut pattern: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..self.nrows {
            pattern.clear();
            // symbolic + numeric in one pass; pattern sorted afterwards
            for (k, aik) in self.row_iter(i) {
                for (j, bkj) in b.row_iter(k) {
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = 0.0;
                        pattern.push(j);
                    }
                    acc[j] += aik * bkj;
                }
            }
            pattern.sort_unstable();
            for &j in &pattern {
                if acc[j] != 0.0 {
                    col_idx.push(j);
                    values.push(acc[j]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self::from_parts_unchecked(self.nrows, n, row_ptr, col_idx, values))
    }

    /// `A + B`; entries summing to exactly zero are dropped.
    pub fn add(&self, b: &CsrMatrix) -> Result<CsrMatrix> {
        if self.nrows != b.nrows || self.ncols != b.ncols {
            return Err(Error::DimensionMismatch {
                op: "add",
                expected: self.nrows * self.ncols,
                found: b.nrows * b.ncols,
            });
        }
        CsrMatrix::from_triplets(self.nrows, self.ncols, self.triplets().chain(b.triplets()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|v| v * v).sum())
    }

    /// Euclidean norm of every row.
    pub fn row_two_norms(&self) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| libm::sqrt(self.row(i).1.iter().map(|v| v * v).sum()))
            .collect()
    }

    /// Main diagonal; absent entries read as zero.
    pub fn diag(&self) -> Result<Vec<f64>> {
        self.require_square("diag")?;
        Ok((0..self.nrows).map(|i| self.get(i, i).unwrap_or(0.0)).collect())
    }

    /// Splits `A = L + D + U` into strictly lower, diagonal and strictly
    /// upper parts. The three patterns partition the pattern of `A`.
    pub fn split_triangular(&self) -> Result<(CsrMatrix, CsrMatrix, CsrMatrix)> {
        self.require_square("split_triangular")?;
        Ok((
            self.filter(|i, j, _| j < i),
            self.filter(|i, j, _| j == i),
            self.filter(|i, j, _| j > i),
        ))
    }

    /// Keeps the stored entries for which `keep(row, col, value)` holds.
    pub fn filter<F>(&self, mut keep: F) -> CsrMatrix
    where
        F: FnMut(usize, usize, f64) -> bool,
    {
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..self.nrows {
            for (j, v) in self.row_iter(i) {
                if keep(i, j, v) {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self::from_parts_unchecked(self.nrows, self.ncols, row_ptr, col_idx, values)
    }

    /// Applies `f(row, col, value)` to every stored value.
    pub fn map_values<F>(&self, mut f: F) -> CsrMatrix
    where
        F: FnMut(usize, usize, f64) -> f64,
    {
        let mut out = self.clone();
        for i in 0..self.nrows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.values[k] = f(i, self.col_idx[k], self.values[k]);
            }
        }
        out
    }

    /// Extracts `A[rows, :]` with columns renumbered by `col_map`
    /// (`None` drops the column). Row order follows `rows`.
    pub fn extract(&self, rows: &[usize], col_map: &[Option<usize>], new_ncols: usize) -> CsrMatrix {
        debug_assert_eq!(col_map.len(), self.ncols);
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        row_ptr.push(0);
        for &i in rows {
            scratch.clear();
            scratch.extend(
                self.row_iter(i)
                    .filter_map(|(j, v)| col_map[j].map(|nj| (nj, v))),
            );
            scratch.sort_unstable_by_key(|e| e.0);
            for &(j, v) in &scratch {
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self::from_parts_unchecked(rows.len(), new_ncols, row_ptr, col_idx, values)
    }

    /// Verifies that the pattern structurally satisfies `shape`.
    pub fn check_shape(&self, shape: TriangularShape) -> Result<()> {
        self.require_square("check_shape")?;
        for i in 0..self.nrows {
            for (j, v) in self.row_iter(i) {
                if !shape.admits(i, j, v) {
                    return Err(Error::ShapeViolation { shape, row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{dense_matmul, dense_matvec, random_sparse, tridiag};
    use proptest::prelude::*;
    use std::vec;

    #[test]
    fn identity_spmv() {
        let y = CsrMatrix::identity(3).spmv(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(y, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn zero_vector_spmv() {
        let a = random_sparse(10, 10, 0.3, 1);
        assert!(a.spmv(&[0.0; 10]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tridiag_times_ones() {
        let a = tridiag(3, -1.0, 2.0, -1.0);
        assert_eq!(a.spmv(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let a = CsrMatrix::identity(3);
        assert!(matches!(a.spmv(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn matmul_identity_both_sides() {
        let a = random_sparse(7, 7, 0.4, 3);
        let i = CsrMatrix::identity(7);
        assert_eq!(a.matmul(&i).unwrap(), a);
        assert_eq!(i.matmul(&a).unwrap(), a);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = random_sparse(8, 8, 0.35, 11);
        let b = random_sparse(8, 8, 0.35, 12);
        let c = a.matmul(&b).unwrap().to_dense();
        let d = dense_matmul(&a.to_dense(), &b.to_dense(), 8, 8, 8);
        for (x, y) in c.iter().zip(&d) {
            assert!((x - y).abs() <= 1e-14 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let a = CsrMatrix::zeros(2, 3);
        assert!(a.matmul(&CsrMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn split_tridiag() {
        let a = tridiag(4, -1.0, 2.0, -1.0);
        let (l, d, u) = a.split_triangular().unwrap();
        assert_eq!(l.values(), &[-1.0; 3]);
        assert_eq!(d.values(), &[2.0; 4]);
        assert_eq!(u.values(), &[-1.0; 3]);
        assert!(l.check_shape(TriangularShape::StrictlyLower).is_ok());
        assert!(u.check_shape(TriangularShape::StrictlyUpper).is_ok());
    }

    #[test]
    fn diag_and_split_reject_rectangular() {
        let a = CsrMatrix::zeros(2, 3);
        assert!(matches!(a.diag(), Err(Error::NotSquare { .. })));
        assert!(a.split_triangular().is_err());
    }

    #[test]
    fn frobenius_of_identity() {
        assert!((CsrMatrix::identity(9).frobenius_norm() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 0, 2.5), (1, 1, 1.0), (1, 1, -1.0)])
            .unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), Some(3.5));
        let k = CsrMatrix::from_triplets_with(2, 2, [(1, 1, 1.0), (1, 1, -1.0)], Zeros::Keep).unwrap();
        assert_eq!(k.get(1, 1), Some(0.0));
    }

    #[test]
    fn csr_validation() {
        assert!(CsrMatrix::try_from_csr(2, 2, vec![0, 1, 2], vec![0, 1], vec![1.0, 1.0]).is_ok());
        assert!(CsrMatrix::try_from_csr(2, 2, vec![0, 2, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::try_from_csr(2, 2, vec![0, 1, 2], vec![0, 2], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::try_from_csr(2, 2, vec![1, 1, 2], vec![0, 1], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::try_from_csr(2, 2, vec![0, 2, 1], vec![0, 1], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn shape_checker() {
        let a = tridiag(3, -1.0, 2.0, -1.0);
        assert!(a.check_shape(TriangularShape::Lower).is_err());
        let (l, _, _) = a.split_triangular().unwrap();
        assert!(l.check_shape(TriangularShape::UnitLower).is_ok());
        let li = l.add(&CsrMatrix::identity(3)).unwrap();
        assert!(li.check_shape(TriangularShape::UnitLower).is_ok());
        assert!(li.check_shape(TriangularShape::StrictlyLower).is_err());
        let l2 = l.add(&CsrMatrix::from_diagonal(&[2.0; 3])).unwrap();
        assert!(l2.check_shape(TriangularShape::UnitLower).is_err());
        assert!(l2.check_shape(TriangularShape::Lower).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn spmv_agrees_with_dense(n in 1usize..64, m in 1usize..64, seed in any::<u64>()) {
            let a = random_sparse(n, m, 0.2, seed);
            let x: Vec<f64> = (0..m).map(|k| ((k * 7 + 3) % 11) as f64 - 5.0).collect();
            let y = a.spmv(&x).unwrap();
            let z = dense_matvec(&a.to_dense(), &x, n, m);
            let scale = z.iter().map(|v| v.abs()).fold(1.0, f64::max);
            for (p, q) in y.iter().zip(&z) {
                prop_assert!((p - q).abs() <= 1e-13 * scale);
            }
        }

        #[test]
        fn matmul_is_associative(n in 1usize..12, seed in any::<u64>()) {
            let a = random_sparse(n, n + 1, 0.4, seed);
            let b = random_sparse(n + 1, n, 0.4, seed ^ 0x55);
            let c = random_sparse(n, n + 2, 0.4, seed ^ 0xaa);
            let left = a.matmul(&b).unwrap().matmul(&c).unwrap().to_dense();
            let right = a.matmul(&b.matmul(&c).unwrap()).unwrap().to_dense();
            let scale = left.iter().map(|v| v.abs()).fold(1.0, f64::max);
            for (p, q) in left.iter().zip(&right) {
                prop_assert!((p - q).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn transpose_is_involution(n in 1usize..30, m in 1usize..30, seed in any::<u64>()) {
            let a = random_sparse(n, m, 0.3, seed);
            prop_assert_eq!(a.transpose().transpose(), a);
        }

        #[test]
        fn split_parts_partition_pattern(n in 1usize..40, seed in any::<u64>()) {
            let a = random_sparse(n, n, 0.3, seed);
            let (l, d, u) = a.split_triangular().unwrap();
            prop_assert_eq!(l.nnz() + d.nnz() + u.nnz(), a.nnz());
            prop_assert_eq!(l.add(&d).unwrap().add(&u).unwrap(), a);
        }
    }
}
