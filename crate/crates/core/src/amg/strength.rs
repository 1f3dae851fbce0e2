//! Strength of connection.

use alloc::vec::Vec;

use crate::{CsrMatrix, Error, Result};

/// Strong couplings: `S_ij = 1` iff `j != i` and
/// `|a_ij| >= theta * max_{k != i} |a_ik|`.
///
/// The absolute value is taken on both sides, so positive off-diagonals can
/// be strong as well. Rows without off-diagonal entries have empty rows in
/// `S`, and so do rows whose off-diagonal entries are all zero.
pub fn strength(a: &CsrMatrix, theta: f64) -> Result<CsrMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "strength",
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter(alloc::format!("theta must lie in (0, 1], got {theta}")));
    }
    let n = a.nrows();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        let max = a
            .row_iter(i)
            .filter(|&(j, _)| j != i)
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        if max > 0.0 {
            let cut = theta * max;
            col_idx.extend(
                a.row_iter(i)
                    .filter(|&(j, v)| j != i && v.abs() >= cut)
                    .map(|(j, _)| j),
            );
        }
        row_ptr.push(col_idx.len());
    }
    let values = alloc::vec![1.0; col_idx.len()];
    Ok(CsrMatrix::from_parts_unchecked(n, n, row_ptr, col_idx, values))
}
