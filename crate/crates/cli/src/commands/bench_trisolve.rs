//! Error of `m` Richardson sweeps against exact triangular solves, for
//! `m = 1..=m_max`.

use scilu_core::factor::IluParams;
use scilu_core::smoother::{build_ilu, Scaling};
use scilu_core::trisolve::{
    apply_factors, direct_upper_scaled, neumann_tail_norm, richardson_lower,
    richardson_upper_scaled, solve_lower_direct, TriSolveConfig,
};
use scilu_core::vector::rel_diff;
use scilu_core::CsrMatrix;

use super::{csv, num};
use crate::CliError;

/// Probe vectors and seed of the tail-norm estimate.
pub const TAIL_PROBES: usize = 4;
pub const TAIL_SEED: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub m: usize,
    /// Relative error of the `L` solve.
    pub err_lower: f64,
    /// Relative error of the scaled `U` solve.
    pub err_upper: f64,
    /// Relative error of the full `(LU)^{-1}` application with `m` sweeps
    /// per factor.
    pub err_direct_rel: f64,
    /// Larger of the `||L_s^m||_2` and `||U_s^m||_2` estimates.
    pub tail_norm_estimate: f64,
}

/// `b = A 1` is the probe right-hand side. `scaling` must be row or
/// row/column since Richardson runs on the unit-diagonal factor.
pub fn bench_trisolve(
    a: &CsrMatrix,
    params: &IluParams,
    scaling: Scaling,
    m_max: usize,
) -> Result<Vec<BenchRow>, CliError> {
    if scaling == Scaling::None {
        return Err(CliError::Usage(
            "bench-trisolve needs row or row_col scaling of U".into(),
        ));
    }
    let f = build_ilu(a, params, scaling)?;
    let b = a.spmv(&vec![1.0; a.nrows()])?;
    let y_exact = solve_lower_direct(f.l(), &b)?;
    let z_exact = direct_upper_scaled(&f, &b)?;
    let x_exact = apply_factors(&f, &TriSolveConfig::direct(), &b)?;
    let u_s = f.u_strict();
    (1..=m_max)
        .map(|m| {
            let y = richardson_lower(f.l(), &b, m)?;
            let z = richardson_upper_scaled(&f, &b, m)?;
            let x = apply_factors(&f, &TriSolveConfig::richardson(m, m), &b)?;
            let tail = neumann_tail_norm(f.l(), m, TAIL_PROBES, TAIL_SEED)
                .max(neumann_tail_norm(&u_s, m, TAIL_PROBES, TAIL_SEED));
            Ok(BenchRow {
                m,
                err_lower: rel_diff(&y, &y_exact),
                err_upper: rel_diff(&z, &z_exact),
                err_direct_rel: rel_diff(&x, &x_exact),
                tail_norm_estimate: tail,
            })
        })
        .collect()
}

pub const HEADER: &[&str] = &["m", "err_lower", "err_upper", "err_direct_rel", "tail_norm_estimate"];

pub fn to_csv(rows: &[BenchRow]) -> String {
    csv(
        HEADER,
        rows.iter().map(|r| {
            vec![
                r.m.to_string(),
                num(r.err_lower),
                num(r.err_upper),
                num(r.err_direct_rel),
                num(r.tail_norm_estimate),
            ]
        }),
    )
}
