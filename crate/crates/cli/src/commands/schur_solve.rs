//! Iteration counts of the Schur-complement smoother as the number of
//! simulated ranks grows.

use scilu_core::schur::partition;
use scilu_core::smoother::SmootherKind;
use scilu_core::CsrMatrix;

use super::solve::solve;
use super::{csv, num};
use crate::config::SolverConfig;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchurRow {
    pub blocks: usize,
    /// Interface unknowns of the finest-level partition.
    pub interface_size: usize,
    pub iterations: usize,
    pub converged: bool,
    pub true_rel: f64,
}

/// Runs one solve per entry of `blocks`. The Schur smoother goes on the
/// finest level (or the configured number of hybrid levels); coarser levels
/// keep `smoother.kind`.
pub fn schur_solve(a: &CsrMatrix, cfg: &SolverConfig, blocks: &[usize]) -> Result<Vec<SchurRow>, CliError> {
    let mut base = cfg.clone();
    base.hybrid_levels = base.hybrid_levels.max(1);
    base.hybrid_kind = SmootherKind::SchurIlut;
    blocks
        .iter()
        .map(|&p| {
            let mut c = base.clone();
            c.smoother.schur.blocks = p;
            let interface_size = partition(a, p)?.interface().len();
            let o = solve(a, &c)?;
            log::info!("p = {p}: {} iterations", o.report.iterations);
            Ok(SchurRow {
                blocks: p,
                interface_size,
                iterations: o.report.iterations,
                converged: o.report.converged,
                true_rel: o.report.true_rel,
            })
        })
        .collect()
}

pub const HEADER: &[&str] = &["p", "interface_size", "iterations", "converged", "relres"];

pub fn to_csv(rows: &[SchurRow]) -> String {
    csv(
        HEADER,
        rows.iter().map(|r| {
            vec![
                r.blocks.to_string(),
                r.interface_size.to_string(),
                r.iterations.to_string(),
                r.converged.to_string(),
                num(r.true_rel),
            ]
        }),
    )
}

/// Largest minus smallest iteration count.
pub fn iteration_spread(rows: &[SchurRow]) -> usize {
    let it = rows.iter().map(|r| r.iterations);
    it.clone().max().unwrap_or(0) - it.min().unwrap_or(0)
}
