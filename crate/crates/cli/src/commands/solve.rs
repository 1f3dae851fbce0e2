//! AMG-preconditioned (F)GMRES on one system.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scilu_core::amg::{setup, AmgPreconditioner, FlopsEstimate, LevelSummary};
use scilu_core::krylov::{self, SolveReport};
use scilu_core::vector::inf_norm;
use scilu_core::CsrMatrix;
use serde_json::json;

use super::{csv, num};
use crate::config::{smoother_kind_name, Rhs, SolverConfig};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub report: SolveReport,
    pub levels: Vec<LevelSummary>,
    pub operator_complexity: f64,
    pub flops: FlopsEstimate,
    /// `||x - 1||_inf` when the right-hand side is `A 1`.
    pub error_vs_ones: Option<f64>,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    pub x: Vec<f64>,
}

/// Reads a vector: whitespace-separated numbers, `%` comment lines allowed,
/// or a Matrix Market `array` file with one column.
pub fn read_vector(path: &str) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines().enumerate().peekable();
    let mut array_header = false;
    if let Some((_, first)) = lines.peek() {
        if first.to_ascii_lowercase().starts_with("%%matrixmarket") {
            array_header = true;
        }
    }
    let mut out = Vec::new();
    let mut skip_size = array_header;
    for (n, line) in lines {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if skip_size {
            skip_size = false;
            continue;
        }
        for tok in t.split_whitespace() {
            out.push(tok.parse().map_err(|_| {
                CliError::Usage(format!("{path}:{}: bad number `{tok}`", n + 1))
            })?);
        }
    }
    Ok(out)
}

pub fn build_rhs(a: &CsrMatrix, rhs: &Rhs) -> Result<Vec<f64>, CliError> {
    let n = a.nrows();
    let b = match rhs {
        Rhs::OnesTimesA => a.spmv(&vec![1.0; n])?,
        Rhs::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
        }
        Rhs::File(p) => read_vector(p)?,
    };
    if b.len() != n {
        return Err(CliError::Usage(format!(
            "right-hand side has {} entries, matrix has {n} rows",
            b.len()
        )));
    }
    Ok(b)
}

/// Builds the hierarchy for `a` and solves `A x = b` from `x = 0`.
pub fn solve_system(a: &CsrMatrix, b: &[f64], cfg: &SolverConfig) -> Result<SolveOutcome, CliError> {
    cfg.validate()?;
    let t0 = Instant::now();
    let h = setup(a, &cfg.amg_params())?;
    let setup_seconds = t0.elapsed().as_secs_f64();
    let levels = h.summary();
    let operator_complexity = h.operator_complexity();
    let flops = h.flops();
    log::info!(
        "hierarchy: {} levels, operator complexity {operator_complexity:.3}",
        levels.len()
    );
    let t1 = Instant::now();
    let x0 = vec![0.0; a.nrows()];
    let (x, report) = krylov::solve(a, b, &x0, &mut AmgPreconditioner::new(h), &cfg.krylov)?;
    let solve_seconds = t1.elapsed().as_secs_f64();
    let error_vs_ones = (cfg.rhs == Rhs::OnesTimesA)
        .then(|| inf_norm(&x.iter().map(|v| v - 1.0).collect::<Vec<_>>()));
    Ok(SolveOutcome {
        report,
        levels,
        operator_complexity,
        flops,
        error_vs_ones,
        setup_seconds,
        solve_seconds,
        x,
    })
}

pub fn solve(a: &CsrMatrix, cfg: &SolverConfig) -> Result<SolveOutcome, CliError> {
    let b = build_rhs(a, &cfg.rhs)?;
    solve_system(a, &b, cfg)
}

pub const HISTORY_HEADER: &[&str] = &["iter", "arnoldi_rel", "true_rel", "nrbe"];

pub fn history_csv(report: &SolveReport) -> String {
    csv(
        HISTORY_HEADER,
        report
            .history
            .iter()
            .map(|h| vec![h.iter.to_string(), num(h.arnoldi_rel), num(h.true_rel), num(h.nrbe)]),
    )
}

fn final_nrbe(o: &SolveOutcome) -> Option<f64> {
    o.report.history.last().map(|h| h.nrbe)
}

pub fn summary_text(o: &SolveOutcome) -> String {
    let r = &o.report;
    let mut s = String::new();
    s.push_str(&format!("converged          {}\n", r.converged));
    s.push_str(&format!("iterations         {}\n", r.iterations));
    s.push_str(&format!("relres (true)      {:e}\n", r.true_rel));
    s.push_str(&format!("relres (arnoldi)   {:e}\n", r.arnoldi_rel));
    if let Some(v) = final_nrbe(o) {
        s.push_str(&format!("nrbe               {v:e}\n"));
    }
    s.push_str(&format!("false convergence  {}\n", r.false_convergence));
    if let Some(e) = o.error_vs_ones {
        s.push_str(&format!("|x - 1|_inf        {e:e}\n"));
    }
    s.push_str(&format!("operator complex.  {:.4}\n", o.operator_complexity));
    s.push_str(&format!(
        "flops per cycle    {} smoothing + {} coarse + {} spmv\n",
        o.flops.vcycle, o.flops.coarse_solve, o.flops.krylov_spmv
    ));
    s.push_str(&format!(
        "time               setup {:.3}s, solve {:.3}s\n",
        o.setup_seconds, o.solve_seconds
    ));
    s.push_str("level        rows         nnz  smoother\n");
    for (k, l) in o.levels.iter().enumerate() {
        s.push_str(&format!(
            "{k:>5} {:>11} {:>11}  {}\n",
            l.rows,
            l.nnz,
            l.smoother.map_or("dense LU", smoother_kind_name)
        ));
    }
    s
}

pub fn summary_json(o: &SolveOutcome) -> serde_json::Value {
    let r = &o.report;
    json!({
        "converged": r.converged,
        "iterations": r.iterations,
        "true_rel": r.true_rel,
        "arnoldi_rel": r.arnoldi_rel,
        "nrbe": final_nrbe(o),
        "false_convergence": r.false_convergence,
        "anorm_estimate": r.anorm_estimate,
        "error_vs_ones": o.error_vs_ones,
        "operator_complexity": o.operator_complexity,
        "flops": {
            "vcycle": o.flops.vcycle,
            "coarse_solve": o.flops.coarse_solve,
            "krylov_spmv": o.flops.krylov_spmv,
        },
        "setup_seconds": o.setup_seconds,
        "solve_seconds": o.solve_seconds,
        "levels": o.levels.iter().map(|l| json!({
            "rows": l.rows,
            "nnz": l.nnz,
            "smoother": l.smoother.map(smoother_kind_name),
        })).collect::<Vec<_>>(),
    })
}
