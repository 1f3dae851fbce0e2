//! Right-preconditioned GMRES and flexible GMRES.
//!
//! Both use modified Gram-Schmidt Arnoldi with Givens rotations. GMRES keeps
//! only the Arnoldi basis `V` and maps the correction through the
//! preconditioner when it is needed (`x = x0 + M⁻¹ V y`); FGMRES stores the
//! preconditioned directions `Z` and forms `x = x0 + Z y`, so the
//! preconditioner may change between iterations.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::vector::{axpy, dot, is_finite, two_norm};
use crate::{CsrMatrix, Error, Result};

/// Applies an approximate inverse: `z = M⁻¹ r`.
pub trait Preconditioner {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<()>;
}

/// `M = I`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl Preconditioner for Identity {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(r);
        Ok(())
    }
}

impl<P: Preconditioner + ?Sized> Preconditioner for &mut P {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<()> {
        (**self).apply(r, z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KrylovMethod {
    Gmres,
    Fgmres,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StoppingCriterion {
    /// `||b - A x|| / ||b||`, tracked through the Arnoldi residual.
    RelRes,
    /// `||b - A x|| / (||b|| + ||A|| ||x||)` on the true residual.
    Nrbe,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovParams {
    pub method: KrylovMethod,
    pub restart: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub criterion: StoppingCriterion,
    /// Record the true residual and NRBE of every iterate. Costs one SpMV
    /// per iteration, plus one preconditioner application for GMRES.
    pub record_history: bool,
    /// Seed of the power iteration estimating `||A||_2`.
    pub anorm_seed: u64,
}

impl Default for KrylovParams {
    fn default() -> Self {
        KrylovParams {
            method: KrylovMethod::Fgmres,
            restart: 50,
            max_iters: 200,
            tol: 1e-5,
            criterion: StoppingCriterion::RelRes,
            record_history: false,
            anorm_seed: 0x5eed,
        }
    }
}

impl KrylovParams {
    pub fn validate(&self) -> Result<()> {
        if self.restart == 0 {
            return Err(Error::InvalidParameter("restart must be >= 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter("tol must be a positive finite number".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoryEntry {
    pub iter: usize,
    pub arnoldi_rel: f64,
    pub true_rel: f64,
    pub nrbe: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub history: Vec<HistoryEntry>,
    pub converged: bool,
    pub false_convergence: bool,
    pub anorm_estimate: f64,
    /// Arnoldi residual norm over `||b||` at exit.
    pub arnoldi_rel: f64,
    /// `||b - A x|| / ||b||` recomputed at exit.
    pub true_rel: f64,
}

/// Norm-wise relative backward error `||b - Ax|| / (||b|| + anorm ||x||)`.
pub fn nrbe(a: &CsrMatrix, x: &[f64], b: &[f64], anorm: f64) -> Result<f64> {
    let r = a.residual(b, x)?;
    Ok(nrbe_from_parts(two_norm(&r), two_norm(b), anorm, two_norm(x)))
}

fn nrbe_from_parts(rnorm: f64, bnorm: f64, anorm: f64, xnorm: f64) -> f64 {
    let d = bnorm + anorm * xnorm;
    if d == 0.0 {
        0.0
    } else {
        rnorm / d
    }
}

/// Power iteration on `AᵀA` for `||A||_2`, from a seeded random start.
pub fn estimate_two_norm(a: &CsrMatrix, steps: usize, seed: u64) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nnz() == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = two_norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda = 0.0;
    let mut av = vec![0.0; a.nrows()];
    for _ in 0..steps {
        a.spmv_into(&v, &mut av);
        let w = a.spmv_transpose(&av).expect("dimensions agree");
        lambda = two_norm(&w);
        if lambda == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|x| x / lambda).collect();
    }
    libm::sqrt(lambda)
}

/// Solves with the method named in `params`.
pub fn solve<P: Preconditioner + ?Sized>(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    precond: &mut P,
    params: &KrylovParams,
) -> Result<(Vec<f64>, SolveReport)> {
    match params.method {
        KrylovMethod::Gmres => gmres(a, b, x0, precond, params),
        KrylovMethod::Fgmres => fgmres(a, b, x0, precond, params),
    }
}

pub fn gmres<P: Preconditioner + ?Sized>(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    precond: &mut P,
    params: &KrylovParams,
) -> Result<(Vec<f64>, SolveReport)> {
    run(a, b, x0, precond, params, false)
}

pub fn fgmres<P: Preconditioner + ?Sized>(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    precond: &mut P,
    params: &KrylovParams,
) -> Result<(Vec<f64>, SolveReport)> {
    run(a, b, x0, precond, params, true)
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else {
        let h = libm::hypot(a, b);
        (a / h, b / h)
    }
}

/// Back substitution with the leading `k x k` block of the rotated Hessenberg
/// matrix (stored by columns).
fn least_squares(h: &[Vec<f64>], g: &[f64], k: usize) -> Vec<f64> {
    let mut y = g[..k].to_vec();
    for i in (0..k).rev() {
        for j in i + 1..k {
            y[i] -= h[j][i] * y[j];
        }
        y[i] /= h[i][i];
    }
    y
}

struct Cycle<'a, P: ?Sized> {
    precond: &'a mut P,
    flexible: bool,
    v: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
}

impl<P: Preconditioner + ?Sized> Cycle<'_, P> {
    /// `sum_j y_j z_j`, or `M⁻¹ sum_j y_j v_j` for the standard variant.
    fn correction(&mut self, y: &[f64], n: usize) -> Result<Vec<f64>> {
        let mut u = vec![0.0; n];
        let basis = if self.flexible { &self.z } else { &self.v };
        for (yj, bj) in y.iter().zip(basis) {
            axpy(*yj, bj, &mut u);
        }
        if self.flexible {
            Ok(u)
        } else {
            let mut out = vec![0.0; n];
            self.precond.apply(&u, &mut out)?;
            Ok(out)
        }
    }
}

fn run<P: Preconditioner + ?Sized>(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    precond: &mut P,
    params: &KrylovParams,
    flexible: bool,
) -> Result<(Vec<f64>, SolveReport)> {
    params.validate()?;
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "gmres",
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    let n = a.nrows();
    for len in [b.len(), x0.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                op: "gmres",
                expected: n,
                found: len,
            });
        }
    }
    let anorm = estimate_two_norm(a, 50, params.anorm_seed);
    let mut report = SolveReport {
        anorm_estimate: anorm,
        ..Default::default()
    };
    let bnorm = two_norm(b);
    if bnorm == 0.0 {
        report.converged = true;
        if params.record_history {
            report.history.push(HistoryEntry {
                iter: 0,
                arnoldi_rel: 0.0,
                true_rel: 0.0,
                nrbe: 0.0,
            });
        }
        return Ok((vec![0.0; n], report));
    }

    let mut x = x0.to_vec();
    let mut r = a.residual(b, &x)?;
    let mut beta = two_norm(&r);
    let rel0 = beta / bnorm;
    let nrbe0 = nrbe_from_parts(beta, bnorm, anorm, two_norm(&x));
    report.arnoldi_rel = rel0;
    if params.record_history {
        report.history.push(HistoryEntry {
            iter: 0,
            arnoldi_rel: rel0,
            true_rel: rel0,
            nrbe: nrbe0,
        });
    }
    let met = |rel: f64, nrbe: f64| match params.criterion {
        StoppingCriterion::RelRes => rel < params.tol,
        StoppingCriterion::Nrbe => nrbe < params.tol,
    };
    let need_x = params.record_history || params.criterion == StoppingCriterion::Nrbe;
    let mut converged = met(rel0, nrbe0);
    let mut cycle = Cycle {
        precond,
        flexible,
        v: Vec::new(),
        z: Vec::new(),
    };
    let mut w = vec![0.0; n];
    let mut zj = vec![0.0; n];

    while !converged && report.iterations < params.max_iters && beta > 0.0 {
        let m = params.restart;
        cycle.v.clear();
        cycle.z.clear();
        cycle.v.push(r.iter().map(|ri| ri / beta).collect());
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<f64> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        while k < m && report.iterations < params.max_iters {
            cycle.precond.apply(&cycle.v[k], &mut zj)?;
            a.spmv_into(&zj, &mut w);
            if flexible {
                cycle.z.push(zj.clone());
            }
            let mut col = vec![0.0; k + 2];
            for (i, vi) in cycle.v.iter().enumerate() {
                let hij = dot(&w, vi);
                col[i] = hij;
                axpy(-hij, vi, &mut w);
            }
            let hnext = two_norm(&w);
            col[k + 1] = hnext;
            for i in 0..k {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let (c, s) = givens(col[k], col[k + 1]);
            col[k] = c * col[k] + s * col[k + 1];
            col[k + 1] = 0.0;
            g[k + 1] = -s * g[k];
            g[k] *= c;
            cs.push(c);
            sn.push(s);
            h.push(col);
            k += 1;
            report.iterations += 1;

            let arnoldi_rel = g[k].abs() / bnorm;
            report.arnoldi_rel = arnoldi_rel;
            if !arnoldi_rel.is_finite() {
                report.converged = false;
                return Err(Error::NonFinite(Box::new(report)));
            }
            let breakdown = hnext <= 1e-14 * h[k - 1][k - 1].abs();
            let mut nrbe_k = f64::INFINITY;
            if need_x {
                let y = least_squares(&h, &g, k);
                let mut xk = cycle.correction(&y, n)?;
                for (xi, x0i) in xk.iter_mut().zip(&x) {
                    *xi += x0i;
                }
                let rk = two_norm(&a.residual(b, &xk)?);
                nrbe_k = nrbe_from_parts(rk, bnorm, anorm, two_norm(&xk));
                if params.record_history {
                    report.history.push(HistoryEntry {
                        iter: report.iterations,
                        arnoldi_rel,
                        true_rel: rk / bnorm,
                        nrbe: nrbe_k,
                    });
                }
            }
            if met(arnoldi_rel, nrbe_k) || breakdown {
                converged = true;
                break;
            }
            cycle.v.push(w.iter().map(|wi| wi / hnext).collect());
        }
        let y = least_squares(&h, &g, k);
        let dx = cycle.correction(&y, n)?;
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        if !is_finite(&x) {
            return Err(Error::NonFinite(Box::new(report)));
        }
        r = a.residual(b, &x)?;
        beta = two_norm(&r);
        if !converged && params.criterion == StoppingCriterion::RelRes {
            // A restart may already satisfy the test with the true residual.
            converged = beta / bnorm < params.tol;
        }
        log::debug!(
            "gmres cycle end: {} iterations, true relres {:e}",
            report.iterations,
            beta / bnorm
        );
    }

    report.true_rel = beta / bnorm;
    if report.iterations == 0 {
        report.arnoldi_rel = report.true_rel;
    }
    if params.criterion == StoppingCriterion::Nrbe && !converged {
        converged = nrbe_from_parts(beta, bnorm, anorm, two_norm(&x)) < params.tol;
    }
    report.converged = converged;
    report.false_convergence = (report.true_rel - report.arnoldi_rel).abs() > 10.0 * params.tol;
    if report.false_convergence {
        log::warn!(
            "false convergence: Arnoldi relres {:e}, true relres {:e}",
            report.arnoldi_rel,
            report.true_rel
        );
    }
    Ok((x, report))
}
