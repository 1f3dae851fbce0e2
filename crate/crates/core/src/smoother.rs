//! Relaxation schemes for the multigrid levels.
//!
//! A [`Smoother`] is built once per level during setup and is read-only
//! afterwards; sweeps only write to the caller's iterate.

use alloc::vec;
use alloc::vec::Vec;

use crate::factor::{IluFactors, IluParams};
use crate::schur::{SchurConfig, SchurSmoother};
use crate::trisolve::{self, TriSolveConfig, TriSolveMode};
use crate::vector::{is_finite, two_norm};
use crate::{CsrMatrix, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmootherKind {
    Jacobi,
    L1Jacobi,
    GaussSeidel,
    PolyGs,
    Ilu,
    SchurIlut,
}

/// How the `U` factor of an ILU smoother is scaled before solving.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scaling {
    None,
    Row,
    RowCol,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmootherConfig {
    pub kind: SmootherKind,
    pub sweeps: usize,
    /// Degree of the truncated Neumann series (polynomial Gauss-Seidel).
    pub poly_degree: usize,
    pub ilu: IluParams,
    pub trisolve: TriSolveConfig,
    pub scaling: Scaling,
    pub schur: SchurConfig,
}

impl Default for SmootherConfig {
    fn default() -> Self {
        SmootherConfig {
            kind: SmootherKind::GaussSeidel,
            sweeps: 2,
            poly_degree: 2,
            ilu: IluParams::ilu0(),
            trisolve: TriSolveConfig::default(),
            scaling: Scaling::Row,
            schur: SchurConfig::default(),
        }
    }
}

impl SmootherConfig {
    pub fn of_kind(kind: SmootherKind) -> Self {
        SmootherConfig {
            kind,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::InvalidParameter("smoother sweeps must be >= 1".into()));
        }
        match self.kind {
            SmootherKind::Ilu => {
                self.ilu.validate()?;
                self.trisolve.validate()?;
                if self.trisolve.mode == TriSolveMode::Richardson && self.scaling == Scaling::None {
                    return Err(Error::InvalidParameter(
                        "Richardson upper solves need a row or row/col scaled U".into(),
                    ));
                }
            }
            SmootherKind::SchurIlut => self.schur.validate()?,
            _ => {}
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum State {
    Jacobi { inv_diag: Vec<f64> },
    L1Jacobi { inv_d: Vec<f64> },
    GaussSeidel,
    PolyGs { inv_diag: Vec<f64>, lower: CsrMatrix, degree: usize },
    Ilu { factors: IluFactors, trisolve: TriSolveConfig },
    Schur(SchurSmoother),
}

/// Precomputed per-level smoother.
#[derive(Clone, Debug)]
pub struct Smoother {
    state: State,
    kind: SmootherKind,
    sweeps: usize,
    nrows: usize,
    nnz: usize,
}

fn nonzero_diagonal(a: &CsrMatrix) -> Result<Vec<f64>> {
    let d = a.diag()?;
    if let Some(i) = d.iter().position(|&v| v == 0.0) {
        return Err(Error::ZeroDiagonal { row: i });
    }
    Ok(d)
}

fn l1_diagonal(a: &CsrMatrix) -> Result<Vec<f64>> {
    (0..a.nrows())
        .map(|i| {
            let s: f64 = a.row(i).1.iter().map(|v| v.abs()).sum();
            if s == 0.0 {
                Err(Error::EmptyRow { row: i })
            } else {
                Ok(s)
            }
        })
        .collect()
}

/// Builds ILU factors and applies the requested scaling of `U`.
pub fn build_ilu(a: &CsrMatrix, params: &IluParams, scaling: Scaling) -> Result<IluFactors> {
    let f = IluFactors::compute(a, params)?;
    match scaling {
        Scaling::None => Ok(f),
        Scaling::Row => f.row_scale_u(),
        Scaling::RowCol => f.row_col_scale_u(),
    }
}

impl Smoother {
    pub fn build(a: &CsrMatrix, cfg: &SmootherConfig) -> Result<Self> {
        cfg.validate()?;
        if !a.is_square() {
            return Err(Error::NotSquare {
                op: "smoother",
                nrows: a.nrows(),
                ncols: a.ncols(),
            });
        }
        let state = match cfg.kind {
            SmootherKind::Jacobi => State::Jacobi {
                inv_diag: nonzero_diagonal(a)?.iter().map(|d| 1.0 / d).collect(),
            },
            SmootherKind::L1Jacobi => State::L1Jacobi {
                inv_d: l1_diagonal(a)?.iter().map(|d| 1.0 / d).collect(),
            },
            SmootherKind::GaussSeidel => {
                nonzero_diagonal(a)?;
                State::GaussSeidel
            }
            SmootherKind::PolyGs => State::PolyGs {
                inv_diag: nonzero_diagonal(a)?.iter().map(|d| 1.0 / d).collect(),
                lower: a.filter(|i, j, _| j < i),
                degree: cfg.poly_degree,
            },
            SmootherKind::Ilu => State::Ilu {
                factors: build_ilu(a, &cfg.ilu, cfg.scaling)?,
                trisolve: cfg.trisolve,
            },
            SmootherKind::SchurIlut => State::Schur(SchurSmoother::build(a, &cfg.schur)?),
        };
        Ok(Smoother {
            state,
            kind: cfg.kind,
            sweeps: cfg.sweeps,
            nrows: a.nrows(),
            nnz: a.nnz(),
        })
    }

    pub fn kind(&self) -> SmootherKind {
        self.kind
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// ILU factors when this is an ILU smoother.
    pub fn factors(&self) -> Option<&IluFactors> {
        match &self.state {
            State::Ilu { factors, .. } => Some(factors),
            _ => None,
        }
    }

    pub fn schur(&self) -> Option<&SchurSmoother> {
        match &self.state {
            State::Schur(s) => Some(s),
            _ => None,
        }
    }

    fn check(&self, a: &CsrMatrix, b: &[f64], x: &[f64]) -> Result<()> {
        if a.nrows() != self.nrows || a.nnz() != self.nnz {
            return Err(Error::StateMismatch {
                expected: self.nrows,
                expected_nnz: self.nnz,
            });
        }
        for (op, len) in [("smooth rhs", b.len()), ("smooth iterate", x.len())] {
            if len != self.nrows {
                return Err(Error::DimensionMismatch {
                    op,
                    expected: self.nrows,
                    found: len,
                });
            }
        }
        Ok(())
    }

    /// Applies the configured number of sweeps in place.
    pub fn relax(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64]) -> Result<()> {
        self.check(a, b, x)?;
        for _ in 0..self.sweeps {
            self.sweep_once(a, b, x)?;
        }
        if !is_finite(x) {
            return Err(Error::NonFiniteIterate { stage: "smoother" });
        }
        Ok(())
    }

    /// Like [`Smoother::relax`], returning `||b - A x||_2` after the sweeps.
    pub fn smooth(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64]) -> Result<f64> {
        self.relax(a, b, x)?;
        let rn = two_norm(&a.residual(b, x)?);
        log::trace!("{:?} smoother: residual {rn:e} after {} sweeps", self.kind, self.sweeps);
        Ok(rn)
    }

    fn sweep_once(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64]) -> Result<()> {
        match &self.state {
            State::Jacobi { inv_diag } => {
                diagonal_update(a, b, x, inv_diag);
                Ok(())
            }
            State::L1Jacobi { inv_d } => {
                diagonal_update(a, b, x, inv_d);
                Ok(())
            }
            State::GaussSeidel => gauss_seidel_in_place(a, b, x),
            State::PolyGs {
                inv_diag,
                lower,
                degree,
            } => {
                poly_gs_update(a, lower, inv_diag, *degree, b, x);
                Ok(())
            }
            State::Ilu { factors, trisolve } => ilu_update(a, factors, trisolve, b, x),
            State::Schur(s) => s.apply(a, b, x),
        }
    }
}

/// `x += D⁻¹ (b - A x)` for a precomputed inverse diagonal.
fn diagonal_update(a: &CsrMatrix, b: &[f64], x: &mut [f64], inv_d: &[f64]) {
    let mut r = vec![0.0; x.len()];
    a.residual_into(b, x, &mut r);
    for ((xi, ri), di) in x.iter_mut().zip(&r).zip(inv_d) {
        *xi += ri * di;
    }
}

fn gauss_seidel_in_place(a: &CsrMatrix, b: &[f64], x: &mut [f64]) -> Result<()> {
    for i in 0..a.nrows() {
        let mut s = b[i];
        let mut d = 0.0;
        for (j, v) in a.row_iter(i) {
            if j == i {
                d = v;
            } else {
                s -= v * x[j];
            }
        }
        if d == 0.0 {
            return Err(Error::ZeroDiagonal { row: i });
        }
        x[i] = s / d;
    }
    Ok(())
}

/// `x += sum_{j=0}^{p} (-D⁻¹L)^j D⁻¹ r`
fn poly_gs_update(a: &CsrMatrix, lower: &CsrMatrix, inv_diag: &[f64], p: usize, b: &[f64], x: &mut [f64]) {
    let n = x.len();
    let mut r = vec![0.0; n];
    a.residual_into(b, x, &mut r);
    let mut term: Vec<f64> = r.iter().zip(inv_diag).map(|(ri, di)| ri * di).collect();
    let mut sum = term.clone();
    let mut lt = vec![0.0; n];
    for _ in 0..p {
        lower.spmv_into(&term, &mut lt);
        for ((t, l), di) in term.iter_mut().zip(&lt).zip(inv_diag) {
            *t = -l * di;
        }
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
    }
    for (xi, si) in x.iter_mut().zip(&sum) {
        *xi += si;
    }
}

fn ilu_update(a: &CsrMatrix, f: &IluFactors, cfg: &TriSolveConfig, b: &[f64], x: &mut [f64]) -> Result<()> {
    let r = a.residual(b, x)?;
    let z = trisolve::apply_factors(f, cfg, &r)?;
    for (xi, zi) in x.iter_mut().zip(&z) {
        *xi += zi;
    }
    Ok(())
}

fn check_dims(a: &CsrMatrix, b: &[f64], x: &[f64]) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "sweep",
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    for len in [b.len(), x.len()] {
        if len != a.nrows() {
            return Err(Error::DimensionMismatch {
                op: "sweep",
                expected: a.nrows(),
                found: len,
            });
        }
    }
    Ok(())
}

/// One Jacobi sweep `x += D⁻¹ (b - A x)`.
pub fn jacobi_sweep(a: &CsrMatrix, b: &[f64], x: &mut [f64]) -> Result<()> {
    check_dims(a, b, x)?;
    let inv: Vec<f64> = nonzero_diagonal(a)?.iter().map(|d| 1.0 / d).collect();
    diagonal_update(a, b, x, &inv);
    Ok(())
}

/// One ℓ1-Jacobi sweep with `d_i = sum_j |a_ij|`.
pub fn l1_jacobi_sweep(a: &CsrMatrix, b: &[f64], x: &mut [f64]) -> Result<()> {
    check_dims(a, b, x)?;
    let inv: Vec<f64> = l1_diagonal(a)?.iter().map(|d| 1.0 / d).collect();
    diagonal_update(a, b, x, &inv);
    Ok(())
}

/// One forward Gauss-Seidel sweep `x' = (D + L)⁻¹ (b - U x)`.
pub fn gauss_seidel_sweep(a: &CsrMatrix, b: &[f64], x: &mut [f64]) -> Result<()> {
    check_dims(a, b, x)?;
    gauss_seidel_in_place(a, b, x)
}

/// One polynomial Gauss-Seidel sweep: the inverse of `D + L` is replaced by
/// its Neumann series truncated after degree `p`.
pub fn poly_gs_sweep(a: &CsrMatrix, b: &[f64], x: &mut [f64], p: usize) -> Result<()> {
    check_dims(a, b, x)?;
    let inv: Vec<f64> = nonzero_diagonal(a)?.iter().map(|d| 1.0 / d).collect();
    let lower = a.filter(|i, j, _| j < i);
    poly_gs_update(a, &lower, &inv, p, b, x);
    Ok(())
}

/// One ILU smoothing sweep: `x += U⁻¹ L⁻¹ (b - A x)` with the triangular
/// solves performed as configured.
pub fn ilu_smooth_sweep(
    a: &CsrMatrix,
    factors: &IluFactors,
    cfg: &TriSolveConfig,
    b: &[f64],
    x: &mut [f64],
) -> Result<()> {
    check_dims(a, b, x)?;
    ilu_update(a, factors, cfg, b, x)
}
