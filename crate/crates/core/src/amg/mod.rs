//! Algebraic multigrid: setup and the multilevel cycle.
//!
//! Setup repeats strength, C/F splitting, interpolation and the Galerkin
//! product `A_{k+1} = P_kᵀ A_k P_k` until the level is small enough, then
//! factors the coarsest matrix densely. Each non-coarsest level gets its
//! pre- and post-smoother from a [`SmootherPlan`].

mod coarsen;
mod flops;
mod interp;
mod strength;

pub use coarsen::{coarsen_pmis, coarsen_rs_greedy, repair, CfSplit, PointType};
pub use flops::{cost_factor, flops_model, smoothing_flops, FlopsEstimate, LevelCost};
pub use interp::{interp_direct, interp_mm_ext};
pub use strength::strength;

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseLu;
use crate::krylov::Preconditioner;
use crate::smoother::{Smoother, SmootherConfig, SmootherKind};
use crate::{CsrMatrix, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coarsening {
    RsGreedy,
    Pmis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    Direct,
    MmExt,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSmoothers {
    pub pre: SmootherConfig,
    pub post: SmootherConfig,
}

impl LevelSmoothers {
    pub fn same(cfg: SmootherConfig) -> Self {
        LevelSmoothers { pre: cfg, post: cfg }
    }
}

/// `fine` on the first `fine_levels` levels, `rest` below.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmootherPlan {
    pub fine: LevelSmoothers,
    pub fine_levels: usize,
    pub rest: LevelSmoothers,
}

impl SmootherPlan {
    pub fn uniform(cfg: SmootherConfig) -> Self {
        SmootherPlan {
            fine: LevelSmoothers::same(cfg),
            fine_levels: 0,
            rest: LevelSmoothers::same(cfg),
        }
    }

    pub fn hybrid(fine: SmootherConfig, fine_levels: usize, rest: SmootherConfig) -> Self {
        SmootherPlan {
            fine: LevelSmoothers::same(fine),
            fine_levels,
            rest: LevelSmoothers::same(rest),
        }
    }

    pub fn for_level(&self, level: usize) -> &LevelSmoothers {
        if level < self.fine_levels {
            &self.fine
        } else {
            &self.rest
        }
    }
}

impl Default for SmootherPlan {
    fn default() -> Self {
        SmootherPlan::uniform(SmootherConfig::default())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmgParams {
    pub theta: f64,
    pub max_levels: usize,
    pub coarse_size: usize,
    pub coarsening: Coarsening,
    pub interpolation: Interpolation,
    /// Recursive calls per level: 1 for a V-cycle, 2 for a W-cycle.
    pub cycles_nu: usize,
    pub smoother_plan: SmootherPlan,
    pub pmis_seed: u64,
}

impl Default for AmgParams {
    fn default() -> Self {
        AmgParams {
            theta: 0.25,
            max_levels: 25,
            coarse_size: 50,
            coarsening: Coarsening::RsGreedy,
            interpolation: Interpolation::Direct,
            cycles_nu: 1,
            smoother_plan: SmootherPlan::default(),
            pmis_seed: 1,
        }
    }
}

impl AmgParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "theta must lie in (0, 1], got {}",
                self.theta
            )));
        }
        if self.coarse_size == 0 || self.cycles_nu == 0 || self.max_levels == 0 {
            return Err(Error::InvalidParameter(
                "coarse_size, cycles_nu and max_levels must be >= 1".into(),
            ));
        }
        self.smoother_plan.fine.pre.validate()?;
        self.smoother_plan.fine.post.validate()?;
        self.smoother_plan.rest.pre.validate()?;
        self.smoother_plan.rest.post.validate()
    }
}

/// One non-coarsest level.
#[derive(Clone, Debug)]
pub struct Level {
    pub a: CsrMatrix,
    pub p: CsrMatrix,
    pub r: CsrMatrix,
    pub split: CfSplit,
    pub pre: Smoother,
    pub post: Smoother,
}

#[derive(Clone, Debug)]
pub struct Hierarchy {
    levels: Vec<Level>,
    coarse: CsrMatrix,
    coarse_lu: DenseLu,
    nu: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSummary {
    pub rows: usize,
    pub nnz: usize,
    pub smoother: Option<SmootherKind>,
}

/// Shrinking by less than this fraction stops coarsening.
const STALL_FRACTION: f64 = 0.95;

pub fn setup(a: &CsrMatrix, params: &AmgParams) -> Result<Hierarchy> {
    params.validate()?;
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "amg setup",
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    let mut levels = Vec::new();
    let mut current = a.clone();
    while current.nrows() > params.coarse_size && levels.len() + 1 < params.max_levels {
        let s = strength(&current, params.theta)?;
        let split = match params.coarsening {
            Coarsening::RsGreedy => coarsen_rs_greedy(&s),
            Coarsening::Pmis => coarsen_pmis(&s, params.pmis_seed.wrapping_add(levels.len() as u64)),
        };
        let m = current.nrows();
        let mc = split.n_coarse();
        if mc == 0 || mc as f64 > STALL_FRACTION * m as f64 {
            log::info!("coarsening stalled at level {} ({m} -> {mc} rows)", levels.len());
            break;
        }
        let p = match params.interpolation {
            Interpolation::Direct => interp_direct(&current, &split, &s)?,
            Interpolation::MmExt => interp_mm_ext(&current, &split, &s)?,
        };
        let r = p.transpose();
        let coarse = r.matmul(&current)?.matmul(&p)?;
        let cfg = params.smoother_plan.for_level(levels.len());
        let pre = Smoother::build(&current, &cfg.pre)?;
        let post = Smoother::build(&current, &cfg.post)?;
        log::debug!("level {}: {m} rows, {} nnz -> {mc} rows", levels.len(), current.nnz());
        levels.push(Level {
            a: current,
            p,
            r,
            split,
            pre,
            post,
        });
        current = coarse;
    }
    if current.nrows() > 2000 {
        log::warn!("dense coarsest solve on {} rows", current.nrows());
    }
    let coarse_lu = DenseLu::factor(&current)?;
    Ok(Hierarchy {
        levels,
        coarse: current,
        coarse_lu,
        nu: params.cycles_nu,
    })
}

impl Hierarchy {
    pub fn num_levels(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn coarse_matrix(&self) -> &CsrMatrix {
        &self.coarse
    }

    /// Matrix of level `k` (the coarsest is `num_levels() - 1`).
    pub fn matrix(&self, k: usize) -> &CsrMatrix {
        self.levels.get(k).map(|l| &l.a).unwrap_or(&self.coarse)
    }

    pub fn dim(&self) -> usize {
        self.matrix(0).nrows()
    }

    pub fn summary(&self) -> Vec<LevelSummary> {
        let mut out: Vec<LevelSummary> = self
            .levels
            .iter()
            .map(|l| LevelSummary {
                rows: l.a.nrows(),
                nnz: l.a.nnz(),
                smoother: Some(l.pre.kind()),
            })
            .collect();
        out.push(LevelSummary {
            rows: self.coarse.nrows(),
            nnz: self.coarse.nnz(),
            smoother: None,
        });
        out
    }

    /// `sum_l nnz(A_l) / nnz(A_0)`.
    pub fn operator_complexity(&self) -> f64 {
        let total: usize = self.summary().iter().map(|l| l.nnz).sum();
        total as f64 / self.matrix(0).nnz().max(1) as f64
    }

    pub fn flops(&self) -> FlopsEstimate {
        let costs: Vec<LevelCost> = self
            .levels
            .iter()
            .map(|l| LevelCost {
                nnz: l.a.nnz(),
                kind: l.pre.kind(),
            })
            .collect();
        flops_model(&costs, self.coarse.nrows(), self.matrix(0).nnz())
    }

    /// One multigrid cycle on `A_0 x = b`, updating `x` in place.
    pub fn vcycle(&self, b: &[f64], x: &mut [f64]) -> Result<()> {
        if b.len() != self.dim() || x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                op: "vcycle",
                expected: self.dim(),
                found: if b.len() != self.dim() { b.len() } else { x.len() },
            });
        }
        self.multilevel(0, b, x)
    }

    fn multilevel(&self, k: usize, b: &[f64], x: &mut [f64]) -> Result<()> {
        let Some(level) = self.levels.get(k) else {
            x.copy_from_slice(&self.coarse_lu.solve(b));
            return Ok(());
        };
        level.pre.relax(&level.a, b, x)?;
        let r = level.a.residual(b, x)?;
        let rc = level.r.spmv(&r)?;
        let mut v = vec![0.0; rc.len()];
        for _ in 0..self.nu {
            self.multilevel(k + 1, &rc, &mut v)?;
        }
        let pv = level.p.spmv(&v)?;
        for (xi, d) in x.iter_mut().zip(&pv) {
            *xi += d;
        }
        level.post.relax(&level.a, b, x)
    }
}

/// One cycle from a zero initial guess as a Krylov preconditioner.
#[derive(Clone, Debug)]
pub struct AmgPreconditioner {
    pub hierarchy: Hierarchy,
}

impl AmgPreconditioner {
    pub fn new(hierarchy: Hierarchy) -> Self {
        AmgPreconditioner { hierarchy }
    }
}

impl Preconditioner for AmgPreconditioner {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.fill(0.0);
        self.hierarchy.vcycle(r, z)
    }
}
