//! Sparse solver kernels for algebraic multigrid with incomplete-LU smoothing.
//!
//! The triangular solves inside the ILU smoother can be replaced by a fixed
//! number of Richardson sweeps (a truncated Neumann series). Scaling the `U`
//! factor to unit diagonal first keeps its departure from normality small
//! enough for that truncation to work.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command-line driver live in the companion `scilu-cli` crate.
//!
//! Layout:
//! - [`sparse`]: CSR matrices and kernels (SpMV, SpGEMM, transpose, norms).
//! - [`factor`]: ILU(0)/ILUT, row and row/column scaling, non-normality diagnostics.
//! - [`trisolve`]: direct and Richardson triangular solves.
//! - [`smoother`]: relaxation schemes used on each multigrid level.
//! - [`amg`]: strength, coarsening, interpolation, hierarchy setup and the V-cycle.
//! - [`schur`]: simulated block-parallel ILUT Schur-complement smoother.
//! - [`krylov`]: right-preconditioned GMRES and flexible GMRES.
//! - [`gallery`]: model problems (1D/2D Poisson, anisotropic diffusion).

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod amg;
pub mod dense;
mod error;
pub mod factor;
pub mod gallery;
pub mod krylov;
pub mod schur;
pub mod smoother;
pub mod sparse;
pub mod trisolve;
pub mod vector;

pub use error::{Error, Result};
pub use sparse::{CsrMatrix, TriangularShape};

#[cfg(test)]
pub(crate) mod testutil;
