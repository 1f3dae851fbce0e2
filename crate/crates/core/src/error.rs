use alloc::boxed::Box;
use alloc::string::String;

use crate::krylov::SolveReport;
use crate::sparse::TriangularShape;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{op} requires a square matrix, got {nrows}x{ncols}")]
    NotSquare {
        op: &'static str,
        nrows: usize,
        ncols: usize,
    },

    #[error("invalid CSR structure: {0}")]
    InvalidStructure(String),

    #[error("matrix is not {shape:?}: entry ({row}, {col}) violates the shape")]
    ShapeViolation {
        shape: TriangularShape,
        row: usize,
        col: usize,
    },

    #[error("diagonal entry of row {row} is structurally absent")]
    MissingDiagonal { row: usize },

    #[error("zero pivot at row {row}")]
    ZeroPivot { row: usize },

    #[error("zero diagonal entry at row {row}")]
    ZeroDiagonal { row: usize },

    #[error("row {row} has no nonzero entries")]
    EmptyRow { row: usize },

    #[error("{stage} produced a non-finite iterate")]
    NonFiniteIterate { stage: &'static str },

    #[error("factors carry no row scaling; scale U before an iterative upper solve")]
    MissingScaling,

    #[error("factors are already scaled")]
    AlreadyScaled,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fine point {row} has no strong coarse neighbour")]
    NoCoarseNeighbour { row: usize },

    #[error("coarsest-level matrix is singular")]
    SingularCoarse,

    #[error("smoother state was built for a {expected}-row matrix with {expected_nnz} entries")]
    StateMismatch { expected: usize, expected_nnz: usize },

    #[error("non-finite value in Krylov iterate at iteration {}", .0.iterations)]
    NonFinite(Box<SolveReport>),
}
