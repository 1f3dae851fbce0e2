//! Per-cycle flop accounting.
//!
//! A smoothed level costs `nnz(A_l) * c_l` flops per V-cycle. `c_l` is 80 for
//! ILU smoothing with twenty Richardson sweeps per triangular solve and 8 for
//! degree-two polynomial Gauss-Seidel. The coarsest level is a dense solve,
//! counted separately as `m_c^3`.

use crate::smoother::SmootherKind;

/// Flops per stored nonzero and V-cycle for one level.
pub fn cost_factor(kind: SmootherKind) -> u64 {
    match kind {
        SmootherKind::Ilu | SmootherKind::SchurIlut => 80,
        SmootherKind::PolyGs => 8,
        SmootherKind::Jacobi | SmootherKind::L1Jacobi | SmootherKind::GaussSeidel => 4,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelCost {
    pub nnz: usize,
    pub kind: SmootherKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlopsEstimate {
    /// `sum_l nnz(A_l) c_l` over the smoothed levels.
    pub vcycle: u64,
    /// `m_c^3` for the dense coarsest solve.
    pub coarse_solve: u64,
    /// `2 nnz(A_0)`, one Krylov SpMV.
    pub krylov_spmv: u64,
}

/// Smoothing flops of the given (non-coarsest) levels.
pub fn smoothing_flops(levels: &[LevelCost]) -> u64 {
    levels.iter().map(|l| l.nnz as u64 * cost_factor(l.kind)).sum()
}

/// Full estimate from the smoothed levels, the coarsest dimension and the
/// fine-level nonzero count.
pub fn flops_model(levels: &[LevelCost], coarse_rows: usize, fine_nnz: usize) -> FlopsEstimate {
    let m = coarse_rows as u64;
    FlopsEstimate {
        vcycle: smoothing_flops(levels),
        coarse_solve: m * m * m,
        krylov_spmv: 2 * fine_nnz as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_level_counts() {
        let ilu = [LevelCost { nnz: 291_068, kind: SmootherKind::Ilu }];
        let poly = [LevelCost { nnz: 291_068, kind: SmootherKind::PolyGs }];
        assert_eq!(smoothing_flops(&ilu), 23_285_440);
        assert_eq!(smoothing_flops(&poly), 2_328_544);
        let est = flops_model(&ilu, 5, 291_068);
        assert_eq!(est.krylov_spmv, 582_136);
        assert_eq!(est.coarse_solve, 125);
    }

    #[test]
    fn hybrid_plan_sums_levels() {
        let levels = [
            LevelCost { nnz: 291_068, kind: SmootherKind::Ilu },
            LevelCost { nnz: 7_398, kind: SmootherKind::PolyGs },
            LevelCost { nnz: 694, kind: SmootherKind::PolyGs },
        ];
        assert_eq!(smoothing_flops(&levels), 23_285_440 + 8 * (7_398 + 694));
    }
}
