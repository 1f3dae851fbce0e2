use scilu_core::amg::{setup, AmgParams, AmgPreconditioner, Coarsening, Interpolation, SmootherPlan};
use scilu_core::factor::IluParams;
use scilu_core::gallery::Problem;
use scilu_core::krylov::{fgmres, gmres, KrylovParams, StoppingCriterion};
use scilu_core::smoother::{Scaling, SmootherConfig, SmootherKind};
use scilu_core::trisolve::TriSolveConfig;
use scilu_core::CsrMatrix;

fn poisson(nx: usize) -> CsrMatrix {
    Problem::Poisson2d { nx, ny: nx }.matrix().unwrap()
}

fn solve_with(a: &CsrMatrix, params: &AmgParams, tol: f64) -> (Vec<f64>, scilu_core::krylov::SolveReport) {
    let n = a.nrows();
    let b = a.spmv(&vec![1.0; n]).unwrap();
    let h = setup(a, params).unwrap();
    let kp = KrylovParams {
        tol,
        record_history: true,
        ..Default::default()
    };
    fgmres(a, &b, &vec![0.0; n], &mut AmgPreconditioner::new(h), &kp).unwrap()
}

#[test]
fn every_smoother_kind_gives_a_convergent_preconditioner() {
    let a = poisson(24);
    let mut schur = SmootherConfig::of_kind(SmootherKind::SchurIlut);
    schur.schur.blocks = 4;
    let mut ilut = SmootherConfig::of_kind(SmootherKind::Ilu);
    ilut.ilu = IluParams::ilut(1e-3, 10);
    ilut.scaling = Scaling::RowCol;
    for cfg in [
        SmootherConfig::of_kind(SmootherKind::Jacobi),
        SmootherConfig::of_kind(SmootherKind::L1Jacobi),
        SmootherConfig::of_kind(SmootherKind::GaussSeidel),
        SmootherConfig::of_kind(SmootherKind::PolyGs),
        SmootherConfig::of_kind(SmootherKind::Ilu),
        ilut,
        schur,
    ] {
        let params = AmgParams {
            smoother_plan: SmootherPlan::uniform(cfg),
            ..Default::default()
        };
        let (x, rep) = solve_with(&a, &params, 1e-8);
        assert!(rep.converged, "{:?}", cfg.kind);
        assert!(rep.iterations <= 40, "{:?}: {}", cfg.kind, rep.iterations);
        assert!(!rep.false_convergence);
        let err = x.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{:?}: {err}", cfg.kind);
    }
}

#[test]
fn pmis_mm_ext_hierarchy_solves_anisotropic_problem() {
    let a = Problem::Anisotropic2d { nx: 32, ny: 32, eps: 0.01 }.matrix().unwrap();
    let params = AmgParams {
        coarsening: Coarsening::Pmis,
        interpolation: Interpolation::MmExt,
        ..Default::default()
    };
    let (_, rep) = solve_with(&a, &params, 1e-8);
    assert!(rep.converged);
    assert!(rep.iterations <= 30, "{}", rep.iterations);
}

#[test]
fn hybrid_ilu_plan_is_no_worse_than_gauss_seidel() {
    let a = poisson(40);
    let mut ilu = SmootherConfig::of_kind(SmootherKind::Ilu);
    ilu.trisolve = TriSolveConfig::richardson(20, 20);
    let gs = AmgParams::default();
    let hybrid = AmgParams {
        smoother_plan: SmootherPlan::hybrid(ilu, 1, SmootherConfig::of_kind(SmootherKind::PolyGs)),
        ..Default::default()
    };
    let (_, r_gs) = solve_with(&a, &gs, 1e-8);
    let (_, r_hy) = solve_with(&a, &hybrid, 1e-8);
    assert!(r_hy.iterations <= r_gs.iterations + 1);
}

#[test]
fn gmres_and_fgmres_agree_with_amg() {
    let a = poisson(20);
    let n = a.nrows();
    let b = a.spmv(&vec![1.0; n]).unwrap();
    let kp = KrylovParams {
        tol: 1e-10,
        record_history: true,
        ..Default::default()
    };
    let h = setup(&a, &AmgParams::default()).unwrap();
    let (x1, r1) = gmres(&a, &b, &vec![0.0; n], &mut AmgPreconditioner::new(h.clone()), &kp).unwrap();
    let (x2, r2) = fgmres(&a, &b, &vec![0.0; n], &mut AmgPreconditioner::new(h), &kp).unwrap();
    assert_eq!(r1.iterations, r2.iterations);
    for (h1, h2) in r1.history.iter().zip(&r2.history) {
        assert!((h1.true_rel - h2.true_rel).abs() < 1e-12);
    }
    let d = x1.iter().zip(&x2).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    assert!(d < 1e-10);
}

#[test]
fn nrbe_criterion_with_amg() {
    let a = poisson(32);
    let n = a.nrows();
    let b = a.spmv(&vec![1.0; n]).unwrap();
    let h = setup(&a, &AmgParams::default()).unwrap();
    let kp = KrylovParams {
        tol: 1e-10,
        criterion: StoppingCriterion::Nrbe,
        record_history: true,
        ..Default::default()
    };
    let (_, rep) = fgmres(&a, &b, &vec![0.0; n], &mut AmgPreconditioner::new(h), &kp).unwrap();
    assert!(rep.converged);
    assert!(rep.history.last().unwrap().nrbe < 1e-10);
    for e in &rep.history {
        assert!(e.nrbe <= e.true_rel);
    }
}
