use std::path::Path;
use std::process::{Command, Output};

use scilu_cli::config::SolverConfig;
use scilu_cli::mm;
use scilu_core::gallery::Problem;

fn scilu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scilu"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Parses a CSV whose cells hold no quotes; returns header and rows.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (h, rows) = table(text);
    let k = h.iter().position(|c| c == name).unwrap();
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn gen_writes_readable_matrix_market() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("p.mtx");
    let o = scilu(&["gen", "poisson2d:2,2", p(&f)]);
    assert_eq!(code(&o), 0);
    let a = mm::read_path(&f).unwrap();
    assert_eq!(a, Problem::Poisson2d { nx: 2, ny: 2 }.matrix().unwrap());
    assert_eq!(&a.to_dense()[..4], &[4.0, -1.0, -1.0, 0.0]);
}

#[test]
fn analyze_identity_file_has_zero_departures() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("eye.mtx");
    std::fs::write(&f, "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 1\n2 2 1\n3 3 1\n").unwrap();
    let o = scilu(&["analyze", p(&f)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    for c in ["depL", "depU", "depUrow", "depUrowcol"] {
        assert_eq!(column(&out, c), vec![0.0], "{c}");
    }
}

#[test]
fn analyze_accepts_several_matrices_and_ilut() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("a.mtx");
    assert_eq!(code(&scilu(&["gen", "poisson1d:12", p(&f)])), 0);
    let o = scilu(&[
        "analyze", p(&f), "poisson2d:6,6", "--set", "ilu.variant=ilut", "--set", "ilu.droptol=1e-2",
        "--set", "ilu.lfill=3",
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 3);
    assert!(out.lines().nth(2).unwrap().starts_with("\"poisson2d:6,6\",ilut,"));
}

#[test]
fn zero_pivot_is_a_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("z.mtx");
    std::fs::write(&f, "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 0\n1 2 1\n2 1 1\n2 2 1\n").unwrap();
    let o = scilu(&["analyze", p(&f)]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn invalid_input_exit_code() {
    assert_eq!(code(&scilu(&["analyze", "/nonexistent/x.mtx"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("nodiag.mtx");
    std::fs::write(&f, "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1\n2 1 1\n").unwrap();
    assert_eq!(code(&scilu(&["analyze", p(&f)])), 2, "structurally missing diagonal");
    assert_eq!(code(&scilu(&["solve", "--matrix", "poisson2d:4,4", "--set", "amg.thta=1"])), 2);
    assert_eq!(code(&scilu(&["solve", "--matrix", "poisson2d:4,4", "--set", "amg.theta=2"])), 2);
    assert_eq!(code(&scilu(&["solve"])), 2);
    assert_eq!(code(&scilu(&["frobnicate"])), 2);
    assert_eq!(code(&scilu(&["gen", "poisson9d:3", "/tmp/never.mtx"])), 2);
}

#[test]
fn unconverged_solve_reports_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.csv");
    let o = scilu(&[
        "solve", "--matrix", "poisson2d:16,16", "--set", "krylov.max_iters=1", "--tol", "1e-14",
        "--history", p(&h),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("converged          false"));
    assert_eq!(column(&std::fs::read_to_string(&h).unwrap(), "iter"), vec![0.0, 1.0]);
}

#[test]
fn solve_poisson64_gauss_seidel_and_ilu() {
    let run = |extra: &[&str]| {
        let mut args = vec!["solve", "--matrix", "poisson2d:64,64", "--tol", "1e-8", "--json"];
        args.extend_from_slice(extra);
        let o = scilu(&args);
        assert_eq!(code(&o), 0);
        serde_json::from_str::<serde_json::Value>(&stdout(&o)).unwrap()
    };
    let gs = run(&[]);
    let ilu = run(&["--set", "hybrid.fine_levels=1", "--set", "trisolve.mL=20", "--set", "trisolve.mU=20"]);
    let it = |v: &serde_json::Value| v["iterations"].as_u64().unwrap();
    assert!(it(&gs) <= 20, "{}", it(&gs));
    assert!(it(&ilu) <= it(&gs), "{} vs {}", it(&ilu), it(&gs));
    for v in [&gs, &ilu] {
        assert!(v["error_vs_ones"].as_f64().unwrap() < 1e-6);
        assert_eq!(v["false_convergence"], false);
    }
    assert_eq!(ilu["levels"][0]["smoother"], "ilu");
    assert_eq!(ilu["levels"][1]["smoother"], "gauss_seidel");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "matrix = poisson2d:12,12\nkrylov.tol = 1e-3\nsmoother.kind = jacobi\n").unwrap();
    let o = scilu(&["solve", "--config", p(&cfg), "--json", "--tol", "1e-9", "--set", "smoother.kind=poly_gs"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["true_rel"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["levels"][0]["smoother"], "poly_gs");
}

#[test]
fn defaults_reference_round_trips() {
    let o = scilu(&["defaults"]);
    assert_eq!(code(&o), 0);
    assert_eq!(SolverConfig::parse_str(&stdout(&o)).unwrap(), SolverConfig::default());
}

#[test]
fn history_csv_is_deterministic_and_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let (h1, h2) = (dir.path().join("1.csv"), dir.path().join("2.csv"));
    for h in [&h1, &h2] {
        let o = scilu(&[
            "solve", "--matrix", "anisotropic2d:20,20,0.05", "--tol", "1e-10", "--set", "rhs=random:4",
            "--set", "amg.coarsening=pmis", "--history", p(h),
        ]);
        assert_eq!(code(&o), 0);
    }
    let a = std::fs::read(&h1).unwrap();
    assert_eq!(a, std::fs::read(&h2).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "iter,arnoldi_rel,true_rel,nrbe");
    let (t, n) = (column(&text, "true_rel"), column(&text, "nrbe"));
    assert!(t.iter().zip(&n).all(|(t, n)| n <= t));
}

#[test]
fn bench_trisolve_curves() {
    let run = |m: &str, extra: &[&str]| {
        let mut args = vec!["bench-trisolve", m, "--m-max", "30"];
        args.extend_from_slice(extra);
        let o = scilu(&args);
        assert_eq!(code(&o), 0);
        stdout(&o)
    };
    let out = run("poisson2d:32,32", &[]);
    assert_eq!(out, run("poisson2d:32,32", &[]), "byte-identical reruns");
    let e = column(&out, "err_direct_rel");
    assert_eq!(e.len(), 30);
    assert!(e[29] <= e[0]);
    for w in e.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12));
    }
    // measured envelope on this grid
    assert!(e[19] < 5e-5, "m=20: {}", e[19]);
    assert!(e[29] < 1e-7, "m=30: {}", e[29]);

    let diag = tempfile::tempdir().unwrap();
    let f = diag.path().join("d.mtx");
    std::fs::write(&f, "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 4\n2 2 -2\n3 3 0.5\n").unwrap();
    let d = run(p(&f), &["--set", "smoother.scaling=row_col"]);
    assert_eq!(column(&d, "err_direct_rel")[0], 0.0);
}

#[test]
fn schur_solve_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = scilu(&[
        "schur-solve", "--matrix", "poisson2d:16,16", "--blocks", "1,2,4", "--set", "krylov.tol=1e-8", "-o",
        p(&out),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "p,interface_size,iterations,converged,relres");
    assert_eq!(column(&text, "p"), vec![1.0, 2.0, 4.0]);
    let iface = column(&text, "interface_size");
    assert_eq!(iface[0], 0.0);
    assert!(iface[1] > 0.0);
}
