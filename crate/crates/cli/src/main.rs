use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use scilu_cli::commands::{analyze, bench_trisolve, gen, schur_solve, solve};
use scilu_cli::config::{self, SolverConfig};
use scilu_cli::{load_matrix, CliError, ExitCode};
use scilu_core::factor::DEFAULT_STRIPING_THRESHOLD;

#[derive(Parser)]
#[command(name = "scilu", version, about = "AMG with iterative-triangular-solve ILU smoothers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// Config file of `key = value` lines.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set amg.theta=0.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn load(&self, extra: &[(&str, Option<String>)]) -> Result<SolverConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => SolverConfig::from_path(&p.display().to_string())?,
            None => SolverConfig::default(),
        };
        for (k, v) in extra {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        cfg.apply_overrides(&self.set)?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Departure from normality, condition estimates and striping of ILU factors.
    Analyze {
        /// Matrix Market files or generator specs.
        #[arg(required = true)]
        matrices: Vec<String>,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Flag columns whose largest entry exceeds this multiple of the median.
        #[arg(long, default_value_t = DEFAULT_STRIPING_THRESHOLD)]
        striping_threshold: f64,
        /// CSV destination (stdout when absent).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Solve A x = b with AMG-preconditioned (F)GMRES.
    Solve {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Matrix (overrides `matrix`).
        #[arg(long)]
        matrix: Option<String>,
        /// Stopping tolerance (overrides `krylov.tol`).
        #[arg(long)]
        tol: Option<String>,
        /// Smoother kind (overrides `smoother.kind`).
        #[arg(long)]
        smoother: Option<String>,
        /// Where to write the per-iteration history CSV.
        #[arg(long)]
        history: Option<PathBuf>,
        /// Print the summary as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Error of Richardson triangular solves against exact solves.
    BenchTrisolve {
        matrix: String,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Largest sweep count.
        #[arg(long, default_value_t = 30)]
        m_max: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Iteration counts of the Schur smoother over a list of block counts.
    SchurSolve {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        matrix: Option<String>,
        /// Comma-separated block counts.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        blocks: Vec<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Print a JSON summary after the table.
        #[arg(long)]
        json: bool,
    },
    /// Write a model problem as Matrix Market.
    Gen {
        /// poisson1d:N, poisson2d:NX,NY or anisotropic2d:NX,NY,EPS
        spec: String,
        out: PathBuf,
    },
    /// Print every config key with its default.
    Defaults,
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p.display().to_string(), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn matrix_of(cfg: &SolverConfig) -> Result<String, CliError> {
    cfg.matrix
        .clone()
        .ok_or_else(|| CliError::Usage("no matrix given (set `matrix` or pass --matrix)".into()))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Analyze {
            matrices,
            cfg,
            striping_threshold,
            output,
        } => {
            let c = cfg.load(&[])?;
            c.ilu_params().validate()?;
            let rows = matrices
                .iter()
                .map(|m| analyze::analyze(m, &load_matrix(m)?, &c.ilu_params(), striping_threshold))
                .collect::<Result<Vec<_>, _>>()?;
            emit(&analyze::to_csv(&rows), output.as_deref())?;
            Ok(ExitCode::Ok)
        }
        Command::Solve {
            cfg,
            matrix,
            tol,
            smoother,
            history,
            json,
        } => {
            let c = cfg.load(&[("matrix", matrix), ("krylov.tol", tol), ("smoother.kind", smoother)])?;
            let a = load_matrix(&matrix_of(&c)?)?;
            let o = solve::solve(&a, &c)?;
            if let Some(h) = &history {
                emit(&solve::history_csv(&o.report), Some(h))?;
            }
            if json {
                emit(&format!("{:#}\n", solve::summary_json(&o)), None)?;
            } else {
                emit(&solve::summary_text(&o), None)?;
            }
            Ok(if o.report.converged { ExitCode::Ok } else { ExitCode::CriterionFailed })
        }
        Command::BenchTrisolve {
            matrix,
            cfg,
            m_max,
            output,
        } => {
            let c = cfg.load(&[])?;
            let a = load_matrix(&matrix)?;
            let rows = bench_trisolve::bench_trisolve(&a, &c.ilu_params(), c.smoother.scaling, m_max)?;
            emit(&bench_trisolve::to_csv(&rows), output.as_deref())?;
            Ok(ExitCode::Ok)
        }
        Command::SchurSolve {
            cfg,
            matrix,
            blocks,
            output,
            json,
        } => {
            let c = cfg.load(&[("matrix", matrix)])?;
            if blocks.contains(&0) {
                return Err(CliError::Usage("block counts must be >= 1".into()));
            }
            let a = load_matrix(&matrix_of(&c)?)?;
            let rows = schur_solve::schur_solve(&a, &c, &blocks)?;
            emit(&schur_solve::to_csv(&rows), output.as_deref())?;
            if json {
                let v = serde_json::json!({
                    "blocks": rows.iter().map(|r| r.blocks).collect::<Vec<_>>(),
                    "interface_size": rows.iter().map(|r| r.interface_size).collect::<Vec<_>>(),
                    "iterations": rows.iter().map(|r| r.iterations).collect::<Vec<_>>(),
                    "iteration_spread": schur_solve::iteration_spread(&rows),
                    "all_converged": rows.iter().all(|r| r.converged),
                });
                emit(&format!("{v:#}\n"), None)?;
            }
            Ok(if rows.iter().all(|r| r.converged) {
                ExitCode::Ok
            } else {
                ExitCode::CriterionFailed
            })
        }
        Command::Gen { spec, out } => {
            gen::gen(&spec, &out)?;
            Ok(ExitCode::Ok)
        }
        Command::Defaults => {
            emit(&config::reference(), None)?;
            Ok(ExitCode::Ok)
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::InvalidInput as i32 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code as i32);
}
