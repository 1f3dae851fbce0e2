//! Flat `key = value` solver configuration.
//!
//! One setting per line, `#` starts a comment, keys are dotted paths such as
//! `amg.theta`. Unknown or repeated keys are errors. Every key, its default
//! and a one-line description are listed by [`reference`].

use std::fmt::Display;
use std::str::FromStr;

use scilu_core::amg::{AmgParams, Coarsening, Interpolation, SmootherPlan};
use scilu_core::factor::{IluParams, IluVariant, PivotPatch};
use scilu_core::krylov::{KrylovMethod, KrylovParams, StoppingCriterion};
use scilu_core::smoother::{Scaling, SmootherConfig, SmootherKind};
use scilu_core::trisolve::TriSolveMode;

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Rhs {
    /// `b = A 1`, so the exact solution is the ones vector.
    OnesTimesA,
    Random(u64),
    File(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub matrix: Option<String>,
    pub rhs: Rhs,
    pub amg: AmgParams,
    /// Smoother on every level not covered by the hybrid setting.
    pub smoother: SmootherConfig,
    /// Number of finest levels that use `hybrid_kind` instead.
    pub hybrid_levels: usize,
    pub hybrid_kind: SmootherKind,
    pub krylov: KrylovParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            matrix: None,
            rhs: Rhs::OnesTimesA,
            amg: AmgParams::default(),
            smoother: SmootherConfig::default(),
            hybrid_levels: 0,
            hybrid_kind: SmootherKind::Ilu,
            krylov: KrylovParams {
                record_history: true,
                ..KrylovParams::default()
            },
        }
    }
}

const KEYS: &[(&str, &str)] = &[
    ("matrix", "generator spec (poisson2d:NX,NY, ...) or Matrix Market path"),
    ("rhs", "ones-times-A | random:SEED | file:PATH"),
    ("krylov.method", "gmres | fgmres"),
    ("krylov.restart", "Krylov basis size before restart"),
    ("krylov.max_iters", "iteration cap"),
    ("krylov.tol", "stopping tolerance"),
    ("krylov.criterion", "relres | nrbe"),
    ("krylov.record_history", "record true residual and NRBE per iterate"),
    ("krylov.anorm_seed", "seed of the ||A||_2 power iteration"),
    ("amg.theta", "strength threshold in (0, 1]"),
    ("amg.max_levels", "maximum number of levels"),
    ("amg.coarse_size", "levels at or below this size are solved directly"),
    ("amg.coarsening", "rs_greedy | pmis"),
    ("amg.interpolation", "direct | mm_ext"),
    ("amg.cycles_nu", "recursive calls per level (1 = V-cycle)"),
    ("amg.pmis_seed", "PMIS jitter seed"),
    ("smoother.kind", "jacobi | l1_jacobi | gauss_seidel | poly_gs | ilu | schur_ilut"),
    ("smoother.sweeps", "sweeps per pre/post smoothing step"),
    ("smoother.poly_degree", "Neumann degree of poly_gs"),
    ("smoother.scaling", "none | row | row_col scaling of the ILU U factor"),
    ("hybrid.fine_levels", "number of finest levels using hybrid.fine_kind"),
    ("hybrid.fine_kind", "smoother kind on the finest levels"),
    ("ilu.variant", "ilu0 | ilut"),
    ("ilu.droptol", "ILUT relative drop tolerance"),
    ("ilu.lfill", "ILUT entries kept per row in each of L and U"),
    ("ilu.pivot_patch", "error | replace"),
    ("trisolve.mode", "direct | richardson"),
    ("trisolve.mL", "Richardson sweeps for L"),
    ("trisolve.mU", "Richardson sweeps for U"),
    ("schur.blocks", "number of simulated ranks"),
    ("schur.ilut.droptol", "block ILUT drop tolerance"),
    ("schur.ilut.lfill", "block ILUT fill"),
    ("schur.trisolve.mL", "block Richardson sweeps for L (0 = direct)"),
    ("schur.trisolve.mU", "block Richardson sweeps for U (0 = direct)"),
    ("schur.scaling", "none | row | row_col"),
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn choose<T: Copy>(key: &str, value: &str, table: &[(&str, T)]) -> Result<T, CliError> {
    table.iter().find(|(n, _)| *n == value).map(|(_, v)| *v).ok_or_else(|| {
        let names: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
        CliError::Config(format!("`{key}` must be one of {}, got `{value}`", names.join(" | ")))
    })
}

fn name_of<T: PartialEq>(v: T, table: &[(&'static str, T)]) -> &'static str {
    table.iter().find(|(_, t)| *t == v).map(|(n, _)| *n).expect("every variant is named")
}

pub const SMOOTHER_KINDS: &[(&str, SmootherKind)] = &[
    ("jacobi", SmootherKind::Jacobi),
    ("l1_jacobi", SmootherKind::L1Jacobi),
    ("gauss_seidel", SmootherKind::GaussSeidel),
    ("poly_gs", SmootherKind::PolyGs),
    ("ilu", SmootherKind::Ilu),
    ("schur_ilut", SmootherKind::SchurIlut),
];
const SCALINGS: &[(&str, Scaling)] = &[("none", Scaling::None), ("row", Scaling::Row), ("row_col", Scaling::RowCol)];
const METHODS: &[(&str, KrylovMethod)] = &[("gmres", KrylovMethod::Gmres), ("fgmres", KrylovMethod::Fgmres)];
const CRITERIA: &[(&str, StoppingCriterion)] =
    &[("relres", StoppingCriterion::RelRes), ("nrbe", StoppingCriterion::Nrbe)];
const COARSENINGS: &[(&str, Coarsening)] = &[("rs_greedy", Coarsening::RsGreedy), ("pmis", Coarsening::Pmis)];
const INTERPOLATIONS: &[(&str, Interpolation)] =
    &[("direct", Interpolation::Direct), ("mm_ext", Interpolation::MmExt)];
const VARIANTS: &[(&str, IluVariant)] = &[("ilu0", IluVariant::Ilu0), ("ilut", IluVariant::Ilut)];
const PATCHES: &[(&str, PivotPatch)] = &[("error", PivotPatch::Error), ("replace", PivotPatch::Replace)];
const MODES: &[(&str, TriSolveMode)] = &[("direct", TriSolveMode::Direct), ("richardson", TriSolveMode::Richardson)];

pub fn smoother_kind_name(k: SmootherKind) -> &'static str {
    name_of(k, SMOOTHER_KINDS)
}

/// Richardson count, with 0 meaning a direct solve.
fn sweeps_str(mode: TriSolveMode, m: usize) -> String {
    match mode {
        TriSolveMode::Direct => "0".into(),
        TriSolveMode::Richardson => m.to_string(),
    }
}

fn rhs_str(r: &Rhs) -> String {
    match r {
        Rhs::OnesTimesA => "ones-times-A".into(),
        Rhs::Random(s) => format!("random:{s}"),
        Rhs::File(p) => format!("file:{p}"),
    }
}

fn show(v: impl Display) -> String {
    v.to_string()
}

impl SolverConfig {
    /// Current value of `key` in config syntax.
    pub fn get(&self, key: &str) -> Result<String, CliError> {
        let s = &self.smoother;
        let k = &self.krylov;
        let a = &self.amg;
        Ok(match key {
            "matrix" => self.matrix.clone().unwrap_or_default(),
            "rhs" => rhs_str(&self.rhs),
            "krylov.method" => name_of(k.method, METHODS).into(),
            "krylov.restart" => show(k.restart),
            "krylov.max_iters" => show(k.max_iters),
            "krylov.tol" => show(k.tol),
            "krylov.criterion" => name_of(k.criterion, CRITERIA).into(),
            "krylov.record_history" => show(k.record_history),
            "krylov.anorm_seed" => show(k.anorm_seed),
            "amg.theta" => show(a.theta),
            "amg.max_levels" => show(a.max_levels),
            "amg.coarse_size" => show(a.coarse_size),
            "amg.coarsening" => name_of(a.coarsening, COARSENINGS).into(),
            "amg.interpolation" => name_of(a.interpolation, INTERPOLATIONS).into(),
            "amg.cycles_nu" => show(a.cycles_nu),
            "amg.pmis_seed" => show(a.pmis_seed),
            "smoother.kind" => smoother_kind_name(s.kind).into(),
            "smoother.sweeps" => show(s.sweeps),
            "smoother.poly_degree" => show(s.poly_degree),
            "smoother.scaling" => name_of(s.scaling, SCALINGS).into(),
            "hybrid.fine_levels" => show(self.hybrid_levels),
            "hybrid.fine_kind" => smoother_kind_name(self.hybrid_kind).into(),
            "ilu.variant" => name_of(s.ilu.variant, VARIANTS).into(),
            "ilu.droptol" => show(s.ilu.droptol),
            "ilu.lfill" => show(s.ilu.lfill),
            "ilu.pivot_patch" => name_of(s.ilu.pivot_patch, PATCHES).into(),
            "trisolve.mode" => name_of(s.trisolve.mode, MODES).into(),
            "trisolve.mL" => show(s.trisolve.m_l),
            "trisolve.mU" => show(s.trisolve.m_u),
            "schur.blocks" => show(s.schur.blocks),
            "schur.ilut.droptol" => show(s.schur.ilut.droptol),
            "schur.ilut.lfill" => show(s.schur.ilut.lfill),
            "schur.trisolve.mL" => sweeps_str(s.schur.trisolve.mode, s.schur.trisolve.m_l),
            "schur.trisolve.mU" => sweeps_str(s.schur.trisolve.mode, s.schur.trisolve.m_u),
            "schur.scaling" => name_of(s.schur.scaling, SCALINGS).into(),
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        })
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        let s = &mut self.smoother;
        let k = &mut self.krylov;
        let a = &mut self.amg;
        match key {
            "matrix" => self.matrix = (!v.is_empty()).then(|| v.to_string()),
            "rhs" => {
                self.rhs = if v == "ones-times-A" {
                    Rhs::OnesTimesA
                } else if let Some(seed) = v.strip_prefix("random:") {
                    Rhs::Random(parse(key, seed)?)
                } else if let Some(p) = v.strip_prefix("file:") {
                    Rhs::File(p.to_string())
                } else {
                    return Err(CliError::Config(format!(
                        "`rhs` must be ones-times-A, random:SEED or file:PATH, got `{v}`"
                    )));
                }
            }
            "krylov.method" => k.method = choose(key, v, METHODS)?,
            "krylov.restart" => k.restart = parse(key, v)?,
            "krylov.max_iters" => k.max_iters = parse(key, v)?,
            "krylov.tol" => k.tol = parse(key, v)?,
            "krylov.criterion" => k.criterion = choose(key, v, CRITERIA)?,
            "krylov.record_history" => k.record_history = parse(key, v)?,
            "krylov.anorm_seed" => k.anorm_seed = parse(key, v)?,
            "amg.theta" => a.theta = parse(key, v)?,
            "amg.max_levels" => a.max_levels = parse(key, v)?,
            "amg.coarse_size" => a.coarse_size = parse(key, v)?,
            "amg.coarsening" => a.coarsening = choose(key, v, COARSENINGS)?,
            "amg.interpolation" => a.interpolation = choose(key, v, INTERPOLATIONS)?,
            "amg.cycles_nu" => a.cycles_nu = parse(key, v)?,
            "amg.pmis_seed" => a.pmis_seed = parse(key, v)?,
            "smoother.kind" => s.kind = choose(key, v, SMOOTHER_KINDS)?,
            "smoother.sweeps" => s.sweeps = parse(key, v)?,
            "smoother.poly_degree" => s.poly_degree = parse(key, v)?,
            "smoother.scaling" => s.scaling = choose(key, v, SCALINGS)?,
            "hybrid.fine_levels" => self.hybrid_levels = parse(key, v)?,
            "hybrid.fine_kind" => self.hybrid_kind = choose(key, v, SMOOTHER_KINDS)?,
            "ilu.variant" => s.ilu.variant = choose(key, v, VARIANTS)?,
            "ilu.droptol" => s.ilu.droptol = parse(key, v)?,
            "ilu.lfill" => s.ilu.lfill = parse(key, v)?,
            "ilu.pivot_patch" => s.ilu.pivot_patch = choose(key, v, PATCHES)?,
            "trisolve.mode" => s.trisolve.mode = choose(key, v, MODES)?,
            "trisolve.mL" => s.trisolve.m_l = parse(key, v)?,
            "trisolve.mU" => s.trisolve.m_u = parse(key, v)?,
            "schur.blocks" => s.schur.blocks = parse(key, v)?,
            "schur.ilut.droptol" => s.schur.ilut.droptol = parse(key, v)?,
            "schur.ilut.lfill" => s.schur.ilut.lfill = parse(key, v)?,
            "schur.trisolve.mL" | "schur.trisolve.mU" => {
                let m: usize = parse(key, v)?;
                let t = &mut s.schur.trisolve;
                if m == 0 {
                    t.mode = TriSolveMode::Direct;
                } else {
                    t.mode = TriSolveMode::Richardson;
                    if key.ends_with("mL") {
                        t.m_l = m;
                    } else {
                        t.m_u = m;
                    }
                }
            }
            "schur.scaling" => s.schur.scaling = choose(key, v, SCALINGS)?,
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses a config document on top of the defaults.
    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let mut cfg = SolverConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(CliError::Config(format!("line {}: `{key}` set twice", n + 1)));
            }
            cfg.set(key, value)
                .map_err(|e| CliError::Config(format!("line {}: {}", n + 1, e.to_string().trim_start_matches("config: "))))?;
        }
        Ok(cfg)
    }

    pub fn from_path(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_str(&text)
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<(), CliError> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("override `{o}` must be key=value")))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn ilu_params(&self) -> IluParams {
        self.smoother.ilu
    }

    /// AMG parameters with the smoother plan filled in.
    pub fn amg_params(&self) -> AmgParams {
        let plan = if self.hybrid_levels > 0 {
            let fine = SmootherConfig {
                kind: self.hybrid_kind,
                ..self.smoother
            };
            SmootherPlan::hybrid(fine, self.hybrid_levels, self.smoother)
        } else {
            SmootherPlan::uniform(self.smoother)
        };
        AmgParams {
            smoother_plan: plan,
            ..self.amg
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.amg_params().validate()?;
        self.krylov.validate()?;
        Ok(())
    }

    /// The full config in file syntax.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, _) in KEYS {
            out.push_str(&format!("{key} = {}\n", self.get(key).expect("listed keys exist")));
        }
        out
    }
}

/// Commented listing of every key with its default.
pub fn reference() -> String {
    let d = SolverConfig::default();
    let mut out = String::from("# scilu solver configuration; every key with its default\n");
    for (key, help) in KEYS {
        out.push_str(&format!("\n# {help}\n{key} = {}\n", d.get(key).expect("listed keys exist")));
    }
    out
}

pub fn keys() -> impl Iterator<Item = &'static str> {
    KEYS.iter().map(|(k, _)| *k)
}
