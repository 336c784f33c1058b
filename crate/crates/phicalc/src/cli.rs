//! The `phicalc` command-line front end.
//!
//! Every subcommand reads JSON inputs, writes canonical JSON (or CSV when
//! `--out` ends in `.csv`) and maps its outcome to an exit code: 0 for success,
//! 1 for a failed verification, 2 for a usage or input error.

pub mod suite;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::calculus::{compose_alternatives, lift_b_to_phi, Geometry, OpClass};
use crate::error::{PhiError, Result};
use crate::index_algebra::{IndexSet, DISPLAY_CUTOFF};
use crate::json;
use crate::model::{
    fit_samples, imspec, linspace, normal_family_gap, solve_harmonic, verify_predictions, write_fits_csv,
    write_solution_csv, write_spectrum_csv, Component, Convention, FitWindow, FourierMode, Grid, ImspecConfig,
    ModelGeometry, VerifyConfig,
};
use crate::split::{split_parametrix, SplitOperator};

pub use suite::{run_suite, SuiteCheck, SuiteReport, SuiteTolerances};

#[derive(Debug, Parser)]
#[command(name = "phicalc", version, about = "Index sets, φ-operator classes, split parametrices and model numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output file; `.csv` selects CSV where a subcommand supports it. Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comparison tolerance for subcommands that check against a closed form.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print a human-readable summary on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IdxOp {
    Add,
    Union,
    Shift,
    Scale,
    Compare,
    Elements,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Flat,
    Geometric,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Flat => Convention::Flat,
            ConventionArg::Geometric => Convention::Geometric,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Index-set arithmetic on JSON files.
    Idx {
        #[arg(value_enum)]
        op: IdxOp,
        /// One input for shift, scale, elements and compare against --alpha; two otherwise.
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
        /// Shift amount or scale factor.
        #[arg(long, allow_hyphen_values = true)]
        by: Option<f64>,
        /// Threshold for `compare` against a number.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Largest real part listed by `elements`.
        #[arg(long, default_value_t = DISPLAY_CUTOFF)]
        cutoff: f64,
    },
    /// Composes two operator classes.
    Compose {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        a: Option<u32>,
        #[arg(long, default_value_t = 1)]
        b_dim: u32,
        /// Emit every applicable rule instead of the most precise one.
        #[arg(long)]
        all: bool,
    },
    /// Lifts a b-class with full index family to the φ-calculus.
    Lift {
        class: PathBuf,
        #[arg(long)]
        a: u32,
        #[arg(long, default_value_t = 1)]
        b_dim: u32,
    },
    /// Replays the split parametrix construction for an operator.
    Parametrix {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Report file; takes precedence over --out.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Indicial roots of a torus model, mode by mode.
    Imspec {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, default_values_t = [-2.5, 2.5])]
        window: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        modes: u32,
        #[arg(long, value_enum, default_value_t = ConventionArg::Flat)]
        convention: ConventionArg,
        /// `scalar`, `full` or `degree:L`.
        #[arg(long, default_value = "scalar")]
        component: Component,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Smallest singular value of the normal family on a square grid.
    Gap {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, default_values_t = [-5.0, 5.0])]
        window: Vec<f64>,
        /// Grid points per axis.
        #[arg(long, default_value_t = 21)]
        points: usize,
        /// Fibre Fourier cutoff.
        #[arg(long, default_value_t = 2)]
        modes: u32,
    },
    /// Solves one separated harmonic mode and fits its decay.
    Solve {
        #[arg(long)]
        model: PathBuf,
        /// Base mode, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        base: Vec<i32>,
        /// Fibre mode, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        fiber: Vec<i32>,
        #[arg(long, default_value_t = 0)]
        degree: u32,
        #[arg(long, value_parser = parse_grid, default_value = "12,2048")]
        grid: Grid,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [1e-4, 1e-2])]
        window: Vec<f64>,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        boundary: f64,
    },
    /// Cross-checks solved modes against the indicial predictions.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 2)]
        modes: u32,
        #[arg(long, default_value_t = 1)]
        fiber_modes: u32,
        #[arg(long, value_parser = parse_grid, default_value = "12,2048")]
        grid: Grid,
        /// Fit window in x.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [1e-4, 1e-2])]
        window: Vec<f64>,
    },
    /// Runs the composite acceptance checks on a model.
    VerifyPaper {
        #[arg(long)]
        model: PathBuf,
    },
}

/// Parses `T,N`.
pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let (t, n) = s.split_once(',').ok_or_else(|| format!("expected T,N, got {s:?}"))?;
    let grid = Grid {
        t_max: t.trim().parse().map_err(|e| format!("bad T {t:?}: {e}"))?,
        n: n.trim().parse().map_err(|e| format!("bad N {n:?}: {e}"))?,
    };
    grid.validate().map_err(|e| e.to_string())?;
    Ok(grid)
}

/// Result of a subcommand: whether it verified, plus a one-line summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
}

impl Outcome {
    fn ok(summary: impl Into<String>) -> Self {
        Outcome { pass: true, summary: summary.into() }
    }

    fn verdict(pass: bool, summary: impl Into<String>) -> Self {
        Outcome { pass, summary: summary.into() }
    }
}

/// Exit code for an error: malformed input is a usage error, everything else a failed run.
pub fn error_code(e: &PhiError) -> u8 {
    match e {
        PhiError::Parse { .. } | PhiError::Io(_) | PhiError::InvalidInput(_) | PhiError::MissingConstants(_) => 2,
        PhiError::Unsupported(_) => 2,
        PhiError::NonIntegrable(_) | PhiError::WeightGate(_) | PhiError::Hypothesis(_) | PhiError::Numerics(_) => 1,
    }
}

fn is_csv(out: Option<&Path>) -> bool {
    out.and_then(Path::extension).is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn emit_json<T: Serialize + ?Sized>(out: Option<&Path>, value: &T) -> Result<()> {
    match out {
        Some(p) => json::write_file(p, value),
        None => {
            let s = json::to_canonical_string(value)?;
            std::io::stdout().write_all(s.as_bytes()).map_err(|e| PhiError::Io(e.to_string()))
        }
    }
}

fn csv_target(out: Option<&Path>) -> Result<std::fs::File> {
    let p = out.ok_or_else(|| PhiError::InvalidInput("CSV output needs --out".into()))?;
    std::fs::File::create(p).map_err(|e| PhiError::Io(format!("{}: {e}", p.display())))
}

fn no_csv(out: Option<&Path>, what: &str) -> Result<()> {
    if is_csv(out) {
        return Err(PhiError::InvalidInput(format!("{what} has no CSV form; use a .json output")));
    }
    Ok(())
}

fn window(v: &[f64]) -> Result<(f64, f64)> {
    match v {
        [lo, hi] if lo.is_finite() && hi.is_finite() && lo < hi => Ok((*lo, *hi)),
        _ => Err(PhiError::InvalidInput(format!("window must be LO HI with LO < HI, got {v:?}"))),
    }
}

fn tolerance(tol: Option<f64>, default: f64) -> Result<f64> {
    match tol {
        None => Ok(default),
        Some(t) if t.is_finite() && t > 0.0 => Ok(t),
        Some(t) => Err(PhiError::InvalidInput(format!("tolerance must be positive, got {t}"))),
    }
}

#[derive(Serialize)]
struct Comparison {
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    greater_than: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    geq: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subset: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    superset: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equal: Option<bool>,
}

#[derive(Serialize)]
struct Element {
    re: f64,
    im: f64,
    k: u32,
}

fn run_idx(op: IdxOp, inputs: &[PathBuf], by: Option<f64>, alpha: Option<f64>, cutoff: f64, out: Option<&Path>) -> Result<Outcome> {
    no_csv(out, "idx")?;
    let sets: Vec<IndexSet> = inputs.iter().map(|p| json::read_file(p)).collect::<Result<_>>()?;
    let two = || -> Result<(&IndexSet, &IndexSet)> {
        match sets.as_slice() {
            [a, b] => Ok((a, b)),
            _ => Err(PhiError::InvalidInput(format!("{op:?} takes two index sets"))),
        }
    };
    let one = || -> Result<&IndexSet> {
        match sets.as_slice() {
            [a] => Ok(a),
            _ => Err(PhiError::InvalidInput(format!("{op:?} takes one index set"))),
        }
    };
    let need_by = || by.ok_or_else(|| PhiError::InvalidInput(format!("{op:?} needs --by")));
    let result = match op {
        IdxOp::Add => two().map(|(a, b)| a.add(b))?,
        IdxOp::Union => two().map(|(a, b)| a.extended_union(b))?,
        IdxOp::Shift => one()?.shift(need_by()?),
        IdxOp::Scale => {
            let f = need_by()?;
            if f < 1.0 || f.fract() != 0.0 {
                return Err(PhiError::InvalidInput(format!("scale factor must be a positive integer, got {f}")));
            }
            one()?.scale(f as u32)
        }
        IdxOp::Compare => {
            let c = match (sets.as_slice(), alpha) {
                ([a], Some(al)) => Comparison {
                    alpha: Some(al),
                    greater_than: Some(a.greater_than(al)),
                    geq: Some(a.geq(al)),
                    subset: None,
                    superset: None,
                    equal: None,
                },
                ([a, b], None) => Comparison {
                    alpha: None,
                    greater_than: None,
                    geq: None,
                    subset: Some(a.is_subset(b)),
                    superset: Some(b.is_subset(a)),
                    equal: Some(a == b),
                },
                _ => return Err(PhiError::InvalidInput("compare takes one set with --alpha or two sets".into())),
            };
            emit_json(out, &c)?;
            return Ok(Outcome::ok("compared"));
        }
        IdxOp::Elements => {
            let els: Vec<Element> =
                one()?.elements_up_to(cutoff).into_iter().map(|(z, k)| Element { re: z.re, im: z.im, k }).collect();
            emit_json(out, &els)?;
            return Ok(Outcome::ok(format!("{} elements", els.len())));
        }
    };
    emit_json(out, &result)?;
    Ok(Outcome::ok(format!("{result}")))
}

fn load_model(p: &Path) -> Result<ModelGeometry> {
    let m: ModelGeometry = json::read_file(p)?;
    m.validate()?;
    Ok(m)
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Idx { op, inputs, by, alpha, cutoff } => run_idx(*op, inputs, *by, *alpha, *cutoff, out),
        Command::Compose { left, right, a, b_dim, all } => {
            no_csv(out, "compose")?;
            let p: OpClass = json::read_file(left)?;
            let q: OpClass = json::read_file(right)?;
            let geo = a.map(|a| Geometry::new(a, *b_dim)).transpose()?;
            let alts = compose_alternatives(&p, &q, geo)?;
            let best = alts.first().ok_or_else(|| PhiError::Unsupported("no composition rule applies".into()))?;
            let summary = format!("{best}");
            if *all {
                emit_json(out, &alts)?;
            } else {
                emit_json(out, best)?;
            }
            Ok(Outcome::ok(summary))
        }
        Command::Lift { class, a, b_dim } => {
            no_csv(out, "lift")?;
            let t: OpClass = json::read_file(class)?;
            let lifted = lift_b_to_phi(&t, Geometry::new(*a, *b_dim)?)?;
            emit_json(out, &lifted)?;
            Ok(Outcome::ok(format!("{} + {}", lifted.main, lifted.residual)))
        }
        Command::Parametrix { op, alpha, report } => {
            let target = report.as_deref().or(out);
            no_csv(target, "parametrix")?;
            let op: SplitOperator = json::read_file(op)?;
            let rep = split_parametrix(&op, *alpha)?;
            emit_json(target, &rep)?;
            let failures = rep.failures();
            let summary = if rep.pass { format!("R_r = {}", rep.right.r_display) } else { failures.join("\n") };
            Ok(Outcome::verdict(rep.pass, summary))
        }
        Command::Imspec { model, window: w, modes, convention, component, step } => {
            let model = load_model(model)?;
            let mut cfg = ImspecConfig::new(window(w)?, *modes, (*convention).into(), *component);
            if let Some(s) = step {
                cfg.step = tolerance(Some(*s), 0.0)?;
            }
            let res = imspec(&model, &cfg)?;
            if is_csv(out) {
                write_spectrum_csv(&res.points, csv_target(out)?)?;
            } else {
                emit_json(out, &res)?;
            }
            Ok(Outcome::ok(format!("roots {:?}", res.roots)))
        }
        Command::Gap { model, window: w, points, modes } => {
            no_csv(out, "gap")?;
            let model = load_model(model)?;
            let tol = tolerance(cli.tol, 1e-6)?;
            let (lo, hi) = window(w)?;
            let grid = linspace(lo, hi, *points);
            let rep = normal_family_gap(&model, &grid, &grid, *modes)?;
            let worst = rep
                .samples
                .iter()
                .filter(|s| s.expected.is_finite())
                .map(|s| (s.gap - s.expected).abs())
                .fold(0.0, f64::max);
            let pass = rep.normal_invertible && worst <= tol;
            #[derive(Serialize)]
            struct GapOutput<'a> {
                report: &'a crate::model::GapReport,
                tolerance: f64,
                max_deviation: f64,
                pass: bool,
            }
            emit_json(out, &GapOutput { report: &rep, tolerance: tol, max_deviation: worst, pass })?;
            Ok(Outcome::verdict(pass, format!("min gap {}, max deviation {worst:.3e}", rep.min_gap)))
        }
        Command::Solve { model, base, fiber, degree, grid, window: w, boundary } => {
            let model = load_model(model)?;
            let (lo, hi) = window(w)?;
            let mode = FourierMode {
                base: if base.is_empty() { vec![0; model.b()] } else { base.clone() },
                fiber: if fiber.is_empty() { vec![0; model.f()] } else { fiber.clone() },
            };
            let sol = solve_harmonic(&model, *degree, &mode, *boundary, *grid)?;
            let fit = fit_samples(&sol.x, &sol.u, FitWindow { lo, hi });
            if is_csv(out) {
                write_solution_csv(&sol, csv_target(out)?)?;
            } else {
                #[derive(Serialize)]
                struct SolveOutput<'a> {
                    solution: &'a crate::model::HarmonicSolution,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    fit: Option<crate::model::PowerFit>,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    fit_error: Option<String>,
                }
                let (fit_ok, fit_error) = match &fit {
                    Ok(f) => (Some(*f), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                emit_json(out, &SolveOutput { solution: &sol, fit: fit_ok, fit_error })?;
            }
            let summary = match fit {
                Ok(f) => format!("mode {mode} L={degree}: exponent {} log power {}", f.exponent, f.log_power),
                Err(e) => format!("mode {mode} L={degree}: {e}"),
            };
            Ok(Outcome::verdict(!sol.ill_conditioned, summary))
        }
        Command::Verify { model, alpha, modes, fiber_modes, grid, window: w } => {
            let model = load_model(model)?;
            let (lo, hi) = window(w)?;
            let cfg = VerifyConfig {
                alpha: *alpha,
                mode_cutoff: *modes,
                fiber_cutoff: *fiber_modes,
                grid: *grid,
                window: FitWindow { lo, hi },
                ..VerifyConfig::default()
            };
            let rep = verify_predictions(&model, &cfg)?;
            if is_csv(out) {
                let fits: Vec<_> = rep.modes.iter().filter_map(|v| v.fit.clone()).collect();
                write_fits_csv(&fits, csv_target(out)?)?;
            } else {
                emit_json(out, &rep)?;
            }
            let summary = if rep.pass { format!("{} modes agree", rep.modes.len()) } else { rep.mismatches.join("\n") };
            Ok(Outcome::verdict(rep.pass, summary))
        }
        Command::VerifyPaper { model } => {
            no_csv(out, "verify-paper")?;
            let model = load_model(model)?;
            let tol = SuiteTolerances { root: tolerance(cli.tol, 1e-8)?, ..SuiteTolerances::default() };
            let rep = run_suite(&model, tol)?;
            emit_json(out, &rep)?;
            let summary = rep
                .checks
                .iter()
                .map(|c| format!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome::verdict(rep.pass, summary))
        }
    }
}

/// Applies `PHICALC_THREADS` to the global rayon pool.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("PHICALC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| PhiError::InvalidInput(format!("PHICALC_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| PhiError::InvalidInput(format!("thread pool: {e}")))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn dispatch<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("phicalc: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(o) => {
            if cli.verbose > 0 || !o.pass {
                eprintln!("{}", o.summary);
            }
            if o.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("phicalc: verification FAILED");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("phicalc: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
