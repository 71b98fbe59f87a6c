//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a relation is violated
//! beyond tolerance, 2 on input or validation errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::distance::{oracle, tomographic, Measure};
use crate::photon::{inequality_scan, FockSpace, InequalityReport, ScanGrid};
use crate::report::{csv_num, CaseResult, RunReport};
use crate::search::SearchConfig;
use crate::spin::SpinJ;
use crate::statefile::{LoadedState, StateFile};
use crate::verify::{
    photon_inequalities, propositions, reconstruction, standard_photon_pairs, star_fidelity,
    PhotonPair, PropositionsConfig, ReconstructionConfig, StarFidelityConfig,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tomodist", version, about = "Tomographic distance measures between quantum states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two states given as state files.
    Distance(DistanceArgs),
    /// Run a seeded verification suite.
    Verify(VerifyArgs),
    /// Scan photon-tomogram distances over the displacement plane.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Hs,
    Trace,
    Fidelity,
    Opnorm,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Hs => Measure::Hs,
            MeasureArg::Trace => Measure::Trace,
            MeasureArg::Fidelity => Measure::Fidelity,
            MeasureArg::Opnorm => Measure::Opnorm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Oracle,
    Tomographic,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Propositions,
    Reconstruction,
    StarFidelity,
    PhotonInequalities,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 4.0)]
    pub grid_rmax: f64,
    #[arg(long, default_value_t = 40)]
    pub grid_radial: usize,
    #[arg(long, default_value_t = 32)]
    pub grid_angular: usize,
    /// Skip the simplex refinement after the grid pass.
    #[arg(long)]
    pub no_refine: bool,
}

impl GridArgs {
    fn grid(&self) -> ScanGrid {
        ScanGrid {
            r_max: self.grid_rmax,
            n_radial: self.grid_radial,
            n_angular: self.grid_angular,
            refine: !self.no_refine,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    pub state1: PathBuf,
    pub state2: PathBuf,
    /// Measure to compute; all four when omitted.
    #[arg(long, value_enum)]
    pub measure: Option<MeasureArg>,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Largest accepted |oracle - tomographic| gap.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Hilbert-space dimension N.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Spin j, e.g. `1/2`, `1`, `1.5`; an alternative to `--dim`.
    #[arg(long)]
    pub j: Option<SpinJ>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Main gap tolerance; the suite default when omitted.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Random restarts for searched extrema (0 disables the proposition search check).
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Photon states for the inequality suite; the four reference pairs when omitted.
    #[arg(long, requires = "state2")]
    pub state1: Option<PathBuf>,
    #[arg(long, requires = "state1")]
    pub state2: Option<PathBuf>,
    /// Also write the per-case CSV here.
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    pub state1: PathBuf,
    pub state2: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Errors that end a run with exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    StateFile(#[from] crate::statefile::StateFileError),
    #[error(transparent)]
    Library(#[from] crate::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    let echo: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli.command, echo) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn execute(command: Command, echo: Vec<String>) -> Result<i32, CliError> {
    match command {
        Command::Distance(a) => {
            let mut report = cmd_distance(&a)?;
            report.command = echo;
            emit_report(&report, &a.output, Format::Text)?;
            Ok(exit_code(report.passed))
        }
        Command::Verify(a) => {
            let mut report = cmd_verify(&a)?;
            report.command = echo;
            if let Some(path) = &a.csv_out {
                write_output(Some(path), &report.to_csv())?;
            }
            emit_report(&report, &a.output, Format::Json)?;
            Ok(exit_code(report.passed))
        }
        Command::Scan(a) => {
            let scan = cmd_scan(&a)?;
            let text = match a.output.format.unwrap_or(Format::Csv) {
                Format::Csv => scan_csv(&scan),
                Format::Json => serde_json::to_string_pretty(&scan).expect("reports serialize"),
                Format::Text => scan_text(&scan),
            };
            write_output(a.output.out.as_deref(), &text)?;
            Ok(exit_code(scan.all_hold()))
        }
    }
}

fn exit_code(passed: bool) -> i32 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}

fn emit_report(report: &RunReport, output: &OutputArgs, default: Format) -> Result<(), CliError> {
    let text = match output.format.unwrap_or(default) {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    };
    write_output(output.out.as_deref(), &text)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let mut text = text.to_owned();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_owned(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_pair(p1: &Path, p2: &Path) -> Result<(LoadedState, LoadedState), CliError> {
    let s1 = StateFile::load_state(p1)?;
    let s2 = StateFile::load_state(p2)?;
    crate::linalg::check_same_dim(s1.state.rho.dim(), s2.state.rho.dim())?;
    Ok((s1, s2))
}

pub fn cmd_distance(a: &DistanceArgs) -> Result<RunReport, CliError> {
    let (s1, s2) = load_pair(&a.state1, &a.state2)?;
    let (r1, r2) = (&s1.state.rho, &s2.state.rho);
    let measures: Vec<Measure> = match a.measure {
        Some(m) => vec![m.into()],
        None => Measure::ALL.to_vec(),
    };
    let mut report = RunReport::new(None);
    report.tolerance("tol", a.tol);
    for m in measures {
        let o = matches!(a.method, MethodArg::Oracle | MethodArg::Both)
            .then(|| oracle(m, r1, r2))
            .transpose()?;
        let t = matches!(a.method, MethodArg::Tomographic | MethodArg::Both)
            .then(|| tomographic(m, r1, r2))
            .transpose()?;
        let case = match (o, t) {
            (Some(o), Some(t)) => CaseResult::gap_check(0, m.name(), o.value, t.value, a.tol).with_method(t.method),
            (Some(o), None) => CaseResult::gap_check(0, m.name(), o.value, o.value, a.tol).with_method(o.method),
            (None, Some(t)) => CaseResult::gap_check(0, m.name(), t.value, t.value, a.tol).with_method(t.method),
            (None, None) => unreachable!("method selects at least one route"),
        };
        report.push(case);
    }
    Ok(report)
}

fn dimension(a: &VerifyArgs, default: usize) -> Result<usize, CliError> {
    match (a.dim, a.j) {
        (Some(_), Some(_)) => Err(CliError::Usage("give --dim or --j, not both".into())),
        (Some(n), None) => Ok(n),
        (None, Some(j)) => Ok(j.dim()),
        (None, None) => Ok(default),
    }
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<RunReport, CliError> {
    let report = match a.suite {
        Suite::Propositions => {
            let defaults = PropositionsConfig::default();
            propositions(&PropositionsConfig {
                dim: dimension(a, defaults.dim)?,
                trials: a.trials,
                seed: a.seed,
                tol: a.tol.unwrap_or(defaults.tol),
                search_restarts: a.restarts.unwrap_or(defaults.search_restarts),
                ..defaults
            })?
        }
        Suite::Reconstruction => {
            let defaults = ReconstructionConfig::default();
            let n = dimension(a, defaults.j.dim())?;
            reconstruction(&ReconstructionConfig {
                j: SpinJ::from_dim(n)?,
                trials: a.trials,
                seed: a.seed,
                tol: a.tol.unwrap_or(defaults.tol),
                ..defaults
            })?
        }
        Suite::StarFidelity => {
            let defaults = StarFidelityConfig::default();
            star_fidelity(&StarFidelityConfig {
                dim: dimension(a, defaults.dim)?,
                trials: a.trials,
                seed: a.seed,
                tol: a.tol.unwrap_or(defaults.tol),
                search: SearchConfig {
                    restarts: a.restarts.unwrap_or(defaults.search.restarts),
                    seed: a.seed,
                    ..defaults.search
                },
                ..defaults
            })?
        }
        Suite::PhotonInequalities => {
            let (pairs, space) = match (&a.state1, &a.state2) {
                (Some(p1), Some(p2)) => {
                    let (s1, s2) = load_pair(p1, p2)?;
                    let space = s1.space.or(s2.space).ok_or_else(|| {
                        CliError::Usage("photon-inequalities needs photon-kind state files".into())
                    })?;
                    let pair = PhotonPair {
                        name: "input".into(),
                        first: s1.state,
                        second: s2.state,
                    };
                    (vec![pair], space)
                }
                _ => {
                    let space = FockSpace::default();
                    (standard_photon_pairs(&space)?, space)
                }
            };
            photon_inequalities(&pairs, &space, &a.grid.grid())?
        }
    };
    Ok(report)
}

pub fn cmd_scan(a: &ScanArgs) -> Result<InequalityReport, CliError> {
    let (s1, s2) = load_pair(&a.state1, &a.state2)?;
    let space = match (s1.space, s2.space) {
        (Some(x), Some(y)) if x == y => x,
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("state files use different Fock spaces".into()))
        }
        _ => return Err(CliError::Usage("scan needs photon-kind state files".into())),
    };
    Ok(inequality_scan(&s1.state, &s2.state, &space, &a.grid.grid())?)
}

/// One row per displacement node, then `bound` and `oracle` trailer rows in
/// the same measure columns.
pub fn scan_csv(scan: &InequalityReport) -> String {
    let mut out = String::from("row,re,im,hs,kolmogorov,bhattacharyya,max_abs\n");
    for n in &scan.nodes {
        let _ = writeln!(
            out,
            "node,{},{},{},{},{},{}",
            csv_num(n.re),
            csv_num(n.im),
            csv_num(n.hs),
            csv_num(n.kolmogorov),
            csv_num(n.bhattacharyya),
            csv_num(n.max_abs)
        );
    }
    let col = |f: &dyn Fn(Measure) -> f64| {
        Measure::ALL
            .iter()
            .map(|&m| csv_num(f(m)))
            .collect::<Vec<_>>()
            .join(",")
    };
    let _ = writeln!(out, "bound,,,{}", col(&|m| scan.bound(m).bound));
    let _ = writeln!(out, "oracle,,,{}", col(&|m| scan.bound(m).oracle));
    out
}

fn scan_text(scan: &InequalityReport) -> String {
    let mut out = format!(
        "{} nodes, radius {:.4}, tol {:.1e}, max leakage {:.1e}\n",
        scan.nodes.len(),
        scan.r_eff,
        scan.tol,
        scan.max_leakage
    );
    for b in &scan.bounds {
        let _ = writeln!(
            out,
            "{:<9} bound {:.12} at ({:+.6}, {:+.6}) oracle {:.12} slack {:+.3e} {}",
            b.measure.name(),
            b.bound,
            b.at_re,
            b.at_im,
            b.oracle,
            b.slack,
            if b.holds { "ok" } else { "VIOLATED" }
        );
    }
    out
}
