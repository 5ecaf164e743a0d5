//! Command-line front end: reads one action document, runs the engines and
//! prints a deterministic report.

pub mod document;
pub mod report;
mod text;
mod verify;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ergodic_core::action::{CommutingAction, LaurentCyclicAction, MatrixAction, ProductDemoSpec};
use ergodic_core::laurent_engine::{
    alpha_is_ergodic, default_k_max, find_ergodic_direction, group_is_ergodic, LaurentError,
};
use ergodic_core::oracle::{cross_validate, demo_e2, spot_check};
use ergodic_core::toral::{
    distal_verdict, ergodic_distal_filtration, ergodic_verdict, finite_orbit_subspace, find_ergodic_exponents,
    is_distal_group, is_ergodic_group, largest_ergodic_subgroup, mixing_flag, SearchError,
};

use document::{ActionDocument, DocumentError};
use report::{Flags, GeneratorVerdicts, Outcome, Report, SCHEMA_VERSION};

pub const DEFAULT_CAP: usize = 100_000;
pub const DEFAULT_NORM_BOUND: u64 = 3;
pub const DEFAULT_SEARCH_BOX: u64 = 4;
pub const DEFAULT_DEMO_BOX: u32 = 4;
/// Characters sampled by `find-ergodic --spot-check`.
pub const SPOT_CHECK_SAMPLES: usize = 8;

#[derive(Debug, Parser)]
#[command(name = "ergodic", version, about = "Exact ergodicity and distality for commuting automorphism groups")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Re-parse the emitted report and replay every certificate in it.
    #[arg(long, global = true)]
    pub verify_report: bool,
    /// Include wall-clock time in the report (breaks byte determinism).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-generator and group verdicts, largest ergodic subgroup.
    Analyze {
        file: PathBuf,
        /// K bound for Laurent actions.
        #[arg(long)]
        kmax: Option<u64>,
    },
    /// Search for a single ergodic element (matrix) or direction (Laurent).
    FindErgodic(FindArgs),
    /// Ergodic–distal filtration of a matrix action.
    Filtration { file: PathBuf },
    /// Brute-force orbit search against the finite-orbit subspace.
    OracleCheck {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NORM_BOUND)]
        norm_bound: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Certificates for the shift-product action with no ergodic element.
    DemoE2 {
        #[arg(long = "box", default_value_t = DEFAULT_DEMO_BOX)]
        box_radius: u32,
    },
    /// Replay the certificates in a previously written JSON report.
    VerifyReport { report: PathBuf },
}

#[derive(Debug, Args)]
pub struct FindArgs {
    pub file: PathBuf,
    /// Largest exponent sum tried (matrix actions); unbounded by default.
    #[arg(long)]
    pub max_exponent_sum: Option<u64>,
    /// K bound for Laurent actions.
    #[arg(long)]
    pub kmax: Option<u64>,
    /// Largest |n|∞ tried (Laurent actions).
    #[arg(long, default_value_t = DEFAULT_SEARCH_BOX)]
    pub search_box: u64,
    /// Accept a bounded ErgodicUpTo verdict (Laurent actions).
    #[arg(long)]
    pub allow_bounded: bool,
    /// Cross-check the element found with the orbit oracle.
    #[arg(long)]
    pub spot_check: bool,
    #[arg(long, default_value_t = DEFAULT_NORM_BOUND)]
    pub norm_bound: u64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

/// Everything a run produces; `main` only prints it.
#[derive(Debug, Clone)]
pub struct Execution {
    pub report: Report,
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn execute(cli: &Cli) -> Execution {
    let start = Instant::now();
    let mut report = build_report(&cli.command);
    if cli.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    let mut code = report.exit_code();
    let mut stderr = String::new();
    if cli.verify_report {
        let reparsed: Report = serde_json::from_str(&report.to_json()).expect("own report parses");
        let (checked, failures) = verify::verify(&reparsed);
        stderr.push_str(&format!("verify-report: {checked} certificates replayed, {} failures\n", failures.len()));
        for f in &failures {
            stderr.push_str(&format!("  {f}\n"));
        }
        if !failures.is_empty() {
            code = report::exit::REPLAY;
        }
    }
    let stdout = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => text::render(&report),
    };
    Execution { report, stdout, stderr, code }
}

pub fn build_report(command: &Command) -> Report {
    match command {
        Command::Analyze { file, kmax } => with_action("analyze", file, |action, flags| analyze(action, *kmax, flags)),
        Command::FindErgodic(args) => with_action("find-ergodic", &args.file, |action, flags| find(action, args, flags)),
        Command::Filtration { file } => with_action("filtration", file, |action, _| match action {
            CommutingAction::Matrix(a) => filtration(&a),
            CommutingAction::Laurent(_) => unsupported("filtration is implemented for matrix actions"),
        }),
        Command::OracleCheck { file, norm_bound, cap } => with_action("oracle-check", file, |action, flags| {
            flags.norm_bound = Some(*norm_bound);
            flags.cap = Some(*cap);
            match action {
                CommutingAction::Matrix(a) => match cross_validate(&a, *norm_bound, *cap) {
                    Ok(cross_validation) => Outcome::OracleCheck { cross_validation },
                    Err(e) => unsupported(&e.to_string()),
                },
                CommutingAction::Laurent(_) => unsupported("oracle-check is implemented for toral actions"),
            }
        }),
        Command::DemoE2 { box_radius } => {
            let flags = Flags { box_radius: Some(*box_radius), ..Flags::default() };
            let outcome = match ProductDemoSpec::new(*box_radius) {
                Ok(spec) => {
                    let demo = demo_e2(spec);
                    let verified = demo.verify();
                    Outcome::DemoE2 { demo, verified }
                }
                Err(e) => Outcome::ValidationFailed { errors: vec![e] },
            };
            new_report("demo-e2", None, flags, outcome)
        }
        Command::VerifyReport { report } => {
            let outcome = match read(report) {
                Err(outcome) => outcome,
                Ok(text) => match serde_json::from_str::<Report>(&text) {
                    Err(e) => Outcome::SchemaError { line: e.line(), column: e.column(), message: e.to_string() },
                    Ok(r) => {
                        let (certificates_checked, failures) = verify::verify(&r);
                        Outcome::Verification { report_command: r.command, certificates_checked, failures }
                    }
                },
            };
            new_report("verify-report", None, Flags::default(), outcome)
        }
    }
}

fn new_report(command: &str, input: Option<ActionDocument>, flags: Flags, outcome: Outcome) -> Report {
    Report { schema_version: SCHEMA_VERSION, command: command.to_string(), input, flags, outcome, wall_time_ms: None }
}

#[allow(clippy::result_large_err)]
fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path)
        .map_err(|e| Outcome::IoError { message: format!("cannot read {}: {e}", path.display()) })
}

fn unsupported(message: &str) -> Outcome {
    Outcome::Unsupported { message: message.to_string() }
}

fn with_action(
    command: &str,
    path: &Path,
    run: impl FnOnce(CommutingAction, &mut Flags) -> Outcome,
) -> Report {
    let mut flags = Flags::default();
    let text = match read(path) {
        Ok(t) => t,
        Err(outcome) => return new_report(command, None, flags, outcome),
    };
    let doc = match ActionDocument::parse(&text) {
        Ok(d) => d,
        Err(DocumentError::Schema { line, column, message }) => {
            return new_report(command, None, flags, Outcome::SchemaError { line, column, message })
        }
        Err(DocumentError::Invalid(errors)) => {
            return new_report(command, None, flags, Outcome::ValidationFailed { errors })
        }
    };
    let outcome = match doc.validate() {
        Ok(action) => run(action, &mut flags),
        Err(DocumentError::Invalid(errors)) => Outcome::ValidationFailed { errors },
        Err(e) => unsupported(&e.to_string()),
    };
    new_report(command, Some(doc), flags, outcome)
}

fn analyze(action: CommutingAction, kmax: Option<u64>, flags: &mut Flags) -> Outcome {
    match action {
        CommutingAction::Matrix(a) => analyze_matrix(&a),
        CommutingAction::Laurent(a) => {
            let k_max = kmax.unwrap_or_else(|| default_k_max(&a));
            flags.k_max = Some(k_max);
            match analyze_laurent(&a, k_max) {
                Ok(o) => o,
                Err(e) => unsupported(&e.to_string()),
            }
        }
    }
}

pub fn analyze_matrix(action: &MatrixAction) -> Outcome {
    let generators = action
        .duals()
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let ergodic = ergodic_verdict(d);
            GeneratorVerdicts { index: i + 1, mixing: mixing_flag(&ergodic), ergodic, distal: distal_verdict(d) }
        })
        .collect();
    Outcome::MatrixAnalysis {
        generators,
        group_ergodic: is_ergodic_group(action),
        group_distal: is_distal_group(action),
        finite_orbit_subspace: finite_orbit_subspace(action),
        largest_ergodic: largest_ergodic_subgroup(action),
    }
}

fn analyze_laurent(action: &LaurentCyclicAction, k_max: u64) -> Result<Outcome, LaurentError> {
    let d = action.nvars();
    let generators = (0..d)
        .map(|i| {
            let n: Vec<i64> = (0..d).map(|j| (i == j) as i64).collect();
            alpha_is_ergodic(action, &n, k_max)
        })
        .collect::<Result<_, _>>()?;
    Ok(Outcome::LaurentAnalysis { generators, group: group_is_ergodic(action, k_max)? })
}

fn find(action: CommutingAction, args: &FindArgs, flags: &mut Flags) -> Outcome {
    match action {
        CommutingAction::Matrix(a) => {
            flags.max_exponent_sum = args.max_exponent_sum;
            if args.spot_check {
                flags.norm_bound = Some(args.norm_bound);
                flags.cap = Some(args.cap);
            }
            match find_ergodic_exponents(&a, args.max_exponent_sum) {
                Ok(element) => {
                    let spot = if args.spot_check {
                        match MatrixAction::new(a.kind(), Some(a.dim()), vec![element.element.clone()]) {
                            Ok(cyclic) => match spot_check(&cyclic, args.norm_bound, args.cap, SPOT_CHECK_SAMPLES) {
                                Ok(c) => Some(c),
                                Err(e) => return unsupported(&e.to_string()),
                            },
                            Err(errors) => return Outcome::ValidationFailed { errors },
                        }
                    } else {
                        None
                    };
                    Outcome::ErgodicElement { element, spot_check: spot }
                }
                Err(SearchError::NotErgodicGroup { witness }) => Outcome::NotErgodicGroup { witness: *witness },
                Err(SearchError::Exhausted { max_sum }) => Outcome::SearchExhausted { bound: max_sum },
            }
        }
        CommutingAction::Laurent(a) => {
            let k_max = args.kmax.unwrap_or_else(|| default_k_max(&a));
            flags.k_max = Some(k_max);
            flags.search_box = Some(args.search_box);
            flags.allow_bounded = Some(args.allow_bounded);
            match find_ergodic_direction(&a, args.search_box, k_max, args.allow_bounded) {
                Ok(result) => Outcome::ErgodicDirection { result },
                Err(LaurentError::NotErgodicGroup { witness }) => Outcome::NotErgodicLaurentGroup { witness: *witness },
                Err(LaurentError::Exhausted { search_box }) => Outcome::SearchExhausted { bound: search_box },
                Err(e) => unsupported(&e.to_string()),
            }
        }
    }
}

pub fn filtration(action: &MatrixAction) -> Outcome {
    let filtration = ergodic_distal_filtration(action);
    let group_verdict = is_ergodic_group(action);
    let consistent =
        filtration.group_ergodic == (group_verdict.kind == ergodic_core::toral::VerdictKind::Ergodic);
    Outcome::Filtration { filtration, group_verdict, consistent }
}
