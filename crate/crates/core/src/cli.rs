//! Command-line front end.
//!
//! Every invocation prints exactly one JSON document on stdout. Exit codes:
//! 0 on success or a true verdict, 1 on a false verdict (or a decomposition
//! refused for numerical reasons), 2 on usage, I/O and parse errors.
//! Human-readable diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::classify::{
    bimonotone_check, constant_on_domain_check, monotone_check, paramonotone_check, ClassificationReport,
    Paramonotonicity,
};
use crate::decompose::{
    decompose, verify_reconstruction, DecomposeError, DecomposeOptions, SkewDecomposition, SkewDecompositionDoc,
};
use crate::generate::{make_fixture, FixtureSpec, FixtureTruthDoc};
use crate::graph::OperatorGraph;
use crate::io::{load_graph, save_graph, to_json_bytes, GraphFormat};
use crate::tolerance::{ToleranceConfig, DEFAULT_ABS_TOL, DEFAULT_REL_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "bimonotone",
    version,
    about = "Classify sampled operators and decompose bimonotone ones"
)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Absolute tolerance
    #[arg(long, global = true, default_value_t = DEFAULT_ABS_TOL)]
    pub tol_abs: f64,

    /// Relative tolerance
    #[arg(long, global = true, default_value_t = DEFAULT_REL_TOL)]
    pub tol_rel: f64,

    /// Graph file format
    #[arg(long, global = true, value_enum, default_value_t = GraphFormat::Json)]
    pub format: GraphFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report monotone, bimonotone, paramonotone and constant verdicts
    Analyze { graph: PathBuf },
    /// Recover the skew-symmetric representation of a bimonotone graph
    Decompose {
        graph: PathBuf,
        /// Index of the point used as basepoint (default: first point)
        #[arg(long)]
        basepoint: Option<usize>,
        /// Seed for a random rotation of the recovered basis
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the decomposition to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a fixture from a JSON fixture spec
    Generate {
        spec: PathBuf,
        /// Graph output path; the planted truth goes to `<stem>.truth.json` next to it
        #[arg(long)]
        out: PathBuf,
        /// Override the seed in the spec
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a stored decomposition against a graph
    Verify { decomposition: PathBuf, graph: PathBuf },
}

#[derive(Serialize)]
struct AnalyzeOutput {
    dimension: usize,
    points: usize,
    monotone: ClassificationReport,
    bimonotone: ClassificationReport,
    paramonotone: Paramonotonicity,
    constant_on_domain: ClassificationReport,
}

#[derive(Serialize)]
struct GenerateOutput {
    graph: String,
    truth: String,
    dimension: usize,
    points: usize,
}

#[derive(Serialize)]
struct ErrorOutput<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ClassificationReport>,
}

/// Failure carrying its exit code and the JSON error document.
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
    report: Option<ClassificationReport>,
}

impl Failure {
    fn usage(kind: &'static str, message: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            kind,
            message: message.to_string(),
            report: None,
        }
    }
}

type Outcome = Result<(Vec<u8>, i32), Failure>;

/// Parse `args` (including the program name) and execute.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    emit_failure(stdout, &Failure::usage("usage", e.kind()));
                    EXIT_USAGE
                }
            };
        }
    };
    run_config(&config, stdout, stderr)
}

pub fn run_config(config: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match execute(config) {
        Ok((doc, code)) => {
            let _ = stdout.write_all(&doc);
            let _ = stdout.write_all(b"\n");
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            emit_failure(stdout, &f);
            f.code
        }
    }
}

fn emit_failure(stdout: &mut dyn Write, f: &Failure) {
    let doc = ErrorOutput {
        error: f.kind,
        message: f.message.clone(),
        report: f.report.clone(),
    };
    let _ = stdout.write_all(&to_json_bytes(&doc));
    let _ = stdout.write_all(b"\n");
}

fn execute(config: &CliConfig) -> Outcome {
    let tol = ToleranceConfig::new(config.tol_abs, config.tol_rel).map_err(|e| Failure::usage("usage", e))?;
    match &config.command {
        Command::Analyze { graph } => analyze(&read_graph(graph, config.format)?, &tol),
        Command::Decompose {
            graph,
            basepoint,
            seed,
            out,
        } => {
            let g = read_graph(graph, config.format)?;
            let options = DecomposeOptions {
                basepoint: *basepoint,
                basis_seed: *seed,
            };
            run_decompose(&g, options, out.as_deref(), &tol)
        }
        Command::Generate { spec, out, seed } => generate(spec, out, *seed, config.format),
        Command::Verify { decomposition, graph } => {
            let text = read_file(decomposition)?;
            let doc: SkewDecompositionDoc = serde_json::from_slice(&text)
                .map_err(|e| Failure::usage("parse", format!("{}: {e}", decomposition.display())))?;
            let dec = SkewDecomposition::try_from(&doc).map_err(|e| Failure::usage("parse", e))?;
            let g = read_graph(graph, config.format)?;
            let report = verify_reconstruction(&dec, &g, &tol).map_err(|e| Failure::usage("dimension", e))?;
            let code = if report.verdict { EXIT_OK } else { EXIT_FALSE };
            Ok((to_json_bytes(&report), code))
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::usage("io", format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path, format: GraphFormat) -> Result<OperatorGraph, Failure> {
    let bytes = read_file(path)?;
    load_graph(bytes.as_slice(), format).map_err(|e| Failure::usage("parse", format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::usage("io", format!("{}: {e}", path.display())))
}

fn analyze(g: &OperatorGraph, tol: &ToleranceConfig) -> Outcome {
    let out = AnalyzeOutput {
        dimension: g.dimension(),
        points: g.len(),
        monotone: monotone_check(g, tol),
        bimonotone: bimonotone_check(g, tol),
        paramonotone: paramonotone_check(g, tol),
        constant_on_domain: constant_on_domain_check(g, tol),
    };
    let code = if out.bimonotone.verdict { EXIT_OK } else { EXIT_FALSE };
    Ok((to_json_bytes(&out), code))
}

fn run_decompose(g: &OperatorGraph, options: DecomposeOptions, out: Option<&Path>, tol: &ToleranceConfig) -> Outcome {
    match decompose(g, options, tol) {
        Ok(dec) => {
            let bytes = to_json_bytes(&SkewDecompositionDoc::from(&dec));
            if let Some(path) = out {
                let mut file_bytes = bytes.clone();
                file_bytes.push(b'\n');
                write_file(path, &file_bytes)?;
            }
            Ok((bytes, EXIT_OK))
        }
        Err(e) => {
            let (kind, report, code) = match &e {
                DecomposeError::NotBimonotone(r) => ("not_bimonotone", Some(r.clone()), EXIT_FALSE),
                DecomposeError::NotSingleValued(r) => ("not_single_valued", Some(r.clone()), EXIT_FALSE),
                DecomposeError::Inconsistent { .. } | DecomposeError::NotSkew { .. } => ("tolerance", None, EXIT_FALSE),
                DecomposeError::BasepointOutOfRange { .. } => ("usage", None, EXIT_USAGE),
                _ => ("internal", None, EXIT_FALSE),
            };
            Err(Failure {
                code,
                kind,
                message: e.to_string(),
                report,
            })
        }
    }
}

/// `dir/name.json` -> `dir/name.truth.json`.
pub fn truth_path(graph_path: &Path) -> PathBuf {
    let stem = graph_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    graph_path.with_file_name(format!("{stem}.truth.json"))
}

fn generate(spec_path: &Path, out: &Path, seed: Option<u64>, format: GraphFormat) -> Outcome {
    let text = read_file(spec_path)?;
    let mut spec: FixtureSpec =
        serde_json::from_slice(&text).map_err(|e| Failure::usage("parse", format!("{}: {e}", spec_path.display())))?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let fixture = make_fixture(&spec).map_err(|e| Failure::usage("spec", e))?;
    let truth = truth_path(out);
    write_file(out, &save_graph(&fixture.graph, format))?;
    let mut truth_bytes = to_json_bytes(&FixtureTruthDoc::new(&spec, &fixture.truth));
    truth_bytes.push(b'\n');
    write_file(&truth, &truth_bytes)?;
    let doc = GenerateOutput {
        graph: out.display().to_string(),
        truth: truth.display().to_string(),
        dimension: fixture.graph.dimension(),
        points: fixture.graph.len(),
    };
    Ok((to_json_bytes(&doc), EXIT_OK))
}
