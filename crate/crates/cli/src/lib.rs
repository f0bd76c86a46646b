//! The `dtou` command line: offline validation and reasoning, the HTTP
//! service, and the scaling benchmark.
//!
//! Reports go to stdout and diagnostics to stderr. The exit status is
//! 0 on success or permitted usage, 1 when conflicts are found, 2 on a
//! structural error in some input and 3 on an I/O error.

mod bench;
mod check;
mod serve;
mod validate;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dtou_bench::Variable;
use dtou_core::reasoner::Parallelism;
use dtou_core::{parse_turtle, Graph, ReasonerOptions};

#[derive(Debug, Parser)]
#[command(name = "dtou", version, about = "Check and propagate data terms of use")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse every file and bind the policies it describes.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Assemble a knowledge base from files and run one reasoning task.
    Check(CheckArgs),
    /// Run the HTTP compliance service over a policy store.
    Serve(ServeArgs),
    /// Time the reasoning tasks over generated policies and write a CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Conformance,
    Obligations,
    Derive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Turtle,
}

#[derive(Debug, Args)]
pub struct ReasonerArgs {
    /// Let a provided subclass satisfy a required descriptor.
    #[arg(long)]
    pub rdfs: bool,
    /// Evaluate rule bodies on the rayon thread pool.
    #[arg(long)]
    pub parallel: bool,
}

impl ReasonerArgs {
    fn options(&self) -> ReasonerOptions {
        ReasonerOptions {
            rdfs_closure: self.rdfs,
            parallelism: if self.parallel { Parallelism::Parallel } else { Parallelism::Sequential },
            ..ReasonerOptions::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub app: PathBuf,
    /// Data policy files, or directories whose `.ttl` files are all read.
    #[arg(long, required = true, num_args = 1..)]
    pub data: Vec<PathBuf>,
    #[arg(long)]
    pub context: PathBuf,
    #[arg(long, value_enum, default_value_t = TaskArg::Conformance)]
    pub task: TaskArg,
    /// Treat an input without a data policy as a denial.
    #[arg(long)]
    pub strict: bool,
    /// Defaults to json for reports and turtle for derived policies.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Extra `rdfs:subClassOf` axioms.
    #[arg(long)]
    pub vocabulary: Option<PathBuf>,
    /// Derive only this output port.
    #[arg(long)]
    pub output_port: Option<String>,
    /// Data uri of the derived policy; needs `--output-port`.
    #[arg(long, requires = "output_port")]
    pub target: Option<String>,
    #[command(flatten)]
    pub reasoner: ReasonerArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "DTOU_STORE")]
    pub store: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub listen: String,
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub vocabulary: Option<PathBuf>,
    #[command(flatten)]
    pub reasoner: ReasonerArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// A term count such as `data:numAttributes` or `app:numData`.
    #[arg(long)]
    pub variable: Variable,
    #[arg(long, value_delimiter = ',', default_values_t = dtou_bench::DEFAULT_VALUES)]
    pub values: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-task limit in seconds; overruns become timeout rows.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    #[command(flatten)]
    pub reasoner: ReasonerArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    Conflicts = 1,
    Structural = 2,
    Io = 3,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Structural(String),
    #[error("{0}")]
    Io(String),
}

impl Failure {
    pub fn exit(&self) -> Exit {
        match self {
            Failure::Structural(_) => Exit::Structural,
            Failure::Io(_) => Exit::Io,
        }
    }

    fn structural(e: impl std::fmt::Display) -> Self {
        Failure::Structural(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Runs one command, writing reports to `out` and diagnostics to `err`.
pub fn run(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let result = match &config.command {
        Command::Validate { files } => Ok(validate::run(files, out, err)),
        Command::Check(args) => check::run(args, out, err),
        Command::Serve(args) => serve::run(args, err),
        Command::Bench(args) => bench::run(args, out, err),
    };
    result.unwrap_or_else(|f| {
        let _ = writeln!(err, "error: {f}");
        f.exit()
    })
}

pub(crate) fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_turtle(&text, None).map_err(|e| Failure::Structural(format!("{}: {e}", path.display())))
}

/// Expands directories to their `.ttl` files, sorted by name.
pub(crate) fn data_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut out = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut files = Vec::new();
            for entry in std::fs::read_dir(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))? {
                let p = entry?.path();
                if p.is_file() && p.extension().is_some_and(|x| x == "ttl") {
                    files.push(p);
                }
            }
            files.sort();
            out.extend(files);
        } else {
            out.push(path.clone());
        }
    }
    Ok(out)
}
