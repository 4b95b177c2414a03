//! `flagvol`: command-line front end for the flagvol library.
//!
//! Every subcommand reads an optional JSON document (`--input`, `-` for
//! stdin) and writes CSV or an aligned table (`veronese` writes a document).
//! Failures print one JSON line `{"error": kind, "message": ...}` on stderr
//! and exit nonzero.

mod commands;
mod document;
mod output;
mod selftest;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use document::Document;
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "flagvol", version, about = "Borel cocycle, ideal volumes and rigidity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Input document (JSON); `-` reads stdin.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file; stdout by default.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Ambient dimension, overriding the document.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Orbit word length L.
    #[arg(long, global = true)]
    pub words: Option<usize>,
    /// Number of sequence steps K.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Signed volume of the ideal tetrahedron on four points.
    Volume,
    /// Borel cocycle of four flags.
    Borel,
    /// Veronese flags of the given points, as a document.
    Veronese,
    /// Orbit of a tetrahedron under its face reflections.
    Orbit,
    /// Maximize |B_n| and recover the normalizing element.
    Maximize,
    /// Synthetic representation sequence with per-step recovery diagnostics.
    Propagate,
    /// Compare the partition bounds with the full bound for every partition of n.
    PartitionCheck,
    /// Reduced run of the invariant suite.
    Selftest,
}

#[derive(Debug)]
pub struct CliError {
    kind: String,
    message: String,
    code: u8,
}

impl CliError {
    pub fn schema(message: impl Into<String>) -> Self {
        Self {
            kind: "schema".into(),
            message: message.into(),
            code: 3,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: "io".into(),
            message: message.into(),
            code: 4,
        }
    }

    pub fn module(e: flagvol::error::Error) -> Self {
        Self {
            kind: e.kind().into(),
            message: e.to_string(),
            code: 1,
        }
    }

    pub fn context(mut self, ctx: impl std::fmt::Display) -> Self {
        self.message = format!("{ctx}: {}", self.message);
        self
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: "usage".into(),
            message: message.into(),
            code: 2,
        }
    }

    fn report(&self) {
        let record = serde_json::json!({ "error": self.kind, "message": self.message });
        eprintln!("{record}");
    }
}

fn read_document(opts: &Options) -> Result<Document, CliError> {
    let Some(path) = &opts.input else {
        return Ok(Document::default());
    };
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::io(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    }
    Document::parse(&text).map_err(|e| e.context(path.display()))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let opts = &cli.opts;
    let doc = read_document(opts)?;
    let mut out: Box<dyn Write> = match &opts.output {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let (table, ok) = match cli.command {
        Command::Volume => (commands::volume(&doc)?, true),
        Command::Borel => (commands::borel(&doc, opts)?, true),
        Command::Orbit => (commands::orbit(&doc, opts)?, true),
        Command::Maximize => (commands::maximize(&doc, opts)?, true),
        Command::Propagate => (commands::propagate(&doc, opts)?, true),
        Command::PartitionCheck => (commands::partition_check(&doc, opts)?, true),
        Command::Selftest => selftest::run(opts.seed.unwrap_or(0)),
        Command::Veronese => {
            let flags = commands::veronese(&doc, opts)?;
            flags.write_to(&mut out)?;
            writeln!(out).and_then(|_| out.flush()).map_err(|e| CliError::io(e.to_string()))?;
            return Ok(true);
        }
    };
    table
        .write(&mut out, opts.format)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(e.to_string()))?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            CliError::usage(first.trim_start_matches("error: ")).report();
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            CliError {
                kind: "selftest".into(),
                message: "one or more checks failed".into(),
                code: 1,
            }
            .report();
            ExitCode::from(1)
        }
        Err(e) => {
            e.report();
            ExitCode::from(e.code)
        }
    }
}
