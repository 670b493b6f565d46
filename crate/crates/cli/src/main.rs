//! `enclosure`: forward simulation, cone probing, visibility scans and verification.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use enclosure::Error;
use serde_json::{json, Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "enclosure", version, about = "Enclosure-method reconstruction of sound-hard obstacles")]
struct Cli {
    /// JSON file with default option values; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for matrix assembly and scans.
    #[arg(long, global = true, env = "ENCLOSURE_THREADS")]
    threads: Option<usize>,
    /// Seed for every randomized step [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize the far-field matrix of a scene.
    Forward(commands::ForwardArgs),
    /// Indicator trace of one cone probe.
    Probe(commands::ProbeArgs),
    /// Visibility map over a grid of apexes.
    Scan(commands::ScanArgs),
    /// Run the invariant suites.
    Verify(commands::VerifyArgs),
    /// Evaluate the special functions at a point.
    MlEval(commands::MlEvalArgs),
}

/// 0 success, 1 verification or numerical failure, 2 input error, 3 consistency error.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Consistency(_) => 3,
        Error::Accuracy(_) | Error::Quadrature(_) | Error::NonFinite(_) | Error::Singularity(_) => 1,
        _ => 2,
    }
}

fn report(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message }, "exit_code": code }));
    ExitCode::from(code)
}

fn run(cli: Cli) -> enclosure::Result<i32> {
    let file = match &cli.config {
        Some(p) => config::load(p)?,
        None => Map::<String, Value>::new(),
    };
    let threads = cli.threads.or(config::global(&file, "threads")?);
    let seed = cli.seed.or(config::global(&file, "seed")?).unwrap_or(0);
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::Precondition("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Error::Precondition(e.to_string()))?;
    }
    match cli.command {
        Command::Forward(a) => commands::forward(config::merge(&a, &file)?, seed),
        Command::Probe(a) => commands::probe(config::merge(&a, &file)?),
        Command::Scan(a) => commands::scan(config::merge(&a, &file)?),
        Command::Verify(a) => commands::verify(config::merge(&a, &file)?, seed),
        Command::MlEval(a) => commands::ml_eval(config::merge(&a, &file)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return report("usage", e.to_string().trim(), 2),
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => report(e.kind(), &e.to_string(), exit_code(&e)),
    }
}
