//! Library side of the `rsumset` binary: argument parsing, dispatch,
//! rendering and JSONL experiment records.

mod args;
mod commands;
mod record;
mod render;

use std::ffi::OsString;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Format;
use args::{Cli, Command};
pub use record::ExperimentRecord;

/// Exit code, standard output and standard error of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: String) -> Outcome {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: message,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl From<rsumset::Error> for CliError {
    fn from(e: rsumset::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

/// Runs one command line (including the program name) and captures its output.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<String> = argv
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome::usage(text),
            };
        }
    };
    with_jobs(cli.jobs, || dispatch(&cli, &argv))
}

fn with_jobs<F: FnOnce() -> Outcome + Send>(jobs: Option<usize>, f: F) -> Outcome {
    match jobs {
        Some(0) => Outcome::usage("error: --jobs must be positive\n".into()),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(e) => Outcome::usage(format!("error: cannot start {n} workers: {e}\n")),
        },
        None => f(),
    }
}

fn dispatch(cli: &Cli, argv: &[String]) -> Outcome {
    if let Command::Replay(r) = &cli.command {
        return record::replay(&r.file, cli.format);
    }
    let format = match &cli.command {
        Command::Stability(s) => s.report.unwrap_or(cli.format),
        _ => cli.format,
    };
    let started = record::now_secs();
    let clock = Instant::now();
    let globals = commands::Globals {
        seed: cli.seed,
        budget: cli.budget,
    };
    let payload = match commands::execute(&cli.command, &globals) {
        Ok(p) => p,
        Err(e) => {
            return Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("{e}\n"),
            }
        }
    };
    let mut stderr = String::new();
    if let Some(path) = &cli.record {
        let rec = ExperimentRecord::new(
            command_name(&cli.command),
            argv,
            cli.seed,
            payload.result.clone(),
            started,
            clock.elapsed().as_millis() as u64,
        );
        if let Err(e) = rec.append(path) {
            return Outcome::usage(format!("{e}\n"));
        }
        stderr.push_str(&format!("recorded {}\n", rec.id));
    }
    if payload.failed {
        stderr.push_str("verification failed\n");
    }
    Outcome {
        code: if payload.failed { 1 } else { 0 },
        stdout: render::render(&payload, format),
        stderr,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Construct(_) => "construct",
        Command::Minimize(_) => "minimize",
        Command::Scan(_) => "scan",
        Command::Verify(_) => "verify",
        Command::Rectify(_) => "rectify",
        Command::Stability(_) => "stability",
        Command::Replay(_) => "replay",
    }
}

/// Re-executes a recorded argument list and returns the result payload.
fn rerun(argv: &[String]) -> Result<serde_json::Value, CliError> {
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let globals = commands::Globals {
        seed: cli.seed,
        budget: cli.budget,
    };
    commands::execute(&cli.command, &globals).map(|p| p.result)
}

#[cfg(test)]
mod tests;
