//! Driver behind the `schottky` binary.
//!
//! Exit codes: 0 on success, 1 when any checked quantity exceeds its
//! tolerance (or the group fails validation), 2 on input errors.

pub mod args;
pub mod cache;
pub mod commands;
pub mod record;
pub mod verify;

use args::{Cli, Command, GlobalArgs};
use cache::Cache;
use clap::Parser;
use commands::Context;
use record::{RecordSink, ResultRecord};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::ffi::OsString;
use std::fs::OpenOptions;
use std::io::{self, Write};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// A diagnostic naming the flag that controls the violated precondition.
#[derive(Debug, Error)]
#[error("{message} (see {flag})")]
pub struct CliError {
    pub flag: &'static str,
    pub message: String,
}

impl CliError {
    pub fn input(flag: &'static str, message: String) -> Self {
        Self { flag, message }
    }

    pub fn module(flag: &'static str, e: schottky_core::Error) -> Self {
        Self {
            flag,
            message: e.to_string(),
        }
    }
}

/// Everything that determines a run's records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub global: GlobalArgs,
    pub command: Command,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        Self {
            global: c.global,
            command: c.command,
        }
    }
}

pub(crate) fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parse `argv`, execute, write records; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let config = RunConfig::from(cli);
    match execute(&config) {
        Ok(records) => match emit(&config.global, &records) {
            Ok(()) if records.iter().any(ResultRecord::failed) => EXIT_FAILED,
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: cannot write records: {e} (see --output)");
                EXIT_INPUT
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        // a second configuration in one process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

/// Compute the records of a run without writing them.
pub fn execute(config: &RunConfig) -> Result<Vec<ResultRecord>, CliError> {
    configure_threads(config.global.threads);
    let path = config
        .global
        .group
        .as_deref()
        .ok_or_else(|| CliError::input("--group", "a group file is required".into()))?;
    let cache = Cache::new(config.global.cache_dir.as_deref(), config.global.no_cache);
    let ctx = Context::load(path, cache)?;
    match &config.command {
        Command::GroupValidate => Ok(commands::group_validate(&ctx)),
        Command::Classes(a) => commands::classes(&ctx, a),
        Command::ZetaEval(a) => commands::zeta_eval(&ctx, a),
        Command::ZetaZeros(a) => commands::zeta_zeros(&ctx, a),
        Command::Delta(a) => commands::delta(&ctx, a),
        Command::LGamma(a) => commands::l_gamma(&ctx, a),
        Command::TraceCompare(a) => commands::trace_compare(&ctx, a),
        Command::ResolventT5(a) => commands::resolvent_t5(&ctx, a),
        Command::VerifyAll(a) => verify::verify_all(&ctx, a),
    }
}

fn emit(global: &GlobalArgs, records: &[ResultRecord]) -> io::Result<()> {
    match &global.output {
        Some(path) => {
            let file = OpenOptions::new().create(true).append(true).open(path)?;
            let has_content = file.metadata()?.len() > 0;
            write_all(RecordSink::new(io::BufWriter::new(file), global.format, has_content), records)
        }
        None => write_all(RecordSink::new(io::stdout().lock(), global.format, false), records),
    }
}

fn write_all<W: Write>(mut sink: RecordSink<W>, records: &[ResultRecord]) -> io::Result<()> {
    records.iter().try_for_each(|r| sink.write(r))
}
