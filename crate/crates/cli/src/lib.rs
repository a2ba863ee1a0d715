//! `mlmask` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data or integrity error,
//! 3 infeasible request. Diagnostics go to stderr; data goes to files or stdout.
//! Every output carries the resolved run configuration (subcommand, seed and every
//! flag except `--output`, `--threads` and `--config`) so it can be regenerated.

pub mod args;
pub mod commands;
pub mod config;
pub mod figures;

use std::ffi::OsString;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use mlmask_core::Error;
use serde_json::Value;

use args::{Cli, Command, MetricCommand, StatsCommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_USAGE,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Parse { .. }
        | Error::Binary(_)
        | Error::Range { .. }
        | Error::Integrity(_)
        | Error::UndefinedScore(_)
        | Error::ContractViolation(_)
        | Error::Degenerate(_)
        | Error::Io(_) => EXIT_DATA,
    }
}

/// Resolved configuration recorded in every output.
pub fn run_config(cli: &Cli) -> Value {
    let args = match &cli.command {
        Command::Pack(a) => serde_json::to_value(a),
        Command::PmiBuild(a) => serde_json::to_value(a),
        Command::Mask(a) => serde_json::to_value(a),
        Command::Stats { which } => match which {
            StatsCommand::Coverage(a) | StatsCommand::Spans(a) => serde_json::to_value(a),
        },
        Command::Ppl(a) => serde_json::to_value(a),
        Command::Pll(a) => serde_json::to_value(a),
        Command::Metric { which } => match which {
            MetricCommand::Normalize(a) | MetricCommand::Relative(a) => serde_json::to_value(a),
        },
    }
    .expect("argument structs serialize");
    let mut map = match args {
        Value::Object(m) => m,
        _ => unreachable!("argument structs serialize to objects"),
    };
    map.insert("subcommand".into(), cli.command.name().into());
    map.insert("seed".into(), cli.seed.into());
    Value::Object(map)
}

fn dispatch(cli: &Cli) -> Result<(), Error> {
    let rc = run_config(cli);
    let seed = cli.seed;
    match &cli.command {
        Command::Pack(a) => commands::pack(a, &rc),
        Command::PmiBuild(a) => commands::pmi_build(a, &rc),
        Command::Mask(a) => commands::mask(a, seed, &rc),
        Command::Stats { which } => match which {
            StatsCommand::Coverage(a) => commands::stats_coverage(a, seed, &rc),
            StatsCommand::Spans(a) => commands::stats_spans(a, seed, &rc),
        },
        Command::Ppl(a) => commands::ppl(a, seed, &rc),
        Command::Pll(a) => commands::pll(a, &rc),
        Command::Metric { which } => match which {
            MetricCommand::Normalize(a) => commands::metric(a, true, &rc),
            MetricCommand::Relative(a) => commands::metric(a, false, &rc),
        },
    }
}

fn parse(argv: Vec<OsString>) -> Result<Cli, i32> {
    let argv = match config::config_path(&argv) {
        Some(path) => {
            let merged = config::load(Path::new(&path)).and_then(|c| config::merge(argv, &c));
            match merged {
                Ok(a) => a,
                Err(e) => {
                    eprintln!("mlmask: {e}");
                    return Err(exit_code(&e));
                }
            }
        }
        None => argv,
    };
    Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
            _ => EXIT_USAGE,
        }
    })
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cli = match parse(argv.into_iter().map(Into::into).collect()) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("mlmask: --threads must be at least 1");
            return EXIT_USAGE;
        }
        pool = pool.num_threads(n);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(e) => Err(Error::Config(format!("cannot start worker pool: {e}"))),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("mlmask: {e}");
            exit_code(&e)
        }
    }
}
