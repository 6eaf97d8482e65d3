//! Command-line front end: reads a JSON system description, runs one
//! command and writes a JSON report.

mod config;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use reduced_topos::{set_epsilon, DEFAULT_MAX_ENUM};

use crate::report::Report;

#[derive(Parser, Debug)]
#[command(
    name = "reduced-topos",
    version,
    about = "Context posets, selector sheaves and Born-rule truth values"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// System description (JSON).
    #[arg(long, global = true)]
    config: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Numerical tolerance for every comparison.
    #[arg(long, global = true, default_value_t = 1e-9)]
    epsilon: f64,
    /// Bound on exhaustive enumerations; overrides `max_enum` in the config.
    #[arg(long, global = true)]
    max_enum: Option<usize>,
    /// Run independent jobs on a thread pool.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true", default_value_t = false, action = clap::ArgAction::Set)]
    parallel: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Context poset, selector validation and spectrum summary.
    Build,
    /// Truth-value tables per proposition, state and level.
    Valuate,
    /// Born probabilities and their sheaf-theoretic counterparts.
    Probability,
    /// Every enabled invariant suite.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::Build => "build",
            Self::Valuate => "valuate",
            Self::Probability => "probability",
            Self::Verify => "verify",
        }
    }
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.epsilon.is_finite() && cli.epsilon > 0.0) {
        return input_error("--epsilon must be a positive number");
    }
    set_epsilon(cli.epsilon);
    let Some(path) = cli.config.as_deref() else {
        return input_error("--config PATH is required");
    };
    let cfg = match config::load(path) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let bound = cli.max_enum.or(cfg.max_enum).unwrap_or(DEFAULT_MAX_ENUM);
    let sys = match cfg.resolve() {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };

    let mut rep = Report {
        command: cli.command.name().into(),
        epsilon: cli.epsilon,
        max_enum: bound,
        ..Default::default()
    };
    rep.build = Some(report::build(&sys));
    let mut failed = false;
    match cli.command {
        Command::Build => {}
        Command::Valuate => match report::valuate(&sys, cli.parallel) {
            Ok(rows) => rep.valuations = Some(rows),
            Err(e) => return input_error(e),
        },
        Command::Probability => match report::probability(&sys, cli.parallel) {
            Ok(rows) => rep.probabilities = Some(rows),
            Err(e) => return input_error(e),
        },
        Command::Verify => {
            let v = report::verify(&sys, &cfg.verify, bound, cli.parallel);
            failed = !v.passed;
            rep.verification = Some(v);
        }
    }

    let mut text = serde_json::to_string_pretty(&rep).expect("report serializes");
    text.push('\n');
    let written = match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {p}: {e}")),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        return input_error(e);
    }
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
