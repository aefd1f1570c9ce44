//! `asymod`: check, search and normalize proofs in asymmetric deduction
//! modulo a rewrite system.
//!
//! Exit codes: 0 valid or holds, 1 invalid or refuted, 2 unknown or out of
//! budget, 3 usage error.

mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use asymod_core::rewrite::Budget;
use asymod_core::suites::Suite;
use clap::{Parser, Subcommand, ValueEnum};

use commands::{Check, Engine, Mode, UsageError};

#[derive(Parser)]
#[command(name = "asymod", version, about = "Deduction modulo rewriting, with asymmetric side conditions")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Write the reduction trace (JSON) to this file.
    #[arg(long, global = true, value_name = "FILE")]
    trace: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check every node of the proof in a problem file.
    Check {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        budget: Option<usize>,
        /// Include the reductions that confirm side conditions.
        #[arg(long)]
        witnesses: bool,
    },
    /// Decide an atomic sequent.
    ProveAtomic {
        #[arg(long)]
        problem: String,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Eliminate the cuts of a proof.
    Eliminate {
        #[arg(long)]
        problem: String,
        #[arg(long, value_enum)]
        engine: Engine,
        /// `rule-order`, `scripted` (the problem's policy block) or a file.
        #[arg(long)]
        policy: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Analyse the rewrite system on a finite universe of ground terms.
    Analyze {
        #[arg(long)]
        problem: String,
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long, default_value_t = 3)]
        universe_depth: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Run a property suite over random ground systems.
    RandomTest {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Newman,
    #[value(alias = "equivalence")]
    MainEquivalence,
    #[value(name = "prop6", alias = "local-confluence")]
    LocalConfluence,
    #[value(name = "prop7", alias = "termination")]
    Termination,
    #[value(name = "def1", alias = "symmetric")]
    Symmetric,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Newman => Suite::Newman,
            SuiteArg::MainEquivalence => Suite::Equivalence,
            SuiteArg::LocalConfluence => Suite::LocalConfluence,
            SuiteArg::Termination => Suite::Termination,
            SuiteArg::Symmetric => Suite::Symmetric,
        }
    }
}

fn budget(n: Option<usize>) -> Budget {
    n.map(Budget::objects).unwrap_or_default()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let run = match &cli.command {
        Command::Check { problem, budget: b, witnesses } => commands::check(problem, budget(*b), *witnesses),
        Command::ProveAtomic { problem, mode, budget: b } => commands::prove_atomic(problem, *mode, budget(*b)),
        Command::Eliminate { problem, engine, policy, steps, budget: b } => {
            commands::eliminate(problem, *engine, policy.as_deref(), *steps, budget(*b))
        }
        Command::Analyze { problem, check, universe_depth, budget: b } => {
            commands::analyze(problem, *check, *universe_depth, budget(*b))
        }
        Command::RandomTest { suite, count, seed } => commands::random_test((*suite).into(), *count, *seed),
    };
    let report = match run {
        Ok(r) => r,
        Err(UsageError(msg)) => {
            eprintln!("asymod: {msg}");
            return ExitCode::from(3);
        }
    };
    if let Some(file) = &cli.trace {
        let json = serde_json::to_string_pretty(&report.trace).expect("traces serialize");
        if let Err(e) = std::fs::write(file, json + "\n") {
            eprintln!("asymod: {file}: {e}");
            return ExitCode::from(3);
        }
    }
    let out = match cli.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    };
    // a closed pipe (`| head`) is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    ExitCode::from(report.exit_code as u8)
}
