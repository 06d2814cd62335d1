//! `qamp` — construct and verify amplified layered Hamiltonians.
//!
//! Subcommands:
//!
//! * `amplify`  — build the walk / tensor / single-shot operator and write
//!   its structural schema (base + graphs + t, never expanded terms).
//! * `spectrum` — extremal eigenvalue of a Hamiltonian or amplified schema,
//!   by dense factorisation or matrix-free Lanczos.
//! * `verify`   — check completeness, the composite soundness bound
//!   (optionally on the whole audit grid), the moment identities, and the
//!   single-shot floor; emit a verification ledger.
//! * `iterate`  — amplify-and-materialise repeatedly, checking each round.
//! * `circuit`  — compile one walk term's phase-application circuit.
//! * `corpus`   — regenerate the built-in test corpus for a seed.
//!
//! Machine-readable output (artifact or ledger) goes to stdout or `--out`;
//! human summaries go to stderr.  Exit codes: 0 when every asserted check
//! passes, 1 on check failures (failing record ids on stderr), 2 on schema
//! or parameter violations.  Identical inputs and seeds produce
//! byte-identical output.
//!
//! The CLI is single-threaded; the `QAMP_THREADS` environment variable is
//! validated and capped at 1.

mod commands;
mod jsonio;
mod ledger;

use clap::{Parser, Subcommand, ValueEnum};

/// How a command run failed.
pub enum Failure {
    /// Input, schema, or parameter violation → exit 2.
    Input(String),
    /// Asserted checks failed before a ledger could be emitted → exit 1.
    Checks(Vec<String>),
}

/// Ledger output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Machine-readable JSON (default).
    Json,
    /// Fixed-width check table.
    Table,
}

#[derive(Parser)]
#[command(
    name = "qamp",
    version,
    about = "Construct and verify amplified layered local Hamiltonians"
)]
struct Cli {
    /// Output format for ledgers on stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Amplify a layered Hamiltonian and write the structural schema.
    Amplify(commands::AmplifyArgs),
    /// Compute the extremal eigenvalue of a Hamiltonian or amplified operator.
    Spectrum(commands::SpectrumArgs),
    /// Check completeness, soundness, moment, and floor bounds; emit a ledger.
    Verify(commands::VerifyArgs),
    /// Amplify and materialise repeatedly, checking each round.
    Iterate(commands::IterateArgs),
    /// Compile the phase-application circuit of one walk term.
    Circuit(commands::CircuitArgs),
    /// Regenerate the built-in test corpus for a seed.
    Corpus(commands::CorpusArgs),
}

fn run() -> Result<i32, Failure> {
    if let Ok(raw) = std::env::var("QAMP_THREADS") {
        let n: usize = raw.trim().parse().map_err(|_| {
            Failure::Input(format!("QAMP_THREADS must be a positive integer, got '{raw}'"))
        })?;
        if n == 0 {
            return Err(Failure::Input("QAMP_THREADS must be at least 1".into()));
        }
        if n > 1 {
            eprintln!("note: single-threaded build; QAMP_THREADS={n} capped to 1");
        }
    }

    let cli = Cli::parse();
    match &cli.command {
        Cmd::Amplify(args) => commands::cmd_amplify(args),
        Cmd::Spectrum(args) => commands::cmd_spectrum(args, cli.format),
        Cmd::Verify(args) => commands::cmd_verify(args, cli.format),
        Cmd::Iterate(args) => commands::cmd_iterate(args, cli.format),
        Cmd::Circuit(args) => commands::cmd_circuit(args),
        Cmd::Corpus(args) => commands::cmd_corpus(args),
    }
}

fn main() {
    let code = match run() {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Checks(failing)) => {
            eprintln!("check failure: {}", failing.join(", "));
            1
        }
    };
    std::process::exit(code);
}
