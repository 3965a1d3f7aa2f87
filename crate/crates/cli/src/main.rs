//! `lvnm`: build, decompose, certify and simulate entanglement witnesses.
//!
//! Every command prints one JSON object `{status, code?, payload, diagnostics}`
//! to stdout (or to `--output`). Exit codes: 0 ok, 1 i/o, 2 validation,
//! 3 search failed.

mod commands;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lvnm::simulate::Allocation;

use commands::{DecomposeOptions, Mode};
use output::{to_json, CommandResult, Failure, EXIT_IO, EXIT_VALIDATION};

#[derive(Parser)]
#[command(name = "lvnm", version, about = "Entanglement witnesses measured with local von Neumann measurements")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct WitnessArg {
    /// Catalog name: w0, phi, ghz, w1, w2.
    witness: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 4)]
    max: usize,
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    #[arg(long, default_value_t = 2002)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Operator, trace and Pauli support of a catalog witness.
    Witness(WitnessArg),
    /// Decompose a witness into local measurement settings.
    Decompose {
        #[command(flatten)]
        witness: WitnessArg,
        #[arg(long, value_enum, default_value = "paper")]
        mode: Mode,
        /// Cover candidates: `xyz` for all parties or `xz,z,xyz` per party.
        #[arg(long, default_value = "xyz")]
        axes: String,
        /// Use the greedy cover instead of the exact one.
        #[arg(long)]
        greedy: bool,
        /// Hand-built decomposition variant (`anton`, `sanpera5` for phi).
        #[arg(long)]
        variant: Option<String>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Check a decomposition file against a witness.
    Verify {
        #[command(flatten)]
        witness: WitnessArg,
        decomposition: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Lower bound on the number of settings.
    Certify {
        #[command(flatten)]
        witness: WitnessArg,
        #[arg(long, default_value_t = lvnm::certify::DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = lvnm::certify::DEFAULT_SEED)]
        seed: u64,
    },
    /// Witness value and verdict on a density-matrix file.
    Classify {
        #[command(flatten)]
        witness: WitnessArg,
        state: PathBuf,
    },
    /// Shot-limited estimate of the witness value.
    Simulate {
        #[command(flatten)]
        witness: WitnessArg,
        state: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Decomposition file; defaults to the hand-built one.
        #[arg(long)]
        decomposition: Option<PathBuf>,
        #[arg(long)]
        variant: Option<String>,
        /// `uniform` or `weight-proportional`.
        #[arg(long, default_value = "uniform")]
        allocation: String,
    },
    /// White-noise threshold of a witness for a pure state.
    Threshold {
        #[command(flatten)]
        witness: WitnessArg,
        /// ghz, w, psi-minus, schmidt, or a pure-state file.
        state: String,
        #[arg(long, allow_hyphen_values = true)]
        state_alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        state_beta: Option<f64>,
    },
    /// Density-matrix file for a named state.
    State {
        /// ghz, w, psi-minus, schmidt, mixed2, mixed3.
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        /// Mix as `p |psi><psi| + (1 - p) 1/2^n`.
        #[arg(long)]
        noise: Option<f64>,
    },
}

fn witness_of(w: &WitnessArg) -> Result<lvnm::witnesses::Witness, Failure> {
    commands::load_witness(&w.witness, w.alpha, w.beta)
}

fn run(command: &Command) -> commands::CmdResult {
    match command {
        Command::Witness(w) => commands::cmd_witness(&witness_of(w)?),
        Command::Decompose {
            witness,
            mode,
            axes,
            greedy,
            variant,
            search,
        } => {
            let opts = DecomposeOptions {
                mode: *mode,
                axes,
                greedy: *greedy,
                max_settings: search.max,
                restarts: search.restarts,
                seed: search.seed,
                variant: variant.as_deref(),
                alpha: witness.alpha,
                beta: witness.beta,
            };
            commands::cmd_decompose(&witness_of(witness)?, &opts)
        }
        Command::Verify {
            witness,
            decomposition,
            tol,
        } => commands::cmd_verify(&witness_of(witness)?, decomposition, *tol),
        Command::Certify {
            witness,
            restarts,
            seed,
        } => commands::cmd_certify(&witness_of(witness)?, *restarts, *seed),
        Command::Classify { witness, state } => commands::cmd_classify(&witness_of(witness)?, state),
        Command::Simulate {
            witness,
            state,
            shots,
            seed,
            decomposition,
            variant,
            allocation,
        } => {
            let opts = DecomposeOptions {
                mode: Mode::Paper,
                axes: "xyz",
                greedy: false,
                max_settings: 0,
                restarts: 0,
                seed: *seed,
                variant: variant.as_deref(),
                alpha: witness.alpha,
                beta: witness.beta,
            };
            let allocation = Allocation::parse(allocation)?;
            commands::cmd_simulate(&witness_of(witness)?, state, decomposition.as_deref(), &opts, *shots, *seed, allocation)
        }
        Command::Threshold {
            witness,
            state,
            state_alpha,
            state_beta,
        } => {
            let psi = commands::pure_state(state, *state_alpha, *state_beta)?;
            commands::cmd_threshold(&witness_of(witness)?, &psi, state)
        }
        Command::State { name, alpha, beta, noise } => commands::cmd_state(name, *alpha, *beta, *noise),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, mut exit) = CommandResult::from_outcome(run(&cli.command));
    let bytes = match to_json(&result) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("lvnm: cannot encode result: {e}");
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &bytes) {
                eprintln!("lvnm: {}: {e}", path.display());
                exit = EXIT_IO;
            }
        }
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    ExitCode::from(exit as u8)
}
