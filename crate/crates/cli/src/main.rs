//! `endospec`: spectra of free group endomorphisms and their restrictions to
//! invariant subgroups.
//!
//! Exit codes: 0 on success, 1 on input or domain errors, 2 when `selftest`
//! finds a property violation.

mod commands;
mod dsl;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use endospec::exec::Execution;
use endospec::selftest::{Trials, DEFAULT_SEED};

use commands::{CommandError, Report};
use dsl::{parse_spec, ProblemSpec};

#[derive(Parser)]
#[command(
    name = "endospec",
    version,
    about = "Eigenvalues of free group endomorphisms restricted to invariant subgroups"
)]
struct Cli {
    /// Problem spec file; standard input when omitted or `-`.
    #[arg(short, long, global = true)]
    input: Option<PathBuf>,
    /// Print a JSON object instead of text. Polynomials are coefficient
    /// arrays with the constant term first; matrices are row-major.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum of the abelianized endomorphism.
    Eigen,
    /// Matrix and spectrum of the endomorphism restricted to H.
    Restrict,
    /// Check that the spectrum of phi lies in the spectrum of its restriction to H.
    CheckContainment,
    /// Whether every eigenvalue of the restriction to H is a root of unity.
    Casson,
    /// Alexander polynomials of the mapping torus (and of the one for H) via Fox calculus.
    Alexander,
    /// Word-length growth under iteration.
    Growth {
        #[arg(long, default_value_t = 10)]
        kmax: usize,
    },
    /// Eventual image, its rank sequence, and the induced injective map.
    EventualKernel,
    /// A characteristic finite-index subgroup and its free basis.
    InvariantSubgroup {
        /// Take the kernel of F to (Z/N)^r, or with --total, to Z/N.
        #[arg(long = "mod", value_name = "N")]
        modulus: u64,
        /// Use the total exponent sum instead of the full homology class.
        #[arg(long)]
        total: bool,
        /// Rank of the free group; read from the spec when omitted.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Run the randomized property suites.
    Selftest {
        /// Trials per suite; the built-in defaults when omitted.
        #[arg(long)]
        trials: Option<usize>,
        /// Suite seed; overrides ENDOSPEC_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Run independent trials in parallel.
        #[arg(long)]
        parallel: bool,
    },
}

fn read_spec(path: Option<&PathBuf>) -> Result<ProblemSpec, CommandError> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .map_err(|e| CommandError(format!("cannot read {}: {e}", p.display())))?,
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CommandError(format!("cannot read standard input: {e}")))?;
            s
        }
    };
    Ok(parse_spec(&text)?)
}

fn seed_from_env() -> Result<u64, CommandError> {
    match std::env::var("ENDOSPEC_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CommandError(format!("ENDOSPEC_SEED is not an unsigned integer: {s:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn run(cli: &Cli) -> Result<Report, CommandError> {
    let input = cli.input.as_ref();
    match &cli.command {
        Command::InvariantSubgroup {
            modulus,
            total,
            rank,
        } => match rank {
            Some(r) => commands::invariant_subgroup(*r, *modulus, *total, None),
            None => {
                let spec = read_spec(input)?;
                commands::invariant_subgroup(spec.rank, *modulus, *total, Some(&spec.phi))
            }
        },
        Command::Selftest {
            trials,
            seed,
            parallel,
        } => {
            let seed = match seed {
                Some(s) => *s,
                None => seed_from_env()?,
            };
            let trials = trials.map_or_else(Trials::default, Trials::uniform);
            let mode = if *parallel {
                Execution::Parallel
            } else {
                Execution::Sequential
            };
            commands::selftest(seed, trials, mode)
        }
        command => {
            let spec = read_spec(input)?;
            match command {
                Command::Eigen => commands::eigen(&spec),
                Command::Restrict => commands::restrict(&spec),
                Command::CheckContainment => commands::check(&spec),
                Command::Casson => commands::casson(&spec),
                Command::Alexander => commands::alexander(&spec),
                Command::Growth { kmax } => commands::growth(&spec, *kmax),
                Command::EventualKernel => commands::eventual(&spec),
                Command::InvariantSubgroup { .. } | Command::Selftest { .. } => unreachable!(),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string(&report.json).expect("JSON values serialize")
                );
            } else {
                print!("{}", report.text);
            }
            if report.violation {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CommandError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
