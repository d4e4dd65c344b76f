//! Command-line front end: solve, audit, simulate, and generate instances.
//!
//! Exit codes: 0 on success, 2 for invalid input (bad files, bad domains,
//! malformed schemes), 3 when a size budget would be exceeded, 4 when the
//! numerics give up.

mod io;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use persuasion::bicriteria::{solve_bicriteria, BicriteriaError};
use persuasion::exact::{solve_optimal_scheme, ExactError, DEFAULT_LP_BUDGET};
use persuasion::fixtures;
use persuasion::grid::{GridError, DEFAULT_ENUM_BUDGET};
use persuasion::instance::ModelError;
use persuasion::lp::LpError;
use persuasion::mfs::{kstar_bruteforce, solve_mfs_kuniform, MfsError};
use persuasion::scheme::SchemeError;
use persuasion::sim::{simulate, SimError};
use persuasion::voting::VotingError;

use io::{
    instance_from_json, instance_to_json, matrix_from_json, matrix_to_json, objective_from_json,
    scheme_from_json, scheme_to_json, InstanceJson, MatrixJson, MfsResultJson, ObjectiveJson,
    ReportJson, SchemeJson,
};

#[derive(Parser)]
#[command(
    name = "persuasion",
    version,
    about = "Optimal public signaling for many receivers without externalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the full obedience program for the optimal scheme
    SolveExact {
        /// Instance JSON file
        #[arg(long)]
        instance: PathBuf,
        /// Obedience slack receivers will tolerate
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Cap on LP variables (states x action profiles)
        #[arg(long, default_value_t = DEFAULT_LP_BUDGET)]
        budget: u128,
        /// Write the scheme JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Near-optimal scheme from a k-uniform posterior grid
    SolveBicriteria {
        /// Instance JSON file
        #[arg(long)]
        instance: PathBuf,
        /// Obedience slack receivers will tolerate
        #[arg(long)]
        eps: f64,
        /// Acceptable multiplicative value loss, in (0, 1)
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Grid resolution override (skips the eps/delta formula)
        #[arg(long)]
        k_override: Option<u64>,
        /// Cap on enumerated grid points
        #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
        budget: u128,
        /// Write the scheme JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximize satisfied rows of a margin matrix over the simplex
    SolveMfs {
        /// Matrix JSON file ({lo, hi, matrix})
        #[arg(long)]
        matrix: PathBuf,
        /// Row slack: rows within -eps count as satisfied
        #[arg(long)]
        eps: f64,
        /// Grid resolution override (skips the range formula)
        #[arg(long)]
        k_override: Option<u64>,
        /// Cap on enumerated grid points
        #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
        budget: u128,
        /// Also brute-force the exact optimum and print it
        #[arg(long)]
        compare_oracle: bool,
        /// Write the result JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scheme: persuasiveness slack and sender value
    Audit {
        /// Instance JSON file
        #[arg(long)]
        instance: PathBuf,
        /// Scheme JSON file
        #[arg(long)]
        scheme: PathBuf,
    },
    /// Monte Carlo run of a scheme against best-responding receivers
    Simulate {
        /// Instance JSON file
        #[arg(long)]
        instance: PathBuf,
        /// Scheme JSON file
        #[arg(long)]
        scheme: PathBuf,
        /// Obedience slack receivers will tolerate
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Number of independent trials
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Seed for the trial streams
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the report JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a ready-made or randomly generated input file
    Gen {
        #[arg(long, value_enum)]
        preset: Preset,
        /// Seed for the random presets
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Receiver count (random-voting)
        #[arg(long, default_value_t = 3)]
        receivers: usize,
        /// State count (random-voting)
        #[arg(long, default_value_t = 3)]
        states: usize,
        /// Row count (random-mfs)
        #[arg(long, default_value_t = 6)]
        rows: usize,
        /// Column count (random-mfs)
        #[arg(long, default_value_t = 3)]
        cols: usize,
        /// Voting threshold (random-voting; defaults to a majority)
        #[arg(long)]
        threshold: Option<usize>,
        /// Write the JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// The three-candidate election walkthrough
    Example,
    /// Random binary-action voting instance
    RandomVoting,
    /// Random margin matrix with entries in [-1, 1]
    RandomMfs,
}

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Budget(String),
    Numeric(String),
}

impl Failure {
    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Budget(m) | Failure::Numeric(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Numeric(_) => 4,
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<SchemeError> for Failure {
    fn from(e: SchemeError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<VotingError> for Failure {
    fn from(e: VotingError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<LpError> for Failure {
    fn from(e: LpError) -> Self {
        Failure::Numeric(e.to_string())
    }
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        match e {
            GridError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            ExactError::NegativeEps { .. } => Failure::Validation(e.to_string()),
            ExactError::Lp(_) | ExactError::NoOptimum { .. } | ExactError::Scheme(_) => {
                Failure::Numeric(e.to_string())
            }
        }
    }
}

impl From<BicriteriaError> for Failure {
    fn from(e: BicriteriaError) -> Self {
        match e {
            BicriteriaError::Grid(g) => g.into(),
            BicriteriaError::NonPositiveEps { .. }
            | BicriteriaError::BadDelta { .. }
            | BicriteriaError::ZeroK
            | BicriteriaError::ResolutionOverflow
            | BicriteriaError::Model(_) => Failure::Validation(e.to_string()),
            BicriteriaError::Lp(_)
            | BicriteriaError::NoOptimum { .. }
            | BicriteriaError::Scheme(_) => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<MfsError> for Failure {
    fn from(e: MfsError) -> Self {
        match e {
            MfsError::Grid(g) => g.into(),
            MfsError::Lp(_) => Failure::Numeric(e.to_string()),
            MfsError::TooManyRows { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Grid(g) => g.into(),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Numeric(format!("cannot serialize result: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::SolveExact {
            instance,
            eps,
            budget,
            out,
        } => {
            let json: InstanceJson = read_json(&instance)?;
            let inst = instance_from_json(&json)?;
            let objective = objective_from_json(&inst, &json.objective)?;
            let sol = solve_optimal_scheme(&inst, &objective, eps, budget)?;
            println!("value {:.6}", sol.value);
            println!("signals {}", sol.scheme.num_signals());
            emit(&scheme_to_json(&inst, &sol.scheme), &out)
        }
        Command::SolveBicriteria {
            instance,
            eps,
            delta,
            k_override,
            budget,
            out,
        } => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Failure::Validation(format!(
                    "delta must lie strictly between 0 and 1, got {delta}"
                )));
            }
            let json: InstanceJson = read_json(&instance)?;
            let inst = instance_from_json(&json)?;
            let objective = objective_from_json(&inst, &json.objective)?;
            let sol = solve_bicriteria(&inst, &objective, eps, delta, k_override, budget)?;
            println!("k {}", sol.k);
            println!("value {:.6}", sol.value);
            println!("signals {}", sol.scheme.num_signals());
            emit(&scheme_to_json(&inst, &sol.scheme), &out)
        }
        Command::SolveMfs {
            matrix,
            eps,
            k_override,
            budget,
            compare_oracle,
            out,
        } => {
            let json: MatrixJson = read_json(&matrix)?;
            let m = matrix_from_json(&json)?;
            let sol = solve_mfs_kuniform(&m, eps, k_override, budget)?;
            println!("k {}", sol.k);
            println!("satisfied {}/{}", sol.satisfied, m.num_rows());
            let oracle = if compare_oracle {
                let exact = kstar_bruteforce(&m)?;
                println!("oracle {exact}");
                Some(exact)
            } else {
                None
            };
            emit(
                &MfsResultJson {
                    k: sol.k,
                    satisfied: sol.satisfied,
                    rows: m.num_rows(),
                    x: sol.x,
                    oracle,
                },
                &out,
            )
        }
        Command::Audit { instance, scheme } => {
            let inst_json: InstanceJson = read_json(&instance)?;
            let inst = instance_from_json(&inst_json)?;
            let objective = objective_from_json(&inst, &inst_json.objective)?;
            let scheme_json: SchemeJson = read_json(&scheme)?;
            let scheme = scheme_from_json(&inst, &scheme_json)?;
            println!("signals {}", scheme.num_signals());
            println!("slack {:.6}", inst.persuasiveness_slack(&scheme));
            println!("value {:.6}", inst.expected_sender_utility(&objective, &scheme));
            Ok(())
        }
        Command::Simulate {
            instance,
            scheme,
            eps,
            trials,
            seed,
            out,
        } => {
            let inst_json: InstanceJson = read_json(&instance)?;
            let inst = instance_from_json(&inst_json)?;
            let objective = objective_from_json(&inst, &inst_json.objective)?;
            let scheme_json: SchemeJson = read_json(&scheme)?;
            let scheme = scheme_from_json(&inst, &scheme_json)?;
            let report = simulate(&inst, &objective, &scheme, eps, trials, seed)?;
            println!("value {:.6}", report.value);
            emit(
                &ReportJson {
                    trials: report.trials,
                    seed: report.seed,
                    empirical_sender_utility: report.value,
                    deviation_gain: report.deviation_gain,
                },
                &out,
            )
        }
        Command::Gen {
            preset,
            seed,
            receivers,
            states,
            rows,
            cols,
            threshold,
            out,
        } => match preset {
            Preset::Example => {
                let inst = fixtures::example_instance();
                let objective = Some(ObjectiveJson::KVoting {
                    threshold: 2,
                    preferred: None,
                });
                emit(&instance_to_json(&inst, objective), &out)
            }
            Preset::RandomVoting => {
                if receivers == 0 || states == 0 {
                    return Err(Failure::Validation(
                        "receivers and states must be at least 1".into(),
                    ));
                }
                let threshold = threshold.unwrap_or(receivers / 2 + 1);
                if threshold == 0 || threshold > receivers {
                    return Err(Failure::Validation(format!(
                        "threshold {threshold} must be between 1 and {receivers}"
                    )));
                }
                let inst = fixtures::random_voting_instance(seed, receivers, states);
                let objective = Some(ObjectiveJson::KVoting {
                    threshold,
                    preferred: None,
                });
                emit(&instance_to_json(&inst, objective), &out)
            }
            Preset::RandomMfs => {
                if rows == 0 || cols == 0 {
                    return Err(Failure::Validation(
                        "rows and cols must be at least 1".into(),
                    ));
                }
                let m = fixtures::random_mfs_matrix(seed, rows, cols);
                emit(&matrix_to_json(&m), &out)
            }
        },
    }
}
