//! `htbounds` — norms, bounds, and simulations from the command line.
//!
//! Subcommands mirror the library surface: `norm` / `norm-table` solve the
//! sub-Gaussian norm, `bound` evaluates the binary and M-ary closed forms,
//! `exact` / `simulate` / `mary` run the tests themselves and embed a
//! bound-validity record, and `compare` emits the sub-Gaussian-vs-Fano
//! dominance map.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical (solver) failure.
//! Identical invocations produce byte-identical output; every JSON report
//! embeds its input configuration.

mod commands;
mod output;
mod range;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "htbounds",
    version,
    about = "Sub-Gaussian and classical error bounds for likelihood-ratio hypothesis tests"
)]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for Monte Carlo chunks (results do not depend on it).
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SeedArg {
    /// RNG seed; falls back to HTBOUNDS_SEED, then 0.
    #[arg(long, env = "HTBOUNDS_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the sub-Gaussian norm σ_Φ0(α).
    Norm {
        #[arg(long)]
        alpha: f64,
        /// Absolute tolerance on the tangency residual.
        #[arg(long, default_value_t = htbounds::subgauss::DEFAULT_TOL)]
        tol: f64,
    },
    /// Solve the norm over an alpha grid (the norm-vs-alpha curve).
    #[command(name = "norm-table")]
    NormTable {
        /// Grid as start:stop:step (inclusive of on-grid endpoints).
        #[arg(long)]
        alphas: String,
        /// Output format: csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Evaluate closed-form bounds without running a test.
    Bound {
        #[command(subcommand)]
        which: BoundCommand,
    },
    /// Exact error rates of the binary test by enumeration.
    Exact {
        #[arg(long, value_name = "SPEC.json")]
        p0: PathBuf,
        #[arg(long, value_name = "SPEC.json")]
        p1: PathBuf,
        #[arg(long)]
        n: u64,
        /// Rejection threshold in nats per sample.
        #[arg(long, default_value_t = 0.0)]
        c: f64,
    },
    /// Monte Carlo error rates of the binary test.
    Simulate {
        #[arg(long, value_name = "SPEC.json")]
        p0: PathBuf,
        #[arg(long, value_name = "SPEC.json")]
        p1: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        #[arg(long)]
        trials: u64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Confusion matrix of the M-ary maximum-likelihood classifier.
    Mary {
        /// Directory of *.json distribution specs, one hypothesis each,
        /// ordered by file name.
        #[arg(long, value_name = "DIR")]
        hypotheses: PathBuf,
        #[arg(long)]
        n: u64,
        /// Enumerate exactly instead of simulating.
        #[arg(long, conflicts_with = "trials")]
        exact: bool,
        #[arg(long, required_unless_present = "exact")]
        trials: Option<u64>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Sub-Gaussian vs Fano dominance map over an (M, n) grid.
    Compare {
        /// Uniform KL cap δ.
        #[arg(long)]
        delta: f64,
        /// M grid as start:stop[:step], M ≥ 3.
        #[arg(long, default_value = "3:50")]
        m_range: String,
        /// n grid as start:stop[:step].
        #[arg(long, default_value = "1:100")]
        n_range: String,
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Pinsker and sub-Gaussian binary bounds at a given α.
    Binary {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: u64,
        /// D_KL(P_1 ‖ P_0) in nats; alternative to --p0/--p1.
        #[arg(long, conflicts_with_all = ["p0", "p1"])]
        kl: Option<f64>,
        /// D_KL(P_0 ‖ P_1) in nats, enables the implicit-β bound.
        #[arg(long, conflicts_with_all = ["p0", "p1"])]
        kl01: Option<f64>,
        #[arg(long, requires = "p1", value_name = "SPEC.json")]
        p0: Option<PathBuf>,
        #[arg(long, requires = "p0", value_name = "SPEC.json")]
        p1: Option<PathBuf>,
        /// Grid step of the implicit-β scan.
        #[arg(long, default_value_t = 1e-4)]
        resolution: f64,
    },
    /// M-ary bounds from a KL matrix, a uniform δ, or hypothesis specs.
    Mary {
        #[arg(long)]
        n: u64,
        /// JSON file with the M×M KL matrix, entry (j,i) = D_KL(P_j ‖ P_i).
        #[arg(long, value_name = "FILE.json", conflicts_with_all = ["m", "delta", "hypotheses"])]
        kl_matrix: Option<PathBuf>,
        /// Number of hypotheses for the uniform-δ matrix.
        #[arg(long, requires = "delta")]
        m: Option<usize>,
        /// Uniform off-diagonal KL.
        #[arg(long, requires = "m")]
        delta: Option<f64>,
        /// Directory of *.json distribution specs.
        #[arg(long, value_name = "DIR", conflicts_with_all = ["m", "delta"])]
        hypotheses: Option<PathBuf>,
        /// Per-hypothesis error rates feeding the a-posteriori norms,
        /// comma-separated.
        #[arg(long)]
        alphas: Option<String>,
    },
}

/// Error carrying the documented exit code.
#[derive(Debug)]
pub(crate) struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<htbounds::Error> for CliError {
    fn from(e: htbounds::Error) -> Self {
        let code = match e {
            htbounds::Error::Solver(_) => 3,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::validation(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
        .ok();

    let result = match cli.command {
        Command::Norm { alpha, tol } => commands::norm(alpha, tol),
        Command::NormTable {
            ref alphas,
            ref format,
        } => commands::norm_table(alphas, format),
        Command::Bound { ref which } => match which {
            BoundCommand::Binary {
                alpha,
                n,
                kl,
                kl01,
                p0,
                p1,
                resolution,
            } => commands::bound_binary(
                *alpha,
                *n,
                *kl,
                *kl01,
                p0.as_deref(),
                p1.as_deref(),
                *resolution,
            ),
            BoundCommand::Mary {
                n,
                kl_matrix,
                m,
                delta,
                hypotheses,
                alphas,
            } => commands::bound_mary(
                *n,
                kl_matrix.as_deref(),
                *m,
                *delta,
                hypotheses.as_deref(),
                alphas.as_deref(),
            ),
        },
        Command::Exact {
            ref p0,
            ref p1,
            n,
            c,
        } => commands::exact(p0, p1, n, c),
        Command::Simulate {
            ref p0,
            ref p1,
            n,
            c,
            trials,
            ref seed,
        } => commands::simulate(p0, p1, n, c, trials, seed.seed, cli.jobs),
        Command::Mary {
            ref hypotheses,
            n,
            exact,
            trials,
            ref seed,
        } => commands::mary(hypotheses, n, exact, trials, seed.seed, cli.jobs),
        Command::Compare {
            delta,
            ref m_range,
            ref n_range,
            ref format,
        } => commands::compare(delta, m_range, n_range, format),
    };

    match result {
        Ok(text) => match output::emit(cli.out.as_deref(), &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {}", e.message);
                ExitCode::from(e.code)
            }
        },
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
