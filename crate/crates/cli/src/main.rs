//! `upade`: Padé tables, metrics and universal-series experiments driven by
//! a JSON config.

mod cmd_metrics;
mod cmd_pade;
mod cmd_universal;
mod config;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use universal_pade::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or literals.
    Usage(String),
    Config(String),
    Io(String),
    /// Verification or search ran out of indices.
    Exhausted(String),
    /// A computed report failed its own checks.
    Check(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Config(m) => write!(f, "config: {m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
            CliError::Exhausted(m) | CliError::Check(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn core_code(e: &Error) -> u8 {
    match e {
        Error::NotInD(_) | Error::NoUsableIndex => 2,
        Error::BudgetExhausted(_) => 4,
        Error::ConstructionFailed { source, .. } => core_code(source),
        _ => 1,
    }
}

impl CliError {
    /// 2: not in D or exhaustion, 3: config and I/O, 4: fit budget exhausted.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Exhausted(_) => 2,
            CliError::Check(_) => 1,
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 3,
            CliError::Core(e) => core_code(e),
        }
    }
}

#[derive(Parser)]
#[command(name = "upade", version, about = "Padé approximants and universal power series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One approximant as JSON, or a normality table as CSV.
    Pade(PadeArgs),
    #[command(subcommand)]
    Universal(UniversalCommand),
    #[command(subcommand)]
    Metrics(MetricsCommand),
}

#[derive(Args)]
pub struct PadeArgs {
    /// `exp`, `geometric`, or `rational:NUM;DEN` (coefficients in poly syntax).
    #[arg(long = "fn", value_name = "NAME", conflicts_with_all = ["coeffs", "series"])]
    function: Option<String>,
    /// JSON coefficient file.
    #[arg(long, value_name = "FILE", conflicts_with = "series")]
    coeffs: Option<PathBuf>,
    /// Inline comma-separated coefficients, e.g. `1,0.5+2i,-i`.
    #[arg(long, value_name = "LIST")]
    series: Option<String>,
    #[arg(long, requires = "q", conflicts_with = "table")]
    p: Option<usize>,
    #[arg(long, requires = "p")]
    q: Option<usize>,
    /// Normality table for p ≤ P, q ≤ Q.
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    table: Option<Vec<usize>>,
    #[arg(long, default_value_t = 53)]
    prec: u32,
    /// `tol_D = 2^-bits`.
    #[arg(long)]
    tol_d_bits: Option<u32>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ConfigArg {
    #[arg(short, long, value_name = "FILE")]
    config: PathBuf,
}

#[derive(Subcommand)]
enum UniversalCommand {
    /// Build the series; writes the transcript and CSV summaries.
    Build {
        #[command(flatten)]
        cfg: ConfigArg,
        /// Overrides `steps`.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Search the table for an index approximating the target; exit 0 iff found.
    Verify {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        target: String,
        #[arg(long)]
        s: u32,
        /// Index of the compact in the enumeration.
        #[arg(long, default_value_t = 1)]
        compact: usize,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Density witness on a compact of the enumeration.
    Witness {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long, value_enum)]
        kind: cmd_universal::Kind,
        /// `poly:…` for type1 and qside, `rational:NUM;DEN` or `poly:…` for type2.
        #[arg(long)]
        target: String,
        /// Function to approximate on the inner set.
        #[arg(long, default_value = "poly:0")]
        local: String,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        compact: usize,
    },
    /// `Σ a_l g_l` with one nested level per coefficient.
    Span {
        #[command(flatten)]
        cfg: ConfigArg,
        /// Semicolon-separated nonzero coefficients, e.g. `1;-0.5+2i`.
        #[arg(long)]
        coefficients: String,
        #[arg(long, default_value_t = 2)]
        depth_cap: usize,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Which systems each step handles.
    Schedule {
        /// A count, or `countable`.
        #[arg(long)]
        systems: String,
        #[arg(long)]
        steps: usize,
    },
}

#[derive(Subcommand)]
enum MetricsCommand {
    /// Chordal distance of two points of the sphere (`inf` allowed).
    Chordal {
        a: String,
        b: String,
        #[arg(long, default_value_t = 53)]
        prec: u32,
    },
    /// `ρ_c` and `ρ_d` of two coefficient sequences.
    Sequences {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 53)]
        prec: u32,
    },
    /// Sup distance between a Padé approximant of the configured build and a
    /// target on a compact of the enumeration.
    Sup {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1)]
        compact: usize,
        #[arg(long)]
        chordal: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Pade(args) => cmd_pade::run(&args),
        Command::Universal(cmd) => match cmd {
            UniversalCommand::Build { cfg, steps } => cmd_universal::build(&cfg.config, steps),
            UniversalCommand::Verify {
                cfg,
                target,
                s,
                compact,
                steps,
            } => cmd_universal::verify(&cfg.config, &target, s, compact, steps),
            UniversalCommand::Witness {
                cfg,
                kind,
                target,
                local,
                s,
                eps,
                compact,
            } => cmd_universal::witness(&cfg.config, kind, &target, &local, s, eps, compact),
            UniversalCommand::Span {
                cfg,
                coefficients,
                depth_cap,
                steps,
            } => cmd_universal::span(&cfg.config, &coefficients, depth_cap, steps),
            UniversalCommand::Schedule { systems, steps } => cmd_universal::schedule(&systems, steps),
        },
        Command::Metrics(cmd) => match cmd {
            MetricsCommand::Chordal { a, b, prec } => cmd_metrics::chordal(&a, &b, prec),
            MetricsCommand::Sequences { a, b, prec } => cmd_metrics::sequences(&a, &b, prec),
            MetricsCommand::Sup {
                cfg,
                p,
                q,
                target,
                compact,
                chordal,
            } => cmd_metrics::sup(&cfg.config, p, q, &target, compact, chordal),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("upade: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
