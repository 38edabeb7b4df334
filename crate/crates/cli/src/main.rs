mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use report::{CliError, Report, EXIT_PARSE, EXIT_VERIFICATION};

pub const SEED_ENV: &str = "PLURISCHWARZ_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "plurischwarz",
    version,
    about = "Pre-Schwarzian and Schwarzian derivatives of pluriharmonic maps"
)]
struct Cli {
    /// Report every runtime_ms as 0 so that reports compare byte for byte.
    #[arg(long, global = true)]
    no_timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an operator of a map file at a point.
    Eval {
        mapfile: std::path::PathBuf,
        /// Coordinates as "re,im;re,im;...".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum)]
        what: What,
    },
    /// Run the seeded property suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Overridden by PLURISCHWARZ_SEED when set.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Comma-separated dimensions.
        #[arg(long = "n", value_delimiter = ',', default_values_t = [1usize, 2, 3])]
        dims: Vec<usize>,
    },
    /// Reproduce the quantitative claims of a worked example.
    Reproduce {
        #[arg(long, value_enum)]
        example: Example,
        /// Example parameter as key=value; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Write a map file for a fixture or a random instance.
    Gen {
        /// Fixture name; omit for a random instance.
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long = "param")]
        params: Vec<String>,
        /// Overridden by PLURISCHWARZ_SEED when set.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    Omega,
    Jacobian,
    Preschwarzian,
    Schwarzian,
    Oda,
    NormBall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Pre,
    Schwarzian,
    Affine,
    Stability,
    Holo,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Example {
    #[value(name = "2.5")]
    E25,
    #[value(name = "4.1")]
    E41,
    CounterOmega,
    CounterDet,
    Stable,
    Shear,
}

fn effective_seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("{SEED_ENV}: not an unsigned integer: `{v}`"))),
        Err(_) => Ok(flag),
    }
}

enum Output {
    Report(Report),
    /// A map file, with its evaluation point.
    MapFile(String, String),
}

fn run(cli: Cli, echo: Vec<String>) -> Result<Output, CliError> {
    let report = match cli.command {
        Command::Eval {
            mapfile,
            point,
            what,
        } => commands::eval(echo, &mapfile, &point, what),
        Command::Verify {
            suite,
            trials,
            seed,
            dims,
        } => commands::verify(echo, suite, trials, effective_seed(seed)?, dims),
        Command::Reproduce { example, params } => commands::reproduce(echo, example, &params),
        Command::Gen {
            fixture,
            params,
            seed,
            n,
            degree,
        } => {
            let (text, point) =
                commands::gen(fixture.as_deref(), &params, effective_seed(seed)?, n, degree)?;
            return Ok(Output::MapFile(text, point));
        }
    }?;
    Ok(Output::Report(report))
}

/// Writes to stdout; a reader that closed the pipe early is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let no_timing = cli.no_timing;
    match run(cli, echo) {
        Ok(Output::MapFile(text, point)) => {
            emit(&text);
            eprintln!("point: {point}");
            ExitCode::SUCCESS
        }
        Ok(Output::Report(mut report)) => {
            if no_timing {
                report.strip_timing();
            }
            emit(&report.to_json());
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFICATION as u8)
            }
        }
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.kind(), "message": e.to_string() })
            );
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
