mod commands;
mod output;

use building_lab::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "building-lab",
    version,
    about = "Exact computations on the Bruhat-Tits building of GL_n(Q_p)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Subcommand, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Root system of GL_n with heights.
    Roots,
    /// |B \ G / K_e| for e up to --e-max.
    Cosets,
    /// Growth of dim V^(K_e) against m_V (e+1)^(n-1) Q^e.
    Growth,
    /// Fixed vertices of a diagonal element in the ball of radius --radius.
    Fixed,
    /// chi_(K_s) around a diagonal element.
    Charscan,
    /// Chain complex and Euler idempotent on the ball of radius --radius.
    Complex,
    /// Acceptance criteria 1-10.
    VerifyAll,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Chi {
    Trivial,
    Legendre,
    Mod4,
    Sign,
}

impl Chi {
    fn name(self) -> &'static str {
        match self {
            Chi::Trivial => "trivial",
            Chi::Legendre => "legendre",
            Chi::Mod4 => "mod4",
            Chi::Sign => "sign",
        }
    }
}

#[derive(clap::Args, Debug, Clone, Serialize)]
pub struct RunConfig {
    #[arg(long, global = true, default_value_t = 2)]
    pub n: usize,
    #[arg(long, global = true, default_value_t = 2)]
    pub p: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub e: i64,
    #[arg(long = "e-max", global = true, default_value_t = 3)]
    pub e_max: i64,
    /// Filtration level for charscan's largest s; defaults to r(gamma) + 3.
    #[arg(long, global = true)]
    pub r: Option<i64>,
    /// Model precision m; defaults to the smallest level every check needs.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    #[arg(long, global = true, default_value_t = 2)]
    pub radius: i64,
    #[arg(long, global = true, value_enum, default_value_t = Chi::Trivial)]
    pub chi: Chi,
    /// Diagonal entries as `p^v*u` tokens, e.g. `1,3` or `2^1*1,3`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub gamma: Vec<String>,
    #[arg(long, global = true, default_value_t = 256)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 20_240_601)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Exit codes.
const USAGE: u8 = 1;
const GUARD: u8 = 2;
const DOMAIN: u8 = 3;
const VERIFICATION: u8 = 4;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Usage(_) | Failure::Io(_) => USAGE,
        Failure::Lib(Error::ResourceGuard { .. }) => GUARD,
        Failure::Lib(_) => DOMAIN,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command, &cli.config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VERIFICATION),
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("usage error: {m}"),
                Failure::Io(m) => eprintln!("output error: {m}"),
                Failure::Lib(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}

/// `Ok(false)` when a check failed.
fn run(command: Command, cfg: &RunConfig) -> Result<bool, Failure> {
    commands::validate(command, cfg)?;
    let start = std::time::Instant::now();
    let outcome = commands::dispatch(command, cfg)?;
    let passed = outcome.checks.iter().all(|c| c.passed);
    output::emit(command, cfg, &outcome, start.elapsed())?;
    Ok(passed)
}
