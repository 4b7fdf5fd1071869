//! Command-line front end.
//!
//! [`run`] takes the argument vector and two sinks, so the binary and the
//! tests share one code path. Results go to `out`, diagnostics to `err`.
//!
//! Exit codes: `0` success, `1` domain error (not eligible, not provable,
//! failed verification, ...), `2` usage error, `3` search budget exhausted.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jacobsthal_core::{Error, Mode};

pub use commands::Outcome;

/// Environment variable naming an h-table file to use instead of the
/// shipped one.
pub const TABLE_ENV: &str = "JACOBSTHAL_H_TABLE";

#[derive(Parser, Debug)]
#[command(
    name = "jacobsthal",
    version,
    about = "Jacobsthal's function, primorial covers and certified primes in arithmetic progressions",
    after_help = "EXAMPLES:\n\
                  \n  jacobsthal g 10\
                  \n  jacobsthal h 5\
                  \n  jacobsthal find-prime 9 7 --format json > cert.json\
                  \n  jacobsthal verify cert.json\
                  \n  jacobsthal primes 1 3 --count 2\
                  \n  jacobsthal bound-table\
                  \n  jacobsthal max-d --mode cw"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CliConfig {
    /// h-table file (k,h,source lines); overrides $JACOBSTHAL_H_TABLE
    #[arg(long, global = true, value_name = "PATH")]
    pub table: Option<PathBuf>,

    /// Which h values a proof may rest on
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Unconditional)]
    pub mode: ModeArg,

    /// Worker threads for the cover search
    #[arg(long, global = true, default_value_t = default_workers(), value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,

    /// Node limit for each cover search decision
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub node_limit: Option<u64>,

    /// Wall-clock limit in seconds for each cover search decision
    #[arg(long, global = true, default_value_t = 600, value_parser = clap::value_parser!(u64).range(1..))]
    pub time_limit: u64,

    /// Missing h(k) values with k up to this are computed on demand
    #[arg(long, global = true, default_value_t = 12)]
    pub compute_up_to: usize,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

fn default_workers() -> u64 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u64)
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Unconditional,
    Cw,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Unconditional => Mode::Unconditional,
            ModeArg::Cw => Mode::CwConditional,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ordinary Jacobsthal function g(n) with a longest non-coprime run
    G { n: u64 },
    /// Primorial Jacobsthal function h(k) = g(p_k#)
    H {
        k: usize,
        /// Run the cover search even when the table has the value
        #[arg(long, conflicts_with = "table_only")]
        compute: bool,
        /// Never run the cover search
        #[arg(long)]
        table_only: bool,
    },
    /// Decide whether L consecutive integers can all share a factor with p_k#
    HSearch {
        length: usize,
        #[arg(long = "primes", value_name = "K")]
        primes: usize,
    },
    /// The elementary run of 2 p_{n-1} - 1 integers sharing a factor with p_n#
    WitnessLower { n: usize },
    /// The S-good map for a + dZ and the first k primes, with a window table
    Iso {
        #[arg(allow_hyphen_values = true)]
        a: String,
        d: u64,
        #[arg(long)]
        k: usize,
        /// Rows n = -width..=width
        #[arg(long, default_value_t = 8)]
        width: i64,
    },
    /// A certified prime in a + dZ
    FindPrime {
        #[arg(allow_hyphen_values = true)]
        a: String,
        d: u64,
        /// Also write the certificate to this file
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Re-check a certificate file (single certificate, list, or stream output)
    Verify { file: PathBuf },
    /// Distinct certified primes in a + dZ by repeated refinement
    Primes {
        #[arg(allow_hyphen_values = true)]
        a: String,
        d: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Also write the certificates to this file
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Rows (k, p_{k+1}, h(k), (p_{k+1}^2 - 2)/(h(k) + 1))
    BoundTable {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "5,10,15,20,25,30,35,40,45,50"
        )]
        ks: Vec<usize>,
    },
    /// Largest d for which every eligible a + dZ is proved to contain a prime
    MaxD,
}

impl CliConfig {
    pub fn search(&self) -> jacobsthal_core::SearchConfig {
        jacobsthal_core::SearchConfig {
            workers: self.workers as usize,
            node_limit: self.node_limit,
            time_limit: Some(Duration::from_secs(self.time_limit)),
        }
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        _ if e.is_budget() => 3,
        Error::InvalidArgument(_) | Error::InvalidModulus(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match commands::execute(&cli, out, err) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::DomainFailure) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(core) => exit_code(core),
                None => 1,
            }
        }
    }
}
