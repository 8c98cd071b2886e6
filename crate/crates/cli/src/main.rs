//! `cf`: continued-fraction error sums from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "cf",
    version,
    about = "Continued-fraction error sums: expansion, evaluation, verification and experiments"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..=1024))]
    pub threads: Option<u16>,
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u32).range(32..=65536))]
    pub precision: u32,
    /// Omit the timestamp line.
    #[arg(long, global = true)]
    pub no_meta: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Function {
    #[value(name = "E", alias = "e")]
    E,
    #[value(name = "P", alias = "p")]
    P,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemmas,
    Conversion,
    Bounds,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Continued-fraction digits, convergents and sibling of a rational.
    Expand {
        /// `p/q`, integer or decimal; reduced modulo 1.
        x: String,
    },
    /// Exact or enclosed value of E or P.
    Eval {
        #[arg(long, value_enum)]
        function: Function,
        /// `p/q` or decimal.
        #[arg(long)]
        at: String,
        /// Treat a decimal as known to half a unit in its last place and
        /// enclose the value to within this tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Fundamental interval of a digit string such as `3,2,1`.
    Interval { sigma: String },
    /// Fundamental intervals of all strings of one length or below a denominator cutoff.
    Enumerate {
        /// String length.
        #[arg(long, requires = "cap", conflicts_with = "cutoff")]
        length: Option<usize>,
        /// Largest digit, with `--length`.
        #[arg(long)]
        cap: Option<u64>,
        /// Largest convergent denominator.
        #[arg(long)]
        cutoff: Option<u64>,
    },
    /// Run a self-check suite; exits with status 2 if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Random strings in the lemmas suite.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Largest denominator for round trip and periodicity.
        #[arg(long, default_value_t = 300)]
        round_trip_cap: u64,
        /// Denominator cutoff(s); conversion uses the first.
        #[arg(long, value_delimiter = ',')]
        cutoff: Vec<u64>,
        #[arg(long, default_value_t = 0.75)]
        epsilon: f64,
    },
    /// Partial sum of the a-series (weight E) or b-series (weight P) with its bounds.
    Series {
        #[arg(long, value_enum)]
        weight: Function,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        cutoff: u64,
        /// Per-length sums for n up to this length.
        #[arg(long, requires = "digit_cap")]
        per_length: Option<usize>,
        /// Largest digit for per-length sums.
        #[arg(long)]
        digit_cap: Option<u64>,
    },
    /// Graph samples at all reduced fractions with denominator up to the cap.
    Graph {
        #[arg(long, value_enum)]
        function: Function,
        #[arg(long)]
        cap: u64,
        /// Add decimal columns.
        #[arg(long)]
        decimal: bool,
    },
    /// Box-counting slope of the sampled graph.
    Dimension {
        #[arg(long, value_enum)]
        function: Function,
        #[arg(long)]
        cap: u64,
        /// Dyadic exponents as `lo:hi` or a comma list.
        #[arg(long, default_value = "3:8")]
        scales: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
