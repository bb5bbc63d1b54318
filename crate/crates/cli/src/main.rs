mod cache;
mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "linnik",
    version,
    about = "Sign changes of multiplicative functions in residue classes"
)]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker cap; the computations are single-threaded, so only 1 changes nothing.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
    /// Seed for every randomized suite.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cache directory; defaults to $LINNIK_CACHE_DIR, else no cache.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Defaults of the parameter set; every field can be overridden.
#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Use the general (non-easy) parameter set.
    #[arg(long)]
    general: bool,
    #[arg(long)]
    q1: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    u: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long)]
    k: Option<i64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Ladder override as lo:hi,lo:hi,...
    #[arg(long)]
    ladder: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharsumKind {
    Mvt,
    Pv,
    Burgess,
    Halasz,
    Largevalues,
    Amplify,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Density {
    Zero,
    Inverse,
    InverseOff6,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Easy,
    General,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SMethod {
    Auto,
    Direct,
    Characters,
    MonteCarlo,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Prime factorization of n.
    Factor {
        #[arg(long)]
        n: u64,
    },
    /// R(h; q) with witnesses, by exhaustive scan up to a cap.
    Rfunc {
        /// liouville, mobius, one, or chi:<k> for the k-th real character mod q.
        #[arg(long)]
        h: String,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 10_000)]
        cap: u64,
    },
    /// Classes holding a square-free n ≤ x of each sign.
    Esets {
        #[arg(long)]
        h: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        x: u64,
    },
    /// Σ 1/p over p ≤ cutoff with h(p)χ(p) < 0.
    Pretend {
        #[arg(long)]
        h: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        cutoff: f64,
        /// principal, an index into the real characters, or dual:<a,b,...>.
        #[arg(long, default_value = "principal")]
        chi: String,
    },
    /// Pretentious distance between two real functions.
    Distance {
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "one")]
        g: String,
        #[arg(long)]
        x: f64,
        /// Primes dividing r are skipped.
        #[arg(long, default_value_t = 1)]
        r: u64,
        /// Modulus for chi:<k> specs.
        #[arg(long)]
        q: Option<u64>,
    },
    /// L(q) with its per-character breakdown.
    Lofq {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        cutoff: Option<u64>,
    },
    /// Beta-sieve weights, the sandwich check and optionally the accuracy check.
    Sieve {
        #[arg(long)]
        z: f64,
        #[arg(long)]
        level: f64,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 10_000)]
        check: u64,
        #[arg(long, value_enum)]
        density: Option<Density>,
        /// K for the accuracy check; estimated from the density when absent.
        #[arg(long = "K")]
        big_k: Option<f64>,
    },
    /// Rough numbers up to a cap in a coset of an index-2 subgroup.
    Rough {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        rcap: u64,
        #[arg(long)]
        z: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Index of the index-2 subgroup; the full group when absent.
        #[arg(long)]
        subgroup: Option<usize>,
        #[arg(long, default_value_t = 1)]
        b: u64,
    },
    /// Dense model of f^± built at spectral threshold δ.
    Densemodel {
        #[arg(long, default_value = "liouville")]
        h: String,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value = "+")]
        sign: String,
        /// Right end of the interval (R/e, R]; defaults to the parameter R.
        #[arg(long)]
        interval_r: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        /// Include the model values.
        #[arg(long)]
        dump: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Kneser's inequality for two sets of residues.
    Kneser {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Triple-convolution dichotomy for three sets of residues.
    Triple {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
    },
    /// Character-sum checks and reports.
    Charsum {
        #[arg(value_enum)]
        kind: CharsumKind,
        #[arg(long)]
        q: u64,
        /// Length N.
        #[arg(long)]
        n: Option<u64>,
        /// Window start M.
        #[arg(long = "start", default_value_t = 0)]
        start: u64,
        /// Character index; all characters when absent (pv).
        #[arg(long)]
        chi: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long = "P", default_value_t = 500.0)]
        big_p: f64,
        #[arg(long = "C", default_value_t = 1.0)]
        big_c: f64,
        #[arg(long, default_value_t = 2000.0)]
        x: f64,
        #[arg(long, default_value_t = 5.0)]
        y1: f64,
        #[arg(long, default_value_t = 20.0)]
        y2: f64,
    },
    /// Ladder intervals and optional membership of n.
    Ladder {
        #[arg(long)]
        q1: f64,
        #[arg(long)]
        q: u64,
        /// lo:hi,lo:hi,...
        #[arg(long = "override")]
        overrides: Option<String>,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Decomposition identity along one ladder interval.
    Ramare {
        #[arg(long, default_value = "liouville")]
        h: String,
        #[arg(long)]
        q: u64,
        #[arg(long = "M")]
        big_m: f64,
        #[arg(long, default_value_t = 0)]
        v: i64,
        #[arg(long, default_value_t = 2)]
        j: usize,
        #[arg(long, default_value = "+")]
        sign: String,
        #[arg(long, default_value_t = 2.0)]
        p1: f64,
        #[arg(long)]
        subgroup: Option<usize>,
        #[arg(long, default_value_t = 1)]
        b: u64,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// S against its model T on a toy instance.
    Stcompare {
        #[arg(long, default_value = "liouville")]
        h: String,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = Variant::Easy)]
        variant: Variant,
        /// Signs of the factors, e.g. +-+ (easy) or +-+-+- (general).
        #[arg(long)]
        deltas: Option<String>,
        /// k-vectors for the general variant: a,b,c;a,b,c
        #[arg(long, default_value = "0,0,0")]
        ks: String,
        #[arg(long, value_enum, default_value_t = SMethod::Auto)]
        method: SMethod,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = linnik_core::pipeline::DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Which branch of the dichotomy holds for h mod q.
    Audit {
        #[arg(long)]
        h: String,
        #[arg(long)]
        q: u64,
        #[arg(long = "C", default_value_t = 1.0)]
        big_c: f64,
        /// Scan cap; defaults to q³.
        #[arg(long)]
        cap: Option<u64>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Table of R(h; q) over a range of moduli.
    Batch {
        #[arg(long)]
        h: String,
        #[arg(long, default_value_t = 3)]
        qmin: u64,
        #[arg(long)]
        qmax: u64,
        #[arg(long, default_value_t = 100_000)]
        cap: u64,
    },
}

pub const SUBCOMMANDS: &[&str] = &[
    "factor",
    "rfunc",
    "esets",
    "pretend",
    "distance",
    "lofq",
    "sieve",
    "rough",
    "densemodel",
    "kneser",
    "triple",
    "charsum",
    "ladder",
    "ramare",
    "stcompare",
    "audit",
    "batch",
];

#[derive(Debug)]
pub enum CliError {
    Core(linnik_core::Error),
    Input(String),
}

impl From<linnik_core::Error> for CliError {
    fn from(e: linnik_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Core(linnik_core::Error::Resource(_)) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(s) => write!(f, "invalid input: {s}"),
        }
    }
}

fn run(argv: Vec<OsString>) -> i32 {
    let argv = match config::expand(argv, SUBCOMMANDS) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cmd = Cli::command()
        .args_override_self(true)
        .mut_subcommands(|s| s.args_override_self(true));
    let cli = match cmd
        .try_get_matches_from(argv)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 1,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let mut cache = cache::Cache::open(cli.cache.clone());
    let result = commands::dispatch(&cli, &mut cache);
    log::info!("cache: {} hits, {} misses", cache.hits, cache.misses);
    let text = match result {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return e.code();
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    0
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    std::process::exit(run(std::env::args_os().collect()));
}
