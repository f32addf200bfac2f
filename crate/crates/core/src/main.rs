use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ellsym2::cli::{compute, ComputeArgs, Target};
use ellsym2::curve_analytics::cache_dir_from_env;
use ellsym2::suites::{Runner, Suite, SuiteConfig, DEFAULT_DIGITS};

#[derive(Parser)]
#[command(name = "ellsym2", version, about = "Elliptic trilogarithm and symmetric square L-value verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run a verification suite; exits 0 iff every report passes.
    Verify {
        /// main, lemma41, prop21, prop22, cor33, prop32, kdet, re-im-regulator,
        /// zagier37, thm31, fe, curves or all
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a single quantity.
    Compute {
        /// l31, l32, de, je, kab, lg, lchi4, lsym2, gcoeffs, fcoeffs, periods or elllog
        target: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        xi: Option<String>,
        #[arg(long)]
        eta: Option<String>,
        /// "i" or "re,im"
        #[arg(long, default_value = "i")]
        tau: String,
        #[arg(long)]
        a: Option<u32>,
        #[arg(long)]
        b: Option<u32>,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long = "N")]
        n: Option<usize>,
        /// "37a", "E<d>" or "a1,a2,a3,a4,a6"
        #[arg(long)]
        curve: Option<String>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        /// P, Q or O on a curve E<d>
        #[arg(long)]
        point: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    digits: u32,
    /// Lattice truncation radius (per-suite defaults when omitted)
    #[arg(long)]
    radius: Option<u64>,
    #[arg(long)]
    prime_bound: Option<u64>,
    /// Worker threads (default: all hardware threads)
    #[arg(long)]
    threads: Option<usize>,
    /// Reduced radii and prime bound
    #[arg(long)]
    quick: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Coefficient and a_p cache directory (also ELLSYM2_CACHE)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl Common {
    fn cache(&self) -> Option<PathBuf> {
        self.cache_dir.clone().or_else(cache_dir_from_env)
    }

    fn sink(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(File::create(path)?),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn set_threads(n: Option<usize>) {
    if let Some(n) = n {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn verify(suite: &str, common: &Common) -> ExitCode {
    let suite: Suite = match suite.parse() {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let cfg = SuiteConfig {
        digits: common.digits,
        radius: common.radius,
        prime_bound: common.prime_bound,
        quick: common.quick,
        cache_dir: common.cache(),
    };
    let mut runner = match Runner::new(cfg) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let reports = match runner.run(suite) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut out = match common.sink() {
        Ok(w) => w,
        Err(e) => return usage(e),
    };
    for r in &reports {
        let line = match common.format {
            Format::Json => r.to_json_line(),
            Format::Text => r.to_text(),
        };
        if writeln!(out, "{line}").is_err() {
            return ExitCode::FAILURE;
        }
    }
    if reports.iter().all(|r| r.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { suite, common } => {
            set_threads(common.threads);
            verify(&suite, &common)
        }
        Command::Compute { target, common, xi, eta, tau, a, b, s, t, n, curve, x, y, point } => {
            set_threads(common.threads);
            let target: Target = match target.parse() {
                Ok(t) => t,
                Err(e) => return usage(e),
            };
            let args = ComputeArgs {
                digits: common.digits,
                radius: common.radius.unwrap_or(ellsym2::suites::DEFAULT_RADIUS),
                prime_bound: common.prime_bound.unwrap_or(ellsym2::suites::DEFAULT_PRIME_BOUND),
                cache_dir: common.cache(),
                xi,
                eta,
                tau,
                a,
                b,
                s,
                t,
                n,
                curve,
                x,
                y,
                point,
            };
            let result = match compute(target, &args) {
                Ok(r) => r,
                Err(e @ (ellsym2::Error::Parse(_) | ellsym2::Error::Precondition(_) | ellsym2::Error::Domain(_))) => {
                    return usage(e)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            let line = match common.format {
                Format::Json => result.to_json_line(),
                Format::Text => result.to_text(),
            };
            match common.sink().and_then(|mut w| writeln!(w, "{line}")) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage(e),
            }
        }
    }
}
