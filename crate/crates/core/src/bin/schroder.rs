use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use schroder::analytics::{self, CharacteristicSolution};
use schroder::counting::{self, ExactExpectations};
use schroder::experiments::{self, Tolerances};
use schroder::measures::{OffspringDist, OffspringTail};
use schroder::rng::stream;
use schroder::sampling::{self, Method, Sampler, DEFAULT_MAX_ATTEMPTS};
use schroder::{BracketingKind, Family, Tree};

#[derive(Parser)]
#[command(name = "schroder", version, about = "Schröder bracketings: counting, sampling, constants and experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a bracketing and print its JSON tree.
    Parse {
        #[arg(long)]
        kind: BracketingKind,
        /// The bracketing; read from stdin when omitted.
        input: Option<String>,
    },
    /// Print the bracketing of a JSON tree.
    Serialize {
        #[arg(long)]
        kind: BracketingKind,
        /// The JSON tree; read from stdin when omitted.
        input: Option<String>,
    },
    /// Exact counts for sizes 1..=n, one per line.
    Count {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
    },
    /// Every tree of the family with n leaves, one JSON tree per line.
    Enumerate {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
    },
    /// Exact expectations under the uniform law, printed as p/q.
    ExactStats {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        stat: Stat,
        /// Height; required for the profiles.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Uniform random trees.
    Sample {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "counting")]
        method: Method,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Rejection budget per tree for the Galton–Watson method.
        #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
        max_attempts: u64,
    },
    /// Offspring law and characteristic constants.
    Constants {
        #[arg(long)]
        family: Family,
        /// Emit the constants as a JSON object with 30 significant digits.
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo experiment; exits with status 1 unless every check passes.
    Experiment {
        #[arg(value_enum)]
        which: Which,
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest height for the profile experiment.
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        /// TOML file overriding the tolerances.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report path; `.csv` selects CSV, anything else JSON. Stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Stat {
    LeafProfile,
    NodeProfile,
    SumHeights,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Bracketing,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Rayleigh,
    Height,
    Profile,
}

fn input_or_stdin(input: Option<String>) -> Result<String> {
    match input {
        Some(s) => Ok(s),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s.trim_end_matches(['\n', '\r']).to_string())
        }
    }
}

fn ratio(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn print_offspring(out: &mut impl Write, xi: &OffspringDist) -> Result<()> {
    const SHOWN: usize = 6;
    if let Some(ex) = xi.exact() {
        for (i, p) in ex.iter().enumerate() {
            writeln!(out, "xi_{i} = {}", ratio(p))?;
        }
    } else {
        for i in 0..SHOWN {
            writeln!(out, "xi_{i} = {}", xi.prob(i).to_sig_digits(30))?;
        }
        match xi.tail() {
            Some(OffspringTail::Geometric { start, ratio, .. }) => {
                writeln!(out, "xi_(i+1) = xi_i * {} for i >= {start}", ratio.to_sig_digits(30))?
            }
            Some(OffspringTail::Factorial { start, rate, .. }) => {
                writeln!(out, "xi_(i+1) = xi_i * {} / (i+1) for i >= {start}", rate.to_sig_digits(30))?
            }
            None => {}
        }
    }
    writeln!(out, "mean = {}", xi.mean().to_sig_digits(30))?;
    writeln!(out, "variance = {}", xi.variance().to_sig_digits(30))?;
    Ok(())
}

fn constants_json(sol: &CharacteristicSolution) -> Result<String> {
    let mut map = serde_json::Map::new();
    for (name, value) in sol.named() {
        let num = serde_json::Number::from_str(&value.to_sig_digits(30))?;
        map.insert(name.into(), serde_json::Value::Number(num));
    }
    Ok(serde_json::to_string_pretty(&serde_json::Value::Object(map))?)
}

fn emit_tree(out: &mut impl Write, t: &Tree, family: &Family, format: Format) -> Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", t.to_json())?,
        Format::Bracketing => {
            let kind = family.bracketing_kind().context("family has no bracketing notation")?;
            writeln!(out, "{}", kind.serialize(t)?)?
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.cmd {
        Cmd::Parse { kind, input } => {
            let t = kind.parse(&input_or_stdin(input)?)?;
            writeln!(out, "{}", t.to_json())?;
        }
        Cmd::Serialize { kind, input } => {
            let t = Tree::from_json(&input_or_stdin(input)?)?;
            writeln!(out, "{}", kind.serialize(&t)?)?;
        }
        Cmd::Count { family, n } => {
            for c in counting::family_counts(&family, n)? {
                writeln!(out, "{c}")?;
            }
        }
        Cmd::Enumerate { family, n } => {
            for t in counting::enumerate(&family, n)? {
                writeln!(out, "{}", t.to_json())?;
            }
        }
        Cmd::ExactStats { family, n, stat, k } => {
            let ex = ExactExpectations::new(&family.weights(), n);
            let need_k = || k.context("--k is required for profile statistics");
            let v = match stat {
                Stat::LeafProfile => ex.leaf_profile(n, need_k()?)?,
                Stat::NodeProfile => ex.node_profile(n, need_k()?)?,
                Stat::SumHeights => ex.sum_leaf_heights(n)?,
            };
            writeln!(out, "{}", ratio(&v))?;
        }
        Cmd::Sample { family, n, count, seed, method, format, max_attempts } => match method {
            Method::Counting => {
                let sampler = Sampler::for_family(&family, n)?;
                for i in 0..count {
                    let t = sampler.sample(&mut stream(seed, i as u64));
                    emit_tree(&mut out, &t, &family, format)?;
                }
            }
            Method::Gw => {
                let xi = analytics::family_offspring(&family)?;
                let table = sampling::OffspringTable::new(&xi);
                for i in 0..count {
                    let mut rng = stream(seed, i as u64);
                    let t = sampling::gw::sample_gw_with_table(&table, n, family.is_labeled(), &mut rng, max_attempts)?;
                    emit_tree(&mut out, &t, &family, format)?;
                }
            }
        },
        Cmd::Constants { family, json } => {
            let sol = analytics::family_constants(&family)?;
            if json {
                writeln!(out, "{}", constants_json(&sol)?)?;
            } else {
                writeln!(out, "family = {family}")?;
                print_offspring(&mut out, &analytics::family_offspring(&family)?)?;
                for (name, value) in sol.named() {
                    writeln!(out, "{name} = {}", value.to_sig_digits(30))?;
                }
            }
        }
        Cmd::Experiment { which, family, n, reps, seed, kmax, config, out: path } => {
            let tol = match config {
                Some(p) => Tolerances::load(&p)?,
                None => Tolerances::default(),
            };
            let report = match which {
                Which::Rayleigh => experiments::run_rayleigh(&family, n, reps, seed, &tol)?,
                Which::Height => experiments::run_expected_height(&family, n, reps, seed, &tol)?,
                Which::Profile => experiments::run_height_profile(&family, n, kmax, reps, seed, &tol)?,
            };
            match path {
                Some(p) => report.write_to(&p)?,
                None => writeln!(out, "{}", report.to_json()?)?,
            }
            out.flush()?;
            return Ok(if report.pass() { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Deep trees are handled iteratively, but serde and canonical forms
    // recurse; give them room.
    let handle = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || run(cli))
        .expect("spawn worker thread");
    match handle.join() {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(_) => {
            eprintln!("error: internal panic");
            ExitCode::from(2)
        }
    }
}
