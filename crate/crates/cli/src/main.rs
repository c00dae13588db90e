//! `lpdegree`: deterministic replays of the σ₀ test, the encode/decode
//! round trip, and the degree-real pipeline.
//!
//! Exit codes: 0 on success, 1 on a parse error, 2 when a budget runs out.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use lpdegree::disintegration::{
    build_partition, degree_real, Disintegration, DisintError, FiniteDisintegration, PartitionConfig, Spine,
};
use lpdegree::effective::{parse_stages, StageCursor};
use lpdegree::exactnum::rational::{format_rational, parse_rational};
use lpdegree::exactnum::{Exponent, Rational};
use lpdegree::lpspace::{disjointness_test, sigma0, Disjointness, LpVector};
use lpdegree::presentation::{decode_set, oracle_isometry, CeSetOracle, DecodeConfig, PresentationError};
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "lpdegree", version, about = "Replays lpdegree pipelines on file-based inputs")]
struct Cli {
    /// Exponent p >= 1, as `num/den` or an integer.
    #[arg(long = "p", global = true, default_value = "1", value_parser = parse_exponent)]
    p: Exponent,
    /// Precision k: intervals of width at most 2^-k.
    #[arg(long, global = true, default_value_t = 20)]
    precision: u32,
    /// Stages to stream.
    #[arg(long, global = true, default_value_t = 200)]
    stages: usize,
    /// Search budget in stages or steps.
    #[arg(long, global = true, default_value_t = 10_000)]
    budget: usize,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// σ₀ of two vectors and the disjointness verdict.
    Sigma0 { f: PathBuf, g: PathBuf },
    /// Encodes a c.e. set into a presentation and decodes membership back.
    EncodeDecode {
        /// Lines `stage<TAB>element`.
        set: PathBuf,
        /// Decode 0..=N.
        #[arg(long, default_value_t = 16)]
        window: usize,
    },
    /// Streams the left cut of the degree real of a disintegration.
    DegreeReal {
        /// A tree file (`path<TAB>vector-or-tail` lines) or `spine`.
        source: String,
        /// The bound M on the chain-infimum norms.
        #[arg(long, default_value = "2", value_parser = parse_bound)]
        bound: Rational,
        /// Also replay the reduction back to member n on the stream.
        #[arg(long)]
        replay: Option<usize>,
    },
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_bound(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| format!("{e}"))
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Budget(_) => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Vector files: entries `index:value` spread over any number of lines.
fn read_vector(path: &Path) -> Result<LpVector, CliError> {
    let mut v = LpVector::zero();
    for (i, line) in read(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let part: LpVector =
            line.parse().map_err(|e| CliError::Parse(format!("{}:{}: {e}", path.display(), i + 1)))?;
        v = &v + &part;
    }
    Ok(v)
}

fn require_not_two(p: &Exponent) -> Result<(), CliError> {
    if p.is_two() {
        return Err(CliError::Parse("--p 2 is not allowed here: criterion requires p ≠ 2".into()));
    }
    Ok(())
}

fn cmd_sigma0(cli: &Cli, f: &Path, g: &Path, out: &mut String) -> Result<(), CliError> {
    let (f, g) = (read_vector(f)?, read_vector(g)?);
    let k = cli.precision;
    let s = sigma0(&f, &g, &cli.p, k);
    let _ = writeln!(out, "p\t{}", cli.p);
    let _ = writeln!(out, "sigma0\t{s}");
    let verdict = match disjointness_test(&f, &g, &cli.p, k) {
        Ok(Disjointness::Disjoint) => "disjoint".to_string(),
        Ok(Disjointness::Overlapping) => "overlapping".to_string(),
        Ok(Disjointness::Undecided(k)) => format!("undecided at precision {k}"),
        Err(_) => "suppressed (criterion requires p ≠ 2)".to_string(),
    };
    let _ = writeln!(out, "verdict\t{verdict}");
    Ok(())
}

fn cmd_encode_decode(cli: &Cli, set: &Path, window: usize, out: &mut String) -> Result<(), CliError> {
    require_not_two(&cli.p)?;
    let text = read(set)?;
    let record = parse_stages::<usize>(&text).map_err(|e| CliError::Parse(format!("{}: {e}", set.display())))?;
    let set = CeSetOracle::finite(record).map_err(|e| CliError::Parse(e.to_string()))?;
    let decider = set.decider.clone().expect("finite sets are decidable");
    let iso = oracle_isometry(set.clone(), cli.p.clone(), cli.budget.max(4 * window + 64))
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let config = DecodeConfig { max_steps: cli.budget };
    let mut failures = Vec::new();
    let mut agree = 0;
    for n in 0..=window {
        match decode_set(&iso, &set.enumeration, n, &cli.p, &config) {
            Ok(member) => {
                let ok = member == decider(n);
                agree += usize::from(ok);
                let _ = writeln!(
                    out,
                    "{n}\t{}\t{}",
                    if member { "in" } else { "out" },
                    if ok { "agree" } else { "DISAGREE" }
                );
            }
            Err(PresentationError::StageBudgetExceeded(why)) => {
                let _ = writeln!(out, "{n}\tbudget\t-");
                failures.push(format!("{n}: {why}"));
            }
            Err(e) => return Err(CliError::Parse(e.to_string())),
        }
    }
    let _ = writeln!(out, "agree\t{agree}/{}", window + 1);
    if !failures.is_empty() {
        return Err(CliError::Budget(failures.join("; ")));
    }
    Ok(())
}

fn load_tree(source: &str) -> Result<Arc<dyn Disintegration>, CliError> {
    if source == "spine" {
        return Ok(Arc::new(Spine));
    }
    let text = read(Path::new(source))?;
    let tree = FiniteDisintegration::parse(&text).map_err(|e| CliError::Parse(format!("{source}: {e}")))?;
    Ok(Arc::new(tree))
}

fn cmd_degree_real(
    cli: &Cli,
    source: &str,
    bound: &Rational,
    replay: Option<usize>,
    out: &mut String,
) -> Result<(), CliError> {
    require_not_two(&cli.p)?;
    let phi = load_tree(source)?;
    let part = Arc::new(build_partition(phi, cli.p.clone(), PartitionConfig { max_stage: cli.budget }));
    let degree = degree_real(part.clone(), bound.clone()).map_err(|e| match e {
        DisintError::StageBudgetExceeded(s) => CliError::Budget(s),
        e => CliError::Parse(e.to_string()),
    })?;
    let emit = |c: &mut Box<dyn StageCursor<Rational>>, out: &mut String, prefix: &str| {
        for s in 0..cli.stages {
            let items = c.advance().map_err(|e| CliError::Parse(e.to_string()))?;
            for q in items {
                let _ = writeln!(out, "{prefix}{s}\t{}", format_rational(&q));
            }
        }
        Ok::<(), CliError>(())
    };
    emit(&mut degree.r.stream.cursor(), out, "")?;
    if let Some(n) = replay {
        emit(&mut degree.recover(n).stream.cursor(), out, &format!("replay {n}\t"))?;
    }
    if part.starved() {
        return Err(CliError::Budget(format!("tree search stopped at the {} stage budget", cli.budget)));
    }
    Ok(())
}

fn run(cli: &Cli, out: &mut String) -> Result<(), CliError> {
    match &cli.command {
        Command::Sigma0 { f, g } => cmd_sigma0(cli, f, g, out),
        Command::EncodeDecode { set, window } => cmd_encode_decode(cli, set, *window, out),
        Command::DegreeReal { source, bound, replay } => cmd_degree_real(cli, source, bound, *replay, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut out = String::new();
    let result = run(&cli, &mut out);
    // partial output is flushed even when a budget ran out
    let written = match &cli.out {
        Some(path) => fs::write(path, &out).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(out.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
