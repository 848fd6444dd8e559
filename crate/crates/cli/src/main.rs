use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dyadic::counterexample::{AlphaSequence, DEFAULT_MAX_RESOLUTION};
use dyadic::{Exponent, GridFunction};
use dyadic_cli::experiments;
use dyadic_cli::families::{self, Family};
use dyadic_cli::input::read_samples;
use dyadic_cli::report::{Format, Report};
use serde::Serialize;

/// Walsh-Fourier summability experiments on the dyadic group.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// L1 norms and identities of the logarithmic and Riesz kernels.
    Kernels {
        #[command(flatten)]
        common: Common,
        /// Largest dyadic exponent n (orders 2^n).
        #[arg(long, default_value_t = 10)]
        n_max: u32,
    },
    /// Convergence of L_{2^n} f to f.
    Converge {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: Source,
    },
    /// The divergence table of the stacked-atom martingale.
    Diverge {
        #[command(flatten)]
        common: Common,
    },
    /// Lower bound of the harmonic-weighted Walsh block sums.
    Lemma2 {
        #[command(flatten)]
        common: Common,
    },
    /// Weighted series of partial sums and logarithmic means over H_p norms.
    Diagnostics {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Args)]
struct Common {
    /// Resolution N (2^N cells).
    #[arg(long)]
    resolution: Option<u32>,
    /// Exponent, as a fraction like 1/2 or a decimal.
    #[arg(long)]
    p: Option<Exponent>,
    /// Comma-separated strictly increasing alphas.
    #[arg(long, value_delimiter = ',', default_value = "1,10")]
    alphas: Vec<u32>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest resolution allowed.
    #[arg(long, default_value_t = DEFAULT_MAX_RESOLUTION)]
    max_memory_gate: u32,
}

#[derive(Args)]
struct Source {
    /// Builtin test function.
    #[arg(long, value_enum, conflicts_with = "input")]
    family: Option<Family>,
    /// Sample file: N on the first line, then 2^N values.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Seed for the random family.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Common {
    fn sequence(&self, default_p: Exponent) -> Result<AlphaSequence> {
        let p = self.p.unwrap_or(default_p);
        let p = if p.is_sub_one() { p } else { Exponent::half() };
        Ok(AlphaSequence::new(self.alphas.clone(), p)?)
    }
}

fn load(
    source: &Source,
    common: &Common,
    default_res: u32,
    default_p: Exponent,
) -> Result<GridFunction> {
    if let Some(path) = &source.input {
        let f = read_samples(path)?;
        if let Some(n) = common.resolution.filter(|&n| n != f.resolution()) {
            anyhow::bail!(
                "--resolution {n} disagrees with the sample file (N = {})",
                f.resolution()
            );
        }
        return Ok(f);
    }
    let res = common.resolution.unwrap_or(default_res);
    if res > common.max_memory_gate {
        anyhow::bail!(
            "resolution {res} exceeds the memory gate {}; raise it with --max-memory-gate",
            common.max_memory_gate
        );
    }
    let family = source.family.unwrap_or(Family::Indicator);
    families::build(family, res, source.seed, &common.sequence(default_p)?)
}

fn emit<R: Serialize>(report: &Report<R>, common: &Common) -> Result<bool> {
    match &common.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            report.write_to(common.format, &mut w)?;
            w.flush()?;
        }
        None => report.write_to(common.format, io::stdout().lock())?,
    }
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    if !report.passed {
        eprintln!("FAIL: at least one asserted inequality does not hold");
    }
    Ok(report.passed)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Kernels { common, n_max } => {
            let res = common.resolution.unwrap_or(12);
            emit(
                &experiments::run_kernels(res, n_max, common.max_memory_gate)?,
                &common,
            )
        }
        Command::Converge { common, source } => {
            let f = load(&source, &common, 14, Exponent::half())?;
            let p = common.p.unwrap_or_else(Exponent::one).value();
            emit(
                &experiments::run_convergence(&f, p, common.max_memory_gate)?,
                &common,
            )
        }
        Command::Diverge { common } => {
            let seq = AlphaSequence::new(
                common.alphas.clone(),
                common.p.unwrap_or_else(Exponent::half),
            )?;
            let res = common.resolution.unwrap_or(21);
            emit(
                &experiments::run_divergence(&seq, res, common.max_memory_gate)?,
                &common,
            )
        }
        Command::Lemma2 { common } => {
            let res = common.resolution.unwrap_or(11);
            emit(
                &experiments::run_lemma2(res, common.max_memory_gate)?,
                &common,
            )
        }
        Command::Diagnostics { common, source } => {
            let p = common.p.unwrap_or_else(Exponent::half);
            let source = Source {
                family: source
                    .family
                    .or(source.input.is_none().then_some(Family::Atom)),
                ..source
            };
            let f = load(&source, &common, 8, p)?;
            emit(
                &experiments::run_diagnostics(&f, p.value(), common.max_memory_gate)?,
                &common,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
