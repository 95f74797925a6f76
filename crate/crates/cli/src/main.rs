//! `smalldev`: command-line access to small-deviation probabilities, weighted
//! series, dichotomy diagnostics and walk simulations.

mod commands;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::*;
use manifest::{strip_manifest_flag, RunManifest};
use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "smalldev",
    version,
    about = "Small-deviation probabilities and weighted series"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write a JSON run manifest to this path.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// P(sup |W| <= x) on [0, 1] with a certified truncation error.
    BrownianCdf(BrownianCdfArgs),
    /// P(sup |W| <= sqrt(pi^2 / (8 log n)) (eps + a_n)) for one n.
    WienerTerm(WienerTermArgs),
    /// Weighted Wiener series at one eps, normalised by lambda^(a+1).
    Series(SeriesArgs),
    /// Normalised series along a lambda schedule, extrapolated to lambda = 0.
    LimitProbe(LimitProbeArgs),
    /// Limit constant and critical threshold for (r, a, tau).
    Constants(ConstantsArgs),
    /// Gamma function.
    Gamma(GammaArgs),
    /// int_{y0}^inf y^a e^{-lambda y} dy.
    TailIntegral(TailIntegralArgs),
    /// Convergence verdict and partial-sum table for a boundary psi.
    Dichotomy(DichotomyArgs),
    /// Monte Carlo estimate of P(M_n <= sigma phi(n) (eps + a_n)).
    Simulate(SimulateArgs),
    /// Sampled walk maxima M_n, one row per sample.
    WalkMax(WalkMaxArgs),
    /// Exact (rademacher) or grid (gaussian) value of P(M_n <= x).
    Oracle(OracleArgs),
    /// Empirical exponent -log P(M_n <= x sigma phi(n)) / log n.
    ExponentCheck(ExponentCheckArgs),
    /// Rerun the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, clap::Args)]
struct ReplayArgs {
    /// Manifest written by an earlier `--manifest` run.
    path: PathBuf,
}

fn run(cli: Cli, args: &[String]) -> Result<(), CliError> {
    let Cli {
        format,
        manifest,
        command,
    } = cli;
    let start = Instant::now();
    let (name, outcome) = match command {
        Command::BrownianCdf(a) => ("brownian-cdf", brownian_cdf(a)),
        Command::WienerTerm(a) => ("wiener-term", wiener_term(a)),
        Command::Series(a) => ("series", series(a)),
        Command::LimitProbe(a) => ("limit-probe", limit_probe(a)),
        Command::Constants(a) => ("constants", constants(a)),
        Command::Gamma(a) => ("gamma", gamma(a)),
        Command::TailIntegral(a) => ("tail-integral", tail_integral(a)),
        Command::Dichotomy(a) => ("dichotomy", dichotomy(a)),
        Command::Simulate(a) => ("simulate", simulate(a)),
        Command::WalkMax(a) => ("walk-max", walk_max(a)),
        Command::Oracle(a) => ("oracle", oracle(a)),
        Command::ExponentCheck(a) => ("exponent-check", exponent_check(a)),
        Command::Replay(a) => return replay(&a.path, format, manifest),
    };
    let Outcome {
        output,
        params,
        seeds,
        workers,
    } = outcome?;
    print!("{}", output.render(format));
    if let Some(path) = manifest {
        let record = RunManifest {
            command_line: strip_manifest_flag(args),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: name.to_string(),
            seeds,
            workers,
            wall_time_seconds: start.elapsed().as_secs_f64(),
            params,
        };
        record
            .write(&path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn replay(
    path: &std::path::Path,
    format: Format,
    manifest: Option<PathBuf>,
) -> Result<(), CliError> {
    let record =
        RunManifest::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if record.command_line.first().map(String::as_str) == Some("replay") {
        return Err(CliError::Usage(
            "a manifest cannot replay another replay".into(),
        ));
    }
    let mut args = record.command_line.clone();
    // The recorded format wins unless the caller passes a new one.
    if !args
        .iter()
        .any(|a| a == "--format" || a.starts_with("--format="))
    {
        args.push("--format".into());
        args.push(format!("{format:?}").to_lowercase());
    }
    if let Some(out) = manifest {
        args.push("--manifest".into());
        args.push(out.display().to_string());
    }
    let argv = std::iter::once("smalldev".to_string()).chain(args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli, &args)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
