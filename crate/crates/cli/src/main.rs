use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reflectlab::config::{default_config_json, FileConfig, Overrides, Pair, Settings};
use reflectlab::error::CliError;
use reflectlab::suites::Suite;

#[derive(Parser)]
#[command(
    name = "reflectlab",
    version,
    about = "Numerical verification of R-matrix, reflection-equation and qKZ identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and report residuals.
    Check(CheckArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Suite name, or `all` for every suite except negative_control.
    #[arg(long, required_unless_present = "print_default_config")]
    suite: Option<String>,
    /// Local dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Number of sites.
    #[arg(long = "N")]
    sites: Option<usize>,
    /// Deformation parameter as RE,IM.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    q: Option<Pair>,
    /// Square root of the shift parameter as RE,IM.
    #[arg(long = "sqrt-p", value_parser = parse_pair, allow_hyphen_values = true)]
    sqrt_p: Option<Pair>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random trials per suite.
    #[arg(long)]
    trials: Option<usize>,
    /// Replace every pass threshold except the negative-control minimum.
    #[arg(long)]
    tol: Option<f64>,
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Where to write the JSON report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the default configuration and exit.
    #[arg(long)]
    print_default_config: bool,
}

fn parse_pair(s: &str) -> Result<Pair, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok([parse(re)?, parse(im)?])
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn check(args: CheckArgs) -> Result<bool, CliError> {
    if args.print_default_config {
        emit(&format!("{}\n", default_config_json()));
        return Ok(true);
    }
    reflectlab::configure_threads()?;
    let suites = Suite::parse_selection(args.suite.as_deref().unwrap_or_default())?;
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        n: args.n,
        sites: args.sites,
        q: args.q,
        sqrt_p: args.sqrt_p,
        seed: args.seed,
        trials: args.trials,
        tol: args.tol,
    };
    let settings = Settings::resolve(&file, &flags)?;
    let report = reflectlab::run(settings, &suites)?;
    if let Some(path) = &args.report {
        std::fs::write(path, report.to_json() + "\n")?;
    }
    let s = &report.summary;
    emit(&format!(
        "{}TOTAL {}/{} passed, {} failed, {} degenerate\n",
        report.human_summary(),
        s.passed,
        s.total - s.degenerate,
        s.failed,
        s.degenerate
    ));
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(args) => check(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
