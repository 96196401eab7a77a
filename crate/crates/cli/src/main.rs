use clap::{Parser, Subcommand};
use foldhk_cli::config::{RunConfig, Suite};
use foldhk_cli::{run_suite, write_outputs};
use std::path::PathBuf;
use std::process::ExitCode;

const DEFAULT_OUT: &str = "foldhk-out";

/// Verify folded hyperkähler identities numerically.
#[derive(Parser)]
#[command(name = "foldhk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults reproduce the acceptance runs.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for CSV tables and summary.json.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for the randomized sweeps (overrides the config).
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Nahm flow, reconstruction and fold asymptotics.
    Nahm,
    /// Mode-by-mode folded Laplacian.
    Laplacian,
    /// Cotangent-bundle model and invariant polynomials.
    Cotangent,
    /// All suites.
    Verify,
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return usage_error(format!("cannot read {}: {e}", path.display())),
            };
            match RunConfig::parse_toml(&text) {
                Ok(c) => c,
                Err(e) => return usage_error(e),
            }
        }
        None => RunConfig::default(),
    };
    cfg.suite = match cli.command {
        Command::Nahm => Suite::Nahm,
        Command::Laplacian => Suite::Laplacian,
        Command::Cotangent => Suite::Cotangent,
        Command::Verify => Suite::All,
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Err(e) = cfg.validate() {
        return usage_error(e);
    }
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));

    let outcome = run_suite(&cfg);
    if let Err(e) = write_outputs(&outcome, &out_dir) {
        return usage_error(format!("cannot write to {}: {e}", out_dir.display()));
    }
    for suite in &outcome.report.suites {
        for c in &suite.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let value = c.value.map_or_else(|| "-".to_string(), |v| format!("{v:e}"));
            println!("{verdict} {}/{} = {value} ({:?})", suite.suite, c.name, c.bound);
        }
    }
    for (name, dt) in &outcome.timings {
        eprintln!("{name}: {:.3} s", dt.as_secs_f64());
    }
    if outcome.report.pass {
        println!("verdict: PASS");
        ExitCode::SUCCESS
    } else {
        println!("verdict: FAIL");
        ExitCode::from(1)
    }
}
