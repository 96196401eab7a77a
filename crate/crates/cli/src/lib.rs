//! Configuration-driven verification runs over the `foldhk` library.
//!
//! [`run_suite`] executes the selected suites and assembles a
//! [`VerificationReport`]; [`write_outputs`] puts the CSV tables and
//! `summary.json` in an output directory. The `foldhk` binary wraps both.

pub mod config;
pub mod report;
pub mod suites;
pub mod tables;

use config::{RunConfig, Suite};
use report::{Provenance, VerificationReport};
use std::path::Path;
use std::time::{Duration, Instant};
use tables::Table;

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: VerificationReport,
    pub tables: Vec<Table>,
    /// Wall time per suite; kept out of the report so it stays reproducible.
    pub timings: Vec<(String, Duration)>,
}

type SuiteFn = fn(&RunConfig) -> suites::SuiteOutput;

/// Runs the selected suites concurrently and assembles the results in the
/// fixed order nahm, laplacian, cotangent.
pub fn run_suite(cfg: &RunConfig) -> RunOutcome {
    let all: [(Suite, &str, SuiteFn); 3] = [
        (Suite::Nahm, "nahm", suites::nahm::run),
        (Suite::Laplacian, "laplacian", suites::laplacian::run),
        (Suite::Cotangent, "cotangent", suites::cotangent::run),
    ];
    let selected: Vec<_> = all.into_iter().filter(|(s, _, _)| cfg.suite.includes(*s)).collect();
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&(_, name, f)| {
                scope.spawn(move || {
                    let t0 = Instant::now();
                    let out = f(cfg);
                    (name, out, t0.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    let mut reports = Vec::new();
    let mut tables = Vec::new();
    let mut timings = Vec::new();
    for (name, out, dt) in results {
        reports.push(out.report);
        tables.extend(out.tables);
        timings.push((name.to_string(), dt));
    }
    let provenance = Provenance {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: cfg.digest(),
        seed: cfg.seed,
    };
    RunOutcome {
        report: VerificationReport::new(provenance, reports),
        tables,
        timings,
    }
}

/// Writes every table and `summary.json` into `dir`, creating it if needed.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for t in &outcome.tables {
        t.write_to(dir)?;
    }
    std::fs::write(dir.join(SUMMARY_FILE), outcome.report.to_json())
}
