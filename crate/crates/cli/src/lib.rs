//! Experiment runner: config loading, subcommands, artifact output and the
//! reproduction suite.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;
pub mod suite;

use commands::Outcome;
use config::{Experiment, ExperimentConfig};
use error::CliError;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Computes one experiment in memory. `progress` receives one line per
/// finished suite criterion.
pub fn execute(exp: Experiment, cfg: &ExperimentConfig, progress: &mut dyn FnMut(&str)) -> Result<Outcome, CliError> {
    match exp {
        Experiment::Bandstructure => commands::bandstructure(cfg),
        Experiment::Gapscan => commands::gapscan(cfg),
        Experiment::Invariant => commands::invariant(cfg),
        Experiment::EdgeSpectrum => commands::edge_spectrum(cfg),
        Experiment::Conductivity => commands::conductivity_run(cfg),
        Experiment::ValleySweep => commands::valley_sweep(cfg),
        Experiment::JunctionTable => commands::junction_table(cfg),
        Experiment::Propagate => commands::propagate_run(cfg),
        Experiment::Steer => commands::steer(cfg),
        Experiment::Scatter1d => commands::scatter1d(cfg),
        Experiment::Reproduce => {
            let reports = suite::run_suite(cfg, |r| progress(&r.line()));
            let mut out = Outcome::default();
            suite::summary_csv(&reports, &mut out.artifacts);
            for r in reports.iter().filter(|r| r.status == suite::Status::Fail) {
                out.failures.push(format!("criterion {} ({})", r.id, r.title));
            }
            out.results.insert("criteria".into(), json!(reports));
            Ok(out)
        }
    }
}

/// Runs `exp`, writes its artifacts and manifest into `out`, and returns the
/// manifest path. Tolerance failures are reported after the artifacts are
/// written; any other error leaves `out` untouched.
pub fn run(
    exp: Experiment,
    cfg: &ExperimentConfig,
    out: &Path,
    threads: usize,
    progress: &mut dyn FnMut(&str),
) -> Result<PathBuf, CliError> {
    if let Some(e) = cfg.experiment {
        if e != exp {
            return Err(CliError::Config(format!(
                "config is for '{}' but '{}' was requested",
                e.name(),
                exp.name()
            )));
        }
    }
    let start = Instant::now();
    let outcome = execute(exp, cfg, progress)?;
    let echo = ExperimentConfig {
        experiment: Some(exp),
        ..cfg.clone()
    };
    let status = if outcome.failures.is_empty() { "ok" } else { "tolerance_failure" };
    let manifest = json!({
        "tool": "dirac-moire",
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": dirac_moire::VERSION,
        "experiment": exp.name(),
        "status": status,
        "failures": outcome.failures,
        "threads": threads,
        "parallel_feature": dirac_moire::par::parallel_available(),
        "wall_time_s": start.elapsed().as_secs_f64(),
        "config": echo,
        "results": outcome.results,
        "solver_stats": outcome.stats,
        "artifacts": outcome.artifacts.entries(),
    });
    let bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    outcome.artifacts.commit(out, &bytes)?;
    if !outcome.failures.is_empty() {
        return Err(CliError::Tolerance(outcome.failures.join("; ")));
    }
    Ok(out.join("manifest.json"))
}
