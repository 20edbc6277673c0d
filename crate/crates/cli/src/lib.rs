//! Sweeps, verification suites and reports for the `fences` command.

pub mod cache;
pub mod config;
pub mod dims;
pub mod lifted;
pub mod orbit;
pub mod verify;

use std::io::Write;
use std::path::Path;

use fences_core::FenceError;
use thiserror::Error;

use crate::cache::Cache;
use crate::config::{Command, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Fence(#[from] FenceError),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Bad arguments map to 2, anything else that stops a run to 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Fence(
                FenceError::Parse { .. }
                | FenceError::ShapeInvalid { .. }
                | FenceError::NotAnIdeal(_)
                | FenceError::TooLarge { .. }
                | FenceError::IndexOutOfRange { .. }
                | FenceError::StepLimit { .. },
            ) => 2,
            _ => 1,
        }
    }
}

fn emit(cfg: &RunConfig, body: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body)?,
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn wants_json(path: Option<&Path>) -> bool {
    path.and_then(Path::extension).is_some_and(|e| e == "json")
}

/// Runs one configured command and reports whether every check passed.
/// Main output goes to `cfg.out` when set, otherwise to `stdout`; short
/// summaries always go to `stdout`.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<bool, CliError> {
    match &cfg.command {
        Command::Dims { t, max_n } => {
            let shapes = dims::sweep_shapes(*t, *max_n);
            let mut cache = match cache::resolve_dir(cfg.cache_dir.as_deref()) {
                Some(dir) => Some(Cache::open(&dir)?),
                None => None,
            };
            let reports = dims::sweep_dims(&shapes, cache.as_mut())?;
            let body = if wants_json(cfg.out.as_deref()) {
                serde_json::to_string_pretty(&reports)? + "\n"
            } else {
                dims::to_csv(&reports)
            };
            emit(cfg, &body, stdout)?;
            let row = dims::table_row(&reports);
            let range = t.map_or_else(|| "all t".to_string(), |t| format!("t={t}"));
            writeln!(
                stdout,
                "{range}, n<={max_n}: {} fences, {} single-orbit, {} with dim_IH = dim_IT",
                row.fences, row.single_orbit, row.ih_equals_it
            )?;
            Ok(reports.iter().all(|r| r.formula_agrees()))
        }
        Command::Verify { max_n } => {
            let report = verify::verify(*max_n, cfg.seed)?;
            let body = if wants_json(cfg.out.as_deref()) {
                serde_json::to_string_pretty(&report)? + "\n"
            } else {
                report.render()
            };
            emit(cfg, &body, stdout)?;
            Ok(report.passed())
        }
        Command::Scan {
            conjecture,
            max_apt,
            t,
            max_n,
        } => {
            let range = orbit::scan_range(*conjecture, *max_apt, *t, *max_n)?;
            let reports = orbit::scan(*conjecture, range)?;
            let body = if wants_json(cfg.out.as_deref()) {
                serde_json::to_string_pretty(&reports)? + "\n"
            } else {
                orbit::render_scan(&reports)
            };
            emit(cfg, &body, stdout)?;
            Ok(reports.iter().all(|r| r.holds))
        }
        Command::Orbit { fence, ideal, map } => {
            let cycle = orbit::orbit(fence, ideal, *map)?;
            emit(cfg, &orbit::render_orbit(&cycle), stdout)?;
            Ok(true)
        }
        Command::Lifted {
            fence,
            realm,
            steps,
            exact_steps,
        } => {
            let (trace, report) = lifted::lifted(fence, *realm, cfg.seed, *steps, *exact_steps, cfg.tolerances)?;
            emit(cfg, &fences_core::lifted::trace_json_lines(&trace), stdout)?;
            writeln!(stdout, "{}", serde_json::to_string(&report)?)?;
            Ok(report.passed())
        }
    }
}
