//! Experiment runner behind the `fpreg` binary.
//!
//! Every experiment yields a report carrying the config echo, the library
//! version, the generator identifier and the serialized result. Reports are
//! byte-identical across runs with equal inputs unless wall time is requested.

pub mod config;
pub mod emit;
pub mod experiment;
pub mod input;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde_json::json;

pub use emit::Format;
pub use experiment::Experiment;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Adds `wall_time_s` to structured reports.
    pub timing: bool,
}

/// Runs one experiment and returns the formatted report.
pub fn render(experiment: &Experiment, opts: &RunOptions) -> Result<Vec<u8>> {
    let start = Instant::now();
    let outcome = experiment.execute()?;
    Ok(match opts.format {
        Format::Rows => emit::render_rows(&outcome.table),
        Format::Json => {
            let mut report = json!({
                "command": experiment.name(),
                "config": serde_json::to_value(experiment)?,
                "version": fpreg_core::VERSION,
                "rng": fpreg_core::rng::RNG_ALGORITHM,
                "result": outcome.result,
            });
            if opts.timing {
                report["wall_time_s"] = json!(start.elapsed().as_secs_f64());
            }
            emit::render_json(report)
        }
    })
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

/// Runs an experiment and writes the report to `opts.out` or stdout.
pub fn run(experiment: &Experiment, opts: &RunOptions) -> Result<()> {
    if let (Some(out), Some(input)) = (&opts.out, experiment.input_path()) {
        if same_file(out, &input) {
            bail!("output path {} is the input set file", out.display());
        }
    }
    let bytes = render(experiment, opts)?;
    match &opts.out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

/// Runs a config file; its `format` and `out` take precedence over `defaults`.
pub fn run_config(path: &Path, defaults: &RunOptions) -> Result<()> {
    let cfg = config::load_config(path)?;
    let opts = RunOptions {
        format: cfg.format.unwrap_or(defaults.format),
        out: cfg.out.or_else(|| defaults.out.clone()),
        timing: defaults.timing,
    };
    run(&cfg.experiment, &opts).with_context(|| format!("running {}", path.display()))
}

/// Runs every config of a manifest in order, stopping at the first error.
pub fn run_batch(manifest: &Path, defaults: &RunOptions) -> Result<()> {
    for cfg in config::load_manifest(manifest)? {
        run_config(&cfg, defaults)?;
    }
    Ok(())
}
