use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::emit::Format;
use crate::experiment::Experiment;

/// A TOML experiment file:
///
/// ```toml
/// format = "json"
/// out = "report.json"
///
/// [experiment]
/// command = "tower"
/// p = 3
/// t = 2
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub experiment: Experiment,
}

/// A batch manifest: config files run in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub configs: Vec<PathBuf>,
}

fn dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Parses a config file; set and output paths are taken relative to it.
pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let mut cfg: ConfigFile = toml::from_str(&read(path)?).with_context(|| format!("in config {}", path.display()))?;
    let dir = dir_of(path);
    cfg.experiment.rebase(&dir);
    if let Some(out) = &cfg.out {
        if out.is_relative() {
            cfg.out = Some(dir.join(out));
        }
    }
    Ok(cfg)
}

pub fn load_manifest(path: &Path) -> Result<Vec<PathBuf>> {
    let m: Manifest = toml::from_str(&read(path)?).with_context(|| format!("in manifest {}", path.display()))?;
    let dir = dir_of(path);
    Ok(m.configs.into_iter().map(|c| if c.is_relative() { dir.join(c) } else { c }).collect())
}
