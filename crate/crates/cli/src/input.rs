use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use fpreg_core::randmodel::sample_exact;
use fpreg_core::{DenseSubset, SpaceDescriptor};
use serde::{Deserialize, Serialize};

/// Where a command's input set comes from. Exactly one source may be given.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetInput {
    /// JSON set file `{"p": .., "n": .., "members": [..]}`
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<PathBuf>,
    /// Inline member indices, comma separated
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<u64>>,
    /// Uniform random subset of this size
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<usize>,
    /// Seed for `--sample`
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_seed: Option<u64>,
    /// The whole space
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub full: bool,
}

impl SetInput {
    pub fn load(&self, space: SpaceDescriptor) -> Result<DenseSubset> {
        let given = [self.set.is_some(), self.members.is_some(), self.sample.is_some(), self.full];
        if given.iter().filter(|&&b| b).count() != 1 {
            bail!("give exactly one of --set, --members, --sample, --full");
        }
        if self.sample.is_some() != self.sample_seed.is_some() {
            bail!("--sample and --sample-seed must be given together");
        }
        if let Some(path) = &self.set {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let set: DenseSubset =
                serde_json::from_str(&text).with_context(|| format!("parsing set file {}", path.display()))?;
            if *set.space() != space {
                bail!("set file {} is over {}, expected {space}", path.display(), set.space());
            }
            return Ok(set);
        }
        if let Some(members) = &self.members {
            return Ok(DenseSubset::from_indices(space, members.iter().copied())?);
        }
        if let (Some(r), Some(seed)) = (self.sample, self.sample_seed) {
            return Ok(sample_exact(space, r, seed)?);
        }
        Ok(DenseSubset::full(space))
    }

    pub(crate) fn rebase(&mut self, dir: &Path) {
        if let Some(p) = &self.set {
            if p.is_relative() {
                self.set = Some(dir.join(p));
            }
        }
    }

    pub(crate) fn path(&self) -> Option<&Path> {
        self.set.as_deref()
    }
}
