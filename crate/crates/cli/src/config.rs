use std::path::{Path, PathBuf};

use dehn_core::density::PredicateSpec;
use dehn_core::enumerators::EnumeratorSpec;
use dehn_core::forcing::DEFAULT_BASE_TRUNCATION;
use dehn_core::gs::DEFAULT_GRID_RESOLUTION;
use dehn_core::words::{Alphabet, Word};
use dehn_core::SCHEMA_VERSION;
use serde::Deserialize;

use crate::CliError;

/// One experiment, read from JSON. Unknown keys are rejected at every level.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub alphabet: AlphabetConfig,
    pub p: u32,
    #[serde(default)]
    pub base_relators: Vec<String>,
    #[serde(default)]
    pub gs: GsConfig,
    pub forcing: Option<ForcingSection>,
    pub density: Option<DensitySection>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetConfig {
    pub d: usize,
    pub names: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GsConfig {
    pub t0: Option<String>,
    #[serde(default = "default_resolution")]
    pub grid_resolution: u32,
    /// Pick the grid point with the smallest `k` instead of the smallest `H`.
    #[serde(default)]
    pub minimize_k: bool,
}

impl Default for GsConfig {
    fn default() -> Self {
        GsConfig {
            t0: None,
            grid_resolution: DEFAULT_GRID_RESOLUTION,
            minimize_k: false,
        }
    }
}

fn default_resolution() -> u32 {
    DEFAULT_GRID_RESOLUTION
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    #[serde(default)]
    pub enumerators: Vec<EnumeratorSpec>,
    pub stage_budget: u64,
    /// Truncation order used to score the base relators.
    #[serde(default = "default_truncation")]
    pub truncation: usize,
}

fn default_truncation() -> usize {
    DEFAULT_BASE_TRUNCATION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityModeConfig {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub predicate: PredicateSpec,
    pub n_min: usize,
    pub n_max: usize,
    pub mode: DensityModeConfig,
    pub samples: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub log: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub header: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "config version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn alphabet(&self) -> Result<Alphabet, CliError> {
        let a = match &self.alphabet.names {
            Some(names) => Alphabet::with_names(names.clone())?,
            None => Alphabet::new(self.alphabet.d)?,
        };
        if a.rank() != self.alphabet.d {
            return Err(CliError::Config(format!(
                "alphabet lists {} names but d = {}",
                a.rank(),
                self.alphabet.d
            )));
        }
        Ok(a)
    }

    pub fn relators(&self, alphabet: &Alphabet) -> Result<Vec<Word>, CliError> {
        Ok(self
            .base_relators
            .iter()
            .map(|r| alphabet.parse(r))
            .collect::<Result<_, _>>()?)
    }
}
