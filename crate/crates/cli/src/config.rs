//! Run configuration: a TOML file plus `--set section.key=value` overrides.
//!
//! ```toml
//! seed = 7
//!
//! [corpus]
//! dir = "corpus"
//!
//! [model]
//! layers = 2
//! dim = 64
//!
//! [train]
//! steps = 500
//!
//! [decode]
//! kind = "greedy"
//! ```
//!
//! The top-level `seed` feeds model initialization, the training stream and
//! decoding. Unknown keys are rejected.

use crate::error::CliError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use vecticon_core::dataset::SampleConfig;
use vecticon_core::metrics::DEFAULT_TAU;
use vecticon_core::model::{ModelConfig, TrainConfig};
use vecticon_core::sampler::DecodeStrategy;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusConfig {
    /// Raw corpus (`index.tsv` plus SVG files) or a prepared cache.
    pub dir: Option<PathBuf>,
    pub drop_outer_frame: bool,
    pub take_first: Option<usize>,
    pub min_word_freq: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            dir: None,
            drop_outer_frame: false,
            take_first: None,
            min_word_freq: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    pub tau: f64,
    pub grid: usize,
    pub render: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            grid: 16,
            render: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServeConfig {
    pub host: String,
    pub port: u16,
    pub max_count: usize,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self {
            host: "127.0.0.1".into(),
            port: 8080,
            max_count: 16,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub corpus: CorpusConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    /// Training-stream augmentation (masking and text modes).
    pub stream: SampleConfig,
    pub decode: DecodeStrategy,
    pub metrics: MetricsConfig,
    pub serve: ServeConfig,
}

fn parse_value(raw: &str) -> toml::Value {
    // Anything that is not a TOML literal is taken as a bare string.
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn apply_override(root: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad override key `{key}`")));
    }
    let mut table = root;
    for p in &parts[..parts.len() - 1] {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("`{p}` in `{key}` is not a section")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

impl RunConfig {
    /// Reads `path` (if any), applies overrides in order and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(CliError::io(p))?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::Config(format!("{}: {}", p.display(), e.message())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg.effective())
    }

    fn validate(&self) -> Result<(), CliError> {
        let stray = [
            ("model.seed", self.model.seed),
            ("train.seed", self.train.seed),
            ("decode.seed", self.decode.seed),
        ];
        for (name, v) in stray {
            if v != 0 && v != self.seed {
                return Err(CliError::Config(format!("set the top-level `seed` instead of `{name}`")));
            }
        }
        self.decode.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.train.steps == 0 || self.train.batch_size == 0 || self.train.steps_per_epoch == 0 {
            return Err(CliError::Config("train.steps, train.batch_size and train.steps_per_epoch must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.stream.mask_prob) {
            return Err(CliError::Config("stream.mask_prob must lie in [0, 1]".into()));
        }
        if self.metrics.grid == 0 || self.metrics.render < self.metrics.grid {
            return Err(CliError::Config("metrics.render must be at least metrics.grid > 0".into()));
        }
        Ok(())
    }

    fn effective(mut self) -> Self {
        self.model.seed = self.seed;
        self.train.seed = self.seed;
        self.decode.seed = self.seed;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.effective()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
