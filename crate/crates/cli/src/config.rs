//! Settings read from the file named by `CLO_CONFIG`.

use std::path::Path;

use anyhow::{bail, Context};
use clo_core::engine::AlgebraConfig;
use clo_core::EngineConfig;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct Config {
    pub rank_budget: usize,
    pub depth_budget: usize,
    /// Multiplier on the `2^n` copy cap for ω and ω* powers.
    pub index_cap_override: Option<u64>,
    pub memo_limit: Option<usize>,
    pub witness_limit: usize,
    pub output_format: OutputFormat,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            rank_budget: 6,
            depth_budget: 3,
            index_cap_override: None,
            memo_limit: None,
            witness_limit: 100_000,
            output_format: OutputFormat::Text,
        }
    }
}

impl Config {
    pub fn load() -> anyhow::Result<Config> {
        match std::env::var_os("CLO_CONFIG") {
            Some(path) => Config::from_file(Path::new(&path)),
            None => Ok(Config::default()),
        }
    }

    pub fn from_file(path: &Path) -> anyhow::Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Config = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if self.index_cap_override == Some(0) || self.memo_limit == Some(0) || self.witness_limit == 0 {
            bail!("configured caps must be positive");
        }
        Ok(())
    }

    pub fn engine(&self) -> EngineConfig {
        EngineConfig {
            algebra: AlgebraConfig {
                cap_scale: self.index_cap_override.unwrap_or(1),
                memo_limit: self.memo_limit,
                ..AlgebraConfig::default()
            },
            witness_limit: self.witness_limit,
            ..EngineConfig::default()
        }
    }
}
