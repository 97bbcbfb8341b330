//! Pipeline configuration files: TOML key/value pairs over the defaults, with
//! `key=value` overrides from the command line.

use std::path::Path;

use scenex_core::config::ConfigError;
use scenex_core::PipelineConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigFileError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config {path}: {source}")]
    Parse { path: String, source: toml::de::Error },
    #[error("override {0:?} is not of the form key=number")]
    Override(String),
    #[error(transparent)]
    Invalid(#[from] ConfigError),
}

pub fn parse_config(text: &str, origin: &str) -> Result<PipelineConfig, ConfigFileError> {
    toml::from_str(text).map_err(|source| ConfigFileError::Parse { path: origin.to_string(), source })
}

/// Loads `path`, or the defaults when no path is given, then applies the
/// overrides in order and validates the result.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<PipelineConfig, ConfigFileError> {
    let mut cfg = match path {
        Some(p) => {
            let origin = p.display().to_string();
            let text = std::fs::read_to_string(p).map_err(|source| ConfigFileError::Io { path: origin.clone(), source })?;
            parse_config(&text, &origin)?
        }
        None => PipelineConfig::default(),
    };
    for o in overrides {
        let (key, value) = o.split_once('=').ok_or_else(|| ConfigFileError::Override(o.clone()))?;
        let value: f64 = value.trim().parse().map_err(|_| ConfigFileError::Override(o.clone()))?;
        cfg.set(key.trim(), value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// The defaults rendered as a config file.
pub fn default_config_toml() -> String {
    toml::to_string(&PipelineConfig::default()).expect("config serializes")
}
