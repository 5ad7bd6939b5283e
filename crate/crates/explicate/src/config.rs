//! Layered settings: defaults, then a TOML file, then environment, then flags.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use explicate_core::classifier::TrainConfig;
use explicate_core::dataset::SplitConfig;
use explicate_core::features::TfidfConfig;
use explicate_core::lime::LimeConfig;
use explicate_core::pipeline::FitConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llm_client::EndpointConfig;

pub const CONFIG_VERSION: u32 = 1;
pub const ENV_CONFIG: &str = "EXPLICATE_CONFIG";
pub const ENV_BASE_URL: &str = "EXPLICATE_LLM_BASE_URL";
pub const ENV_MODEL: &str = "EXPLICATE_LLM_MODEL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    /// Allowed CORS origins; empty allows any origin.
    pub cors_origins: Vec<String>,
    pub static_dir: Option<PathBuf>,
    pub llm_concurrency: usize,
    /// Append-only JSON-lines log of analysis reports.
    pub audit_log: Option<PathBuf>,
    pub max_body_bytes: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            cors_origins: Vec::new(),
            static_dir: None,
            llm_concurrency: 4,
            audit_log: None,
            max_body_bytes: 2 * 1024 * 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    pub model_path: PathBuf,
    pub lexicon_path: Option<PathBuf>,
    pub tfidf: TfidfConfig,
    pub train: TrainConfig,
    pub split: SplitConfig,
    pub lime: LimeConfig,
    /// Named features listed per report.
    pub top_features: usize,
    pub llm: EndpointConfig,
    pub service: ServiceConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            model_path: PathBuf::from("model.json"),
            lexicon_path: None,
            tfidf: TfidfConfig::default(),
            train: TrainConfig::default(),
            split: SplitConfig::default(),
            lime: LimeConfig::default(),
            top_features: 10,
            llm: EndpointConfig::default(),
            service: ServiceConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if config.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                config.version
            )));
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::FileUnreadable { path: path.to_path_buf(), source })?;
        Self::from_toml(&text).map_err(|e| Error::in_file(path, e))
    }

    /// Defaults, overlaid by `file` when given, then by the environment.
    pub fn load(file: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Self> {
        let mut config = match file {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        config.apply_env(env);
        Ok(config)
    }

    pub fn apply_env(&mut self, env: impl Fn(&str) -> Option<String>) {
        if let Some(v) = env(ENV_BASE_URL).filter(|v| !v.is_empty()) {
            self.llm.base_url = v;
        }
        if let Some(v) = env(ENV_MODEL).filter(|v| !v.is_empty()) {
            self.llm.model_name = v;
        }
    }

    pub fn fit_config(&self) -> FitConfig {
        FitConfig { tfidf: self.tfidf, train: self.train }
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        self.lime.validate()?;
        self.llm.validate()?;
        if !(self.split.test_fraction > 0.0 && self.split.test_fraction < 1.0) {
            return Err(Error::Config("split.test_fraction must lie in (0, 1)".into()));
        }
        if self.service.llm_concurrency == 0 {
            return Err(Error::Config("service.llm_concurrency must be positive".into()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn later_layers_win() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "version = 1\n[llm]\nbase_url = \"http://file\"\nmodel_name = \"m-file\"\n[train]\nepochs = 3\n")
            .unwrap();
        let env = |k: &str| (k == ENV_MODEL).then(|| "m-env".to_string());
        let c = Config::load(Some(&path), env).unwrap();
        assert_eq!(c.llm.base_url, "http://file");
        assert_eq!(c.llm.model_name, "m-env");
        assert_eq!(c.train.epochs, 3);
        assert_eq!(c.train.learning_rate, TrainConfig::default().learning_rate);
    }

    #[test]
    fn printed_config_parses_back() {
        let c = Config::default();
        assert_eq!(Config::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_and_versions_are_rejected() {
        assert!(Config::from_toml("version = 1\ncolour = 3\n").is_err());
        assert!(Config::from_toml("version = 2\n").is_err());
    }
}
