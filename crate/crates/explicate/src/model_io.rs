//! Model, lexicon and registry files.

use std::path::Path;

use explicate_core::features::{FeatureRegistry, LexiconConfig, LEXICON_VERSION};
use explicate_core::pipeline::{Detector, MODEL_FORMAT_VERSION};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::FileUnreadable { path: path.to_path_buf(), source })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| Error::FileUnwritable { path: path.to_path_buf(), source })?;
    }
    std::fs::write(path, bytes).map_err(|source| Error::FileUnwritable { path: path.to_path_buf(), source })
}

pub fn model_to_json(detector: &Detector) -> String {
    serde_json::to_string_pretty(detector).expect("detector serializes")
}

/// Parses a model document, checking the format version before the body.
pub fn model_from_json(text: &str) -> Result<Detector> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::CorruptModel(e.to_string()))?;
    match value.get("format_version").and_then(|v| v.as_str()) {
        Some(v) if v == MODEL_FORMAT_VERSION => {}
        Some(v) => {
            return Err(Error::VersionMismatch { found: v.to_string(), expected: MODEL_FORMAT_VERSION.to_string() })
        }
        None => return Err(Error::CorruptModel("missing format_version".into())),
    }
    serde_json::from_value(value).map_err(|e| Error::CorruptModel(e.to_string()))
}

pub fn save_model(detector: &Detector, path: &Path) -> Result<()> {
    write(path, model_to_json(detector).as_bytes())
}

pub fn load_model(path: &Path) -> Result<Detector> {
    let bytes = read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::CorruptModel(e.to_string()))?;
    model_from_json(text)
}

/// Format version plus a content fingerprint of the serialized model.
pub fn model_version(detector: &Detector) -> String {
    let digest = Sha256::digest(model_to_json(detector).as_bytes());
    let short: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    format!("{MODEL_FORMAT_VERSION}+{short}")
}

#[derive(Serialize, Deserialize)]
struct LexiconFile {
    version: u32,
    #[serde(flatten)]
    lexicons: LexiconConfig,
}

pub fn lexicon_to_toml(lexicons: &LexiconConfig) -> String {
    toml::to_string_pretty(&LexiconFile { version: LEXICON_VERSION, lexicons: lexicons.clone() })
        .expect("lexicons serialize")
}

pub fn lexicon_from_toml(text: &str) -> Result<LexiconConfig> {
    let file: LexiconFile = toml::from_str(text).map_err(|e| Error::Config(format!("lexicon file: {e}")))?;
    if file.version != LEXICON_VERSION {
        return Err(Error::Config(format!(
            "lexicon file version {} is not supported (expected {LEXICON_VERSION})",
            file.version
        )));
    }
    file.lexicons.validate()?;
    Ok(file.lexicons)
}

pub fn load_lexicon(path: &Path) -> Result<LexiconConfig> {
    let bytes = read(path)?;
    lexicon_from_toml(&String::from_utf8_lossy(&bytes)).map_err(|e| Error::in_file(path, e))
}

/// Registry rows as CSV: `index,technical_name,human_name,concept_group`.
pub fn write_registry_csv<W: std::io::Write>(registry: &FeatureRegistry, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "technical_name", "human_name", "concept_group"])?;
    for (i, e) in registry.entries().iter().enumerate() {
        w.write_record([i.to_string().as_str(), &e.technical_name, &e.human_name, e.concept_group.as_str()])?;
    }
    w.flush().map_err(|e| Error::FileUnwritable { path: "<registry>".into(), source: e })?;
    Ok(())
}
