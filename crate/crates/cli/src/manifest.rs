use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Provenance record written next to every output as `<out>.manifest.json`.
#[derive(Serialize)]
pub struct Manifest {
    command: String,
    config: serde_json::Value,
    tool_version: &'static str,
    /// sha256 of each input file, keyed by the path as given.
    inputs: BTreeMap<String, String>,
    timestamp: String,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value, inputs: &[&Path]) -> Result<Self> {
        let inputs = inputs
            .iter()
            .map(|p| Ok((p.display().to_string(), sha256_file(p)?)))
            .collect::<Result<_>>()?;
        Ok(Manifest {
            command: command.to_owned(),
            config,
            tool_version: env!("CARGO_PKG_VERSION"),
            inputs,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        })
    }

    pub fn write_for(&self, out: &Path) -> Result<()> {
        let path = manifest_path(out);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
