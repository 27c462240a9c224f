//! Self-describing JSONL artifacts and run manifests.
//!
//! Every JSONL artifact starts with one header line
//! `{"header": {"tool", "version", "artifact", "seed", "config_hash", "config"}}`
//! followed by one record per line. Nothing time- or host-dependent is
//! written, so identical inputs and configuration give identical bytes.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL_NAME: &str = "dforge";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactHeader {
    pub tool: String,
    pub version: String,
    pub artifact: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: serde_json::Value,
}

impl ArtifactHeader {
    pub fn new(artifact: &str, seed: u64, config: &impl Serialize) -> Result<Self> {
        let config = serde_json::to_value(config)?;
        Ok(ArtifactHeader {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            artifact: artifact.into(),
            seed,
            config_hash: sha256_hex(serde_json::to_string(&config)?.as_bytes()),
            config,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: ArtifactHeader,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Writes a header line followed by one JSON record per line.
pub fn write_jsonl<T: Serialize>(path: impl AsRef<Path>, header: &ArtifactHeader, records: &[T]) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    serde_json::to_writer(&mut w, &HeaderLine { header: header.clone() })?;
    w.write_all(b"\n").map_err(io)?;
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Splits JSONL text into an optional header and the records after it.
pub fn parse_jsonl<T: DeserializeOwned>(raw: &str, context: &str) -> Result<(Option<ArtifactHeader>, Vec<T>)> {
    let mut header = None;
    let mut records = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if header.is_none() && records.is_empty() && line.trim_start().starts_with("{\"header\"") {
            let h: HeaderLine = serde_json::from_str(line).map_err(|e| Error::parse(context, i + 1, e))?;
            header = Some(h.header);
            continue;
        }
        records.push(serde_json::from_str(line).map_err(|e| Error::parse(context, i + 1, e))?);
    }
    Ok((header, records))
}

pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<(Option<ArtifactHeader>, Vec<T>)> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_jsonl(&raw, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    /// File name only, so manifests do not depend on the working directory.
    pub name: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Ok(InputDigest {
            name: path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            sha256: sha256_file(path)?,
        })
    }
}

/// Sidecar record of one pipeline stage: what went in, how it was
/// configured, and what came out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub stage: String,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub config: serde_json::Value,
    pub counts: serde_json::Map<String, serde_json::Value>,
    pub outputs: Vec<InputDigest>,
}

impl RunManifest {
    pub fn new(stage: &str, seed: u64, config: &impl Serialize) -> Result<Self> {
        Ok(RunManifest {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            stage: stage.into(),
            seed,
            inputs: Vec::new(),
            config: serde_json::to_value(config)?,
            counts: serde_json::Map::new(),
            outputs: Vec::new(),
        })
    }

    pub fn input(mut self, path: impl AsRef<Path>) -> Result<Self> {
        self.inputs.push(InputDigest::of(path)?);
        Ok(self)
    }

    pub fn output(mut self, path: impl AsRef<Path>) -> Result<Self> {
        self.outputs.push(InputDigest::of(path)?);
        Ok(self)
    }

    pub fn count(mut self, key: &str, value: impl Serialize) -> Result<Self> {
        self.counts.insert(key.into(), serde_json::to_value(value)?);
        Ok(self)
    }

    /// Writes `<artifact>.manifest.json` next to the artifact.
    pub fn write_beside(&self, artifact: impl AsRef<Path>) -> Result<()> {
        let artifact = artifact.as_ref();
        let mut name = artifact.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = Path::new(&name);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}
