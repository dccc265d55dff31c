//! On-disk outputs: CSV tables, JSON documents with sorted keys, a manifest
//! of file hashes and a timestamped log kept apart from the artifacts.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Result, SpcError};

pub const MANIFEST: &str = "manifest.json";
pub const RUN_LOG: &str = "run.log";

/// SHA-256 (hex) of the compact JSON form of `config`. Object keys are
/// sorted, so the hash does not depend on the key order of the input file.
pub fn config_hash(config: &Value) -> String {
    hex::encode(Sha256::digest(config.to_string().as_bytes()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Shortest round-trip decimal form, switching to exponent notation for very
/// small or very large magnitudes.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// CSV text with LF line endings. Header names are written verbatim.
pub fn format_csv(header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut out = header.join(",");
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(SpcError::Usage(format!(
                "row {i} has {} fields, header has {}",
                row.len(),
                header.len()
            )));
        }
        let fields: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn format_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| SpcError::Usage(format!("serialization: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| SpcError::Usage(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Output directory of one CLI run.
pub struct ArtifactWriter {
    dir: PathBuf,
    config_hash: String,
    files: BTreeMap<String, String>,
    log: File,
}

impl ArtifactWriter {
    pub fn create(dir: impl AsRef<Path>, config_hash: &str) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| SpcError::io(&dir, e))?;
        let log_path = dir.join(RUN_LOG);
        let log = File::create(&log_path).map_err(|e| SpcError::io(&log_path, e))?;
        let mut w = Self {
            dir,
            config_hash: config_hash.to_string(),
            files: BTreeMap::new(),
            log,
        };
        w.log(&format!("config_hash {config_hash}"))?;
        Ok(w)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    pub fn log(&mut self, message: &str) -> Result<()> {
        let t = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
        writeln!(self.log, "{}.{:03} {message}", t.as_secs(), t.subsec_millis())
            .map_err(|e| SpcError::io(self.dir.join(RUN_LOG), e))
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| SpcError::io(&path, e))?;
        self.files.insert(name.to_string(), sha256_hex(contents.as_bytes()));
        self.log(&format!("wrote {name}"))
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let text = format_csv(header, rows)?;
        self.write(name, &text)
    }

    /// Writes `value` as JSON. Objects get a `config_hash` key.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut v = serde_json::to_value(value).map_err(|e| SpcError::Usage(format!("serialization: {e}")))?;
        if let Value::Object(map) = &mut v {
            map.insert("config_hash".into(), Value::String(self.config_hash.clone()));
        }
        let text = format_json(&v)?;
        self.write(name, &text)
    }

    /// Writes the manifest (config hash and SHA-256 of every artifact).
    pub fn finish(mut self) -> Result<PathBuf> {
        let manifest = serde_json::json!({
            "config_hash": self.config_hash,
            "files": self.files,
        });
        let text = format_json(&manifest)?;
        let path = self.dir.join(MANIFEST);
        fs::write(&path, text).map_err(|e| SpcError::io(&path, e))?;
        self.log("wrote manifest.json")?;
        Ok(path)
    }
}
