//! Atomic file output and the content-addressed enumeration cache.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Cache of expensive enumerations keyed by a hash of their inputs.
#[derive(Debug, Clone, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub const ENV: &'static str = "TORUSKIT_CACHE";

    /// Enabled when `TORUSKIT_CACHE` is set and nonempty.
    pub fn from_env() -> Self {
        Self {
            dir: std::env::var_os(Self::ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
        }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(&self, namespace: &str, key: &Value) -> Option<PathBuf> {
        let hash = sha256_hex(format!("{namespace}\n{key}").as_bytes());
        self.dir.as_ref().map(|d| d.join(format!("{namespace}-{}.json", &hash[..32])))
    }

    /// Returns the cached value for `key`, or computes, stores and returns it.
    ///
    /// Unreadable or stale entries are recomputed; a failed store is not an error.
    pub fn get_or_compute<V, E>(
        &self,
        namespace: &str,
        key: &Value,
        compute: impl FnOnce() -> Result<V, E>,
        encode: impl Fn(&V) -> Value,
        decode: impl Fn(&Value) -> Option<V>,
    ) -> Result<V, E> {
        let Some(path) = self.path_for(namespace, key) else {
            return compute();
        };
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(entry) = serde_json::from_str::<Value>(&text) {
                if entry.get("key") == Some(key) {
                    if let Some(v) = entry.get("value").and_then(&decode) {
                        return Ok(v);
                    }
                }
            }
        }
        let value = compute()?;
        let entry = serde_json::json!({ "key": key, "value": encode(&value) });
        if let Err(e) = write_atomic(&path, entry.to_string().as_bytes()) {
            eprintln!("warning: cannot write cache entry {}: {e}", path.display());
        }
        Ok(value)
    }
}
