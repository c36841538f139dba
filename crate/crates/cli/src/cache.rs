//! Content-addressed result cache.
//!
//! Each entry is `<dir>/<sha256>.json` holding the key, the tool version, the
//! result JSON and a digest of that result. Writes go to a temporary file in
//! the same directory and are renamed into place, so a reader sees either no
//! entry or a complete one. Entries that fail to parse, carry the wrong key or
//! fail the digest check are treated as absent.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "TGAMMA_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    version: String,
    exit_code: i32,
    value: Value,
    digest: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical key material (command, field, normalized
/// parameters, precision) plus the tool version.
pub fn key_for(material: &Value) -> String {
    let text = serde_json::to_string(&serde_json::json!({ "version": VERSION, "key": material })).expect("json");
    sha256_hex(text.as_bytes())
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: dir.into() }
    }

    /// `$TGAMMA_CACHE_DIR`, else `$XDG_CACHE_HOME/tgamma`, else
    /// `$HOME/.cache/tgamma`, else a directory under the system temp dir.
    pub fn default_dir() -> PathBuf {
        if let Some(d) = std::env::var_os(CACHE_DIR_ENV) {
            return d.into();
        }
        if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
            return Path::new(&d).join("tgamma");
        }
        if let Some(h) = std::env::var_os("HOME") {
            return Path::new(&h).join(".cache").join("tgamma");
        }
        std::env::temp_dir().join("tgamma-cache")
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A valid entry for `key`, or `None` (missing, unreadable or corrupted).
    pub fn get(&self, key: &str) -> Option<(Value, i32)> {
        let text = fs::read_to_string(self.path_for(key)).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        let body = serde_json::to_string(&entry.value).ok()?;
        (entry.key == key && entry.version == VERSION && entry.digest == sha256_hex(body.as_bytes()))
            .then_some((entry.value, entry.exit_code))
    }

    /// Atomically stores an entry.
    pub fn put(&self, key: &str, value: &Value, exit_code: i32) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let body = serde_json::to_string(value)?;
        let entry = Entry {
            key: key.to_string(),
            version: VERSION.to_string(),
            exit_code,
            value: value.clone(),
            digest: sha256_hex(body.as_bytes()),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path_for(key)).map_err(|e| e.error)?;
        Ok(())
    }
}
