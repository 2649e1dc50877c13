//! On-disk cache of norm computations, one JSON file per key.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    /// `$XDG_CACHE_HOME/lpgpd`, falling back to `~/.cache/lpgpd`.
    pub fn default_dir() -> Option<PathBuf> {
        std::env::var_os("XDG_CACHE_HOME")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| Path::new(&h).join(".cache")))
            .map(|d| d.join("lpgpd"))
    }

    /// Hex sha256 of the canonical serialization of `key`.
    pub fn key(key: &Value) -> String {
        let digest = Sha256::digest(key.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn get(&self, key: &str) -> Option<Value> {
        let text = fs::read_to_string(self.path(key)?).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Failures to write are reported on stderr and otherwise ignored.
    pub fn put(&self, key: &str, value: &Value) {
        let Some(path) = self.path(key) else { return };
        let tmp = path.with_extension("json.tmp");
        let res = path
            .parent()
            .map_or(Ok(()), fs::create_dir_all)
            .and_then(|_| fs::write(&tmp, value.to_string()))
            .and_then(|_| fs::rename(&tmp, &path));
        if let Err(e) = res {
            eprintln!("warning: could not write cache entry {}: {e}", path.display());
        }
    }
}
