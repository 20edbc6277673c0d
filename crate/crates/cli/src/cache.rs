//! Result cache stored as JSON lines, keyed by fence, operation and code
//! version.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CACHE_ENV: &str = "FENCES_CACHE_DIR";
pub const VERSION_TAG: &str = concat!("fences-", env!("CARGO_PKG_VERSION"));
const FILE_NAME: &str = "results.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
struct Key {
    fence: String,
    op: String,
    version: String,
}

#[derive(Serialize, Deserialize)]
struct Line {
    #[serde(flatten)]
    key: Key,
    value: serde_json::Value,
}

#[derive(Debug)]
pub struct Cache {
    path: PathBuf,
    entries: BTreeMap<Key, serde_json::Value>,
}

/// The environment variable wins over the configured directory; with
/// neither, nothing is cached.
pub fn resolve_dir(configured: Option<&Path>) -> Option<PathBuf> {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => Some(PathBuf::from(dir)),
        _ => configured.map(Path::to_path_buf),
    }
}

impl Cache {
    /// Loads whatever is already stored; unreadable lines are skipped.
    pub fn open(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        let path = dir.join(FILE_NAME);
        let mut entries = BTreeMap::new();
        if path.exists() {
            for line in fs::read_to_string(&path)?.lines() {
                if let Ok(l) = serde_json::from_str::<Line>(line) {
                    entries.insert(l.key, l.value);
                }
            }
        }
        Ok(Cache { path, entries })
    }

    fn key(fence: &str, op: &str) -> Key {
        Key {
            fence: fence.to_string(),
            op: op.to_string(),
            version: VERSION_TAG.to_string(),
        }
    }

    pub fn get<T: DeserializeOwned>(&self, fence: &str, op: &str) -> Option<T> {
        let v = self.entries.get(&Self::key(fence, op))?;
        serde_json::from_value(v.clone()).ok()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends new entries in the order given.
    pub fn put_all<T: Serialize>(&mut self, op: &str, items: &[(String, T)]) -> Result<(), CliError> {
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        for (fence, item) in items {
            let key = Self::key(fence, op);
            if self.entries.contains_key(&key) {
                continue;
            }
            let value = serde_json::to_value(item)?;
            let line = Line {
                key: key.clone(),
                value: value.clone(),
            };
            writeln!(file, "{}", serde_json::to_string(&line)?)?;
            self.entries.insert(key, value);
        }
        Ok(())
    }
}
