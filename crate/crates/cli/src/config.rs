//! Run configuration, stored as JSON.

use std::path::{Path, PathBuf};

use fences_core::lifted::Realm;
use fences_core::selfdual::Conjecture;
use fences_core::{DynamicsMap, FenceShape};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Serializes through `Display` / `FromStr`, so fences read as `"F(3,3,2)"`.
mod text {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Dimension table; `t = None` sweeps every segment count.
    Dims { t: Option<usize>, max_n: usize },
    Verify { max_n: usize },
    Scan {
        conjecture: Conjecture,
        max_apt: Option<usize>,
        t: Option<usize>,
        max_n: Option<usize>,
    },
    Orbit {
        #[serde(with = "text")]
        fence: FenceShape,
        ideal: String,
        #[serde(with = "text")]
        map: DynamicsMap,
    },
    Lifted {
        #[serde(with = "text")]
        fence: FenceShape,
        realm: Realm,
        steps: usize,
        /// Birational steps iterated in exact arithmetic.
        exact_steps: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bound on `|mean T_p|` (PL) or `|geometric mean − 1|` (birational).
    pub toggle: f64,
    /// Bound on the distance of a lifted basis statistic from its constant.
    pub basis: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            toggle: 1e-3,
            basis: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            seed: 0,
            tolerances: Tolerances::default(),
            out: None,
            cache_dir: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}
