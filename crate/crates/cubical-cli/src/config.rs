//! Flat key=value configuration files mirroring the long flags.
//!
//! Lines look like `model = uniform:d=2` or `n-list = 8,16,32`; blank lines
//! and `#` comments are ignored. Command-line flags override file values.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::Failure;

#[derive(Default)]
pub struct FileConfig {
    entries: HashMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(char::is_whitespace))
                .ok_or_else(|| format!("config line {} is not `key = value`", lineno + 1))?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    /// Flag value if present, else the parsed config value.
    pub fn resolve<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(text) => text
                .parse::<T>()
                .map(Some)
                .map_err(|_| Failure::invalid(format!("config key `{key}`: bad value `{text}`"))),
        }
    }

    /// Comma-separated list variant of `resolve`.
    pub fn resolve_list<T: FromStr>(
        &self,
        key: &str,
        flag: Option<Vec<T>>,
    ) -> Result<Option<Vec<T>>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(text) => text
                .split(',')
                .map(|tok| tok.trim().parse::<T>())
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|_| Failure::invalid(format!("config key `{key}`: bad list `{text}`"))),
        }
    }

    pub fn resolve_path(
        &self,
        key: &str,
        flag: Option<PathBuf>,
    ) -> Result<Option<PathBuf>, Failure> {
        self.resolve(key, flag)
    }
}
