//! Flat key-value config files. Flags always win over config entries.

use std::path::{Path, PathBuf};

use crate::commands::CliError;

#[derive(Default)]
pub struct ConfigFile(toml::Table);

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::precondition(format!("cannot read config {}: {e}", path.display()))
                })?;
                let table: toml::Table = text.parse().map_err(|e| {
                    CliError::precondition(format!("malformed config {}: {e}", path.display()))
                })?;
                Ok(ConfigFile(table))
            }
        }
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        match self.0.get(key) {
            Some(toml::Value::Float(f)) => Some(*f),
            Some(toml::Value::Integer(i)) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn u64(&self, key: &str) -> Option<u64> {
        match self.0.get(key) {
            Some(toml::Value::Integer(i)) if *i >= 0 => Some(*i as u64),
            _ => None,
        }
    }

    pub fn usize(&self, key: &str) -> Option<usize> {
        self.u64(key).map(|v| v as usize)
    }

    pub fn string(&self, key: &str) -> Option<String> {
        match self.0.get(key) {
            Some(toml::Value::String(s)) => Some(s.clone()),
            _ => None,
        }
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.string(key).map(PathBuf::from)
    }
}
