//! Optional TOML configuration: the same keys as the command-line flags,
//! consulted only where the flag was not given.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<f64>,
    pub pa: Option<f64>,
    pub pb: Option<f64>,
    pub ps: Option<f64>,
    pub kind: Option<String>,
    pub mode: Option<String>,
    pub bits: Option<usize>,
    pub bit_lengths: Option<String>,
    pub rates: Option<String>,
    pub seed: Option<u64>,
    pub flip_mode: Option<String>,
    pub flip_rate: Option<f64>,
    pub source: Option<String>,
    pub format: Option<String>,
    pub cycles: Option<usize>,
    pub params: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub a: Option<PathBuf>,
    pub b: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, Failure> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        kind: "config",
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    toml::from_str(&text).map_err(|e| Failure {
        kind: "config",
        message: format!("{}: {e}", path.display()),
    })
}
