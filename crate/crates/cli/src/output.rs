//! Output-path resolution and atomic file writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::Failure;

/// Environment variable overriding the fallback output directory. An
/// explicit `--out` (flag or config) always wins.
pub const OUT_DIR_VAR: &str = "SCSIM_OUT_DIR";

const FALLBACK_OUT_DIR: &str = "scsim-out";

pub fn resolve_out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit.unwrap_or_else(|| {
        std::env::var_os(OUT_DIR_VAR)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(FALLBACK_OUT_DIR))
    })
}

/// Writes via a temporary file in the target directory plus a rename, so
/// a failed run never leaves a partial artifact behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| Failure {
        kind: "io",
        message: format!("cannot write {}: {}", path.display(), e.error),
    })?;
    Ok(())
}

/// Path rendered with forward slashes for stable report contents.
pub fn display_path(path: &Path) -> String {
    path.to_string_lossy().replace('\\', "/")
}
