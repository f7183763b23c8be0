//! Content-addressed result cache and atomic file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::Command;
use crate::error::CliError;

pub const CACHE_ENV: &str = "QIBOUND_CACHE_DIR";

/// Named output files; the first is always `result.json`.
pub type Artifacts = Vec<(String, Vec<u8>)>;

/// SHA-256 over the tool version and the canonical JSON of the command.
pub fn cache_key(cmd: &Command) -> Result<String, CliError> {
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    h.update(b"\n");
    h.update(serde_json::to_vec(cmd)?);
    Ok(format!("{:x}", h.finalize()))
}

pub fn cache_root(out: &Path) -> PathBuf {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => out.join(".cache"),
    }
}

pub fn lookup(root: &Path, key: &str) -> Option<Artifacts> {
    let dir = root.join(key);
    let mut names: Vec<String> = fs::read_dir(&dir)
        .ok()?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().map(|t| t.is_file()).unwrap_or(false))
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    if !names.iter().any(|n| n == "result.json") {
        return None;
    }
    names.sort_by_key(|n| (n != "result.json", n.clone()));
    names.into_iter().map(|n| fs::read(dir.join(&n)).ok().map(|b| (n, b))).collect()
}

/// Stages the files in a private directory, then renames it into place. A
/// concurrent writer that wins the rename leaves identical content behind.
pub fn store(root: &Path, key: &str, files: &Artifacts) -> Result<(), CliError> {
    fs::create_dir_all(root)?;
    let target = root.join(key);
    if target.exists() {
        return Ok(());
    }
    let staging = tempfile::Builder::new().prefix(".staging-").tempdir_in(root)?;
    for (name, bytes) in files {
        fs::write(staging.path().join(name), bytes)?;
    }
    let staged = staging.keep();
    if fs::rename(&staged, &target).is_err() {
        let _ = fs::remove_dir_all(&staged);
        if !target.exists() {
            return Err(CliError::io(format!("could not publish cache entry {}", target.display())));
        }
    }
    Ok(())
}

/// Write-temp-then-rename in the destination directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::io(e.to_string()))?;
    Ok(())
}
