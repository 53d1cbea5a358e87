//! Run manifest: every invocation records what ran, with what inputs, and
//! which files it produced. Reports embed the manifest hash so a result file
//! can always be traced to its exact configuration.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub master_seed: u64,
    pub resolved_config: serde_json::Value,
    pub outputs: Vec<String>,
    pub timestamp_unix: u64,
    pub manifest_hash: String,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    /// The hash covers everything except the timestamp, so identical runs
    /// made at different times carry identical hashes.
    pub fn new(
        command: &str,
        master_seed: u64,
        resolved_config: serde_json::Value,
        outputs: Vec<String>,
    ) -> RunManifest {
        let tool_version = env!("CARGO_PKG_VERSION").to_string();
        let hashed = serde_json::json!({
            "tool_version": tool_version,
            "command": command,
            "master_seed": master_seed,
            "resolved_config": resolved_config,
            "outputs": outputs,
        });
        let digest = Sha256::digest(
            serde_json::to_vec(&hashed).expect("manifest serializes").as_slice(),
        );
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            tool_version,
            command: command.to_string(),
            master_seed,
            resolved_config,
            outputs,
            timestamp_unix,
            manifest_hash: hex(&digest),
        }
    }
}

/// Write via a temp file in the same directory plus rename, so a crash never
/// leaves a half-written report behind.
pub fn atomic_write(path: &Path, content: &[u8]) -> Result<(), String> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let stem = path
        .file_name()
        .ok_or_else(|| format!("{path:?} has no file name"))?
        .to_string_lossy()
        .into_owned();
    let tmp = dir.join(format!(".{stem}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, content).map_err(|e| format!("write {tmp:?}: {e}"))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        format!("rename {tmp:?} -> {path:?}: {e}")
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}
