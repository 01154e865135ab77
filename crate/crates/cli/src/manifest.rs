//! `manifest.json`: every artifact in the output directory with the
//! content hash and the hash of the configuration that produced it.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Hash of the canonical (key-sorted) JSON form of `config`.
pub fn config_hash(config: &BTreeMap<String, Value>) -> String {
    sha256_hex(
        serde_json::to_string(config)
            .expect("config serializes")
            .as_bytes(),
    )
}

/// Merges `artifacts` (file names relative to `dir`) into the manifest,
/// replacing older entries with the same path.
pub fn record(
    dir: &Path,
    command: &str,
    config: &BTreeMap<String, Value>,
    artifacts: &[&str],
) -> Result<(), CliError> {
    let path = dir.join(FILE);
    let mut manifest: Value = match std::fs::read(&path) {
        Ok(bytes) => serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Data(format!("corrupt {}: {e}", path.display())))?,
        Err(_) => json!({ "artifacts": {}, "configs": {} }),
    };
    let hash = config_hash(config);
    manifest["configs"][&hash] = json!(config);
    for name in artifacts {
        let bytes = std::fs::read(dir.join(name))?;
        manifest["artifacts"][*name] = json!({
            "command": command,
            "config_hash": hash,
            "sha256": sha256_hex(&bytes),
        });
    }
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n")?;
    Ok(())
}
