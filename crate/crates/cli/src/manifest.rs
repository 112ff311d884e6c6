use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Provenance record written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub seed: u64,
    /// SHA-256 of the effective configuration serialized as JSON.
    pub config_hash: String,
    pub version: String,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        let path = dir.join(format!("manifest_{}.json", self.command));
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
