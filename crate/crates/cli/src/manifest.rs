//! Run manifests: config hash, tool version, and input digests. No
//! timestamps, so reruns over identical inputs produce identical bytes.

use std::path::Path;

use sha2::{Digest, Sha256};

use forumrank_core::error::Result;

use crate::config::RunConfig;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

pub fn file_digest(path: &Path) -> Result<String> {
    Ok(sha256_hex(&crate::read_bytes(path)?))
}

/// Write `<out_dir>/run-manifest.txt` for one command invocation.
pub fn write_run_manifest(command: &str, cfg: &RunConfig) -> Result<()> {
    let mut text = String::new();
    text.push_str(&format!("command = {command}\n"));
    text.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
    text.push_str(&format!(
        "config_sha256 = {}\n",
        sha256_hex(cfg.canonical().as_bytes())
    ));
    for (key, path) in [("posts", &cfg.posts), ("sales", &cfg.sales)] {
        if let Some(path) = path {
            if path.exists() {
                text.push_str(&format!(
                    "{key}_sha256 = {}  {}\n",
                    file_digest(path)?,
                    path.display()
                ));
            }
        }
    }
    text.push_str("--- resolved configuration ---\n");
    text.push_str(cfg.canonical());
    crate::write_file(&cfg.out_dir.join("run-manifest.txt"), text.as_bytes())
}
