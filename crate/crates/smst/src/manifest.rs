//! Per-invocation `manifest.json`: config echo, config hash, version and
//! wall times.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::formats::write_json;

pub const MANIFEST_FILE: &str = "manifest.json";

/// `smst <crate version> (<git describe>)`.
pub fn version_string() -> String {
    format!(
        "smst {} ({})",
        env!("CARGO_PKG_VERSION"),
        env!("SMST_GIT_DESCRIBE")
    )
}

/// SHA-256 of the canonical JSON of the config.
pub fn config_hash(cfg: &RunConfig) -> Result<String> {
    let bytes = serde_json::to_vec(cfg)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub wall_time_s: f64,
    /// Per-seed wall times of a simulation sweep.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub seed_wall_time_s: BTreeMap<u64, f64>,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        Ok(Self {
            version: version_string(),
            config_hash: config_hash(cfg)?,
            config: cfg.clone(),
            wall_time_s: 0.0,
            seed_wall_time_s: BTreeMap::new(),
            outputs: Vec::new(),
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join(MANIFEST_FILE), self)
    }
}
