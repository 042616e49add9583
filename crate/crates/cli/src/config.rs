//! Configuration file handling. One JSON schema (the core `SimConfig`)
//! shared by every subcommand.

use crate::CliError;
use gatesim_core::SimConfig;
use std::path::Path;

pub fn load_config(path: &Path) -> Result<SimConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading config {}", path.display()), e))?;
    SimConfig::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn save_config(path: &Path, cfg: &SimConfig) -> Result<(), CliError> {
    std::fs::write(path, cfg.to_json() + "\n")
        .map_err(|e| CliError::io(&format!("writing config {}", path.display()), e))
}

/// Fingerprint rendered the way manifests and matrix files carry it.
pub fn fingerprint_hex(cfg: &SimConfig) -> String {
    format!("{:016x}", cfg.fingerprint())
}
