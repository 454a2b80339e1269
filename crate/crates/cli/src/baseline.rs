//! Frozen sup-scan results keyed by a hash of their parameters.

use std::path::{Path, PathBuf};

use cslab_core::nullform::scan::SupScan;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CliError, Result};
use crate::io::{content_hash, ensure_dir, read_json, write_json};

/// Directory of the baselines shipped with the crate.
pub fn shipped_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("baselines")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub params: serde_json::Value,
    pub scan: SupScan,
}

fn params(scan: &SupScan, radius: f64) -> serde_json::Value {
    json!({ "name": scan.name, "samples": scan.samples, "seed": scan.seed, "radius": radius })
}

/// `<name>-<first 16 hex digits of the parameter hash>.json`.
pub fn path_for(dir: &Path, scan: &SupScan, radius: f64) -> PathBuf {
    let hash = content_hash(&params(scan, radius));
    dir.join(format!("{}-{}.json", scan.name, &hash[..16]))
}

pub fn freeze_scan(dir: &Path, scan: &SupScan, radius: f64) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = path_for(dir, scan, radius);
    write_json(&path, &Baseline { params: params(scan, radius), scan: scan.clone() })?;
    Ok(path)
}

/// Relative deviation of a fresh scan from its frozen counterpart, maximum
/// and maximizer included. A missing baseline is an error.
pub fn compare_scan(dir: &Path, scan: &SupScan, radius: f64) -> Result<f64> {
    let path = path_for(dir, scan, radius);
    if !path.exists() {
        return Err(CliError::validation(
            "baseline",
            format!("no frozen baseline {} (create it with `verify --freeze`)", path.display()),
        ));
    }
    let frozen: Baseline = read_json(&path)?;
    let rel = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
    if frozen.scan.argmax.len() != scan.argmax.len() {
        return Ok(f64::INFINITY);
    }
    Ok(frozen
        .scan
        .argmax
        .iter()
        .zip(&scan.argmax)
        .map(|(a, b)| rel(*a, *b))
        .fold(rel(frozen.scan.max, scan.max), f64::max))
}
