//! Run manifests, CSV journals and binary snapshots.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use cslab_core::spectral::{ComplexField, Grid2D, Repr};
use cslab_core::wave::{Component, WaveState, ZeroMode};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::criteria::CriterionResult;
use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Content hash of a JSON value; object keys are sorted, so equal inputs hash equally.
pub fn content_hash(value: &serde_json::Value) -> String {
    sha256_hex(&serde_json::to_vec(value).expect("JSON values serialize"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub params: serde_json::Value,
    pub input_hash: String,
    /// Seconds since the Unix epoch; the only field that differs between reruns.
    pub created_unix: u64,
    /// Files written by the run, relative to the run directory.
    pub outputs: Vec<String>,
    /// Command-specific headline numbers.
    #[serde(default)]
    pub summary: serde_json::Value,
    pub results: Vec<CriterionResult>,
}

impl Manifest {
    pub fn new(command: &str, seed: Option<u64>, params: serde_json::Value) -> Self {
        let created_unix =
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            input_hash: content_hash(&params),
            params,
            created_unix,
            outputs: Vec::new(),
            summary: serde_json::Value::Null,
            results: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST);
        write_json(&path, self)?;
        Ok(path)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        read_json(&dir.join(MANIFEST))
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Json { path: path.into(), source: e })?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json { path: path.into(), source: e })
}

/// Append-only CSV table of numeric rows.
pub struct Journal {
    path: PathBuf,
    width: usize,
    writer: csv::Writer<fs::File>,
}

impl Journal {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        writer.write_record(header).map_err(|e| csv_error(path, e))?;
        Ok(Self { path: path.into(), width: header.len(), writer })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        assert_eq!(values.len(), self.width, "journal row width");
        self.writer.write_record(values.iter().map(|&v| number(v))).map_err(|e| csv_error(&self.path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

/// Shortest round-trip text; scientific outside `[1e-4, 1e15)`.
fn number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.position() {
        Some(p) => CliError::Parse { path: path.into(), line: p.line() as usize, reason: e.to_string() },
        None => CliError::Csv(format!("{}: {e}", path.display())),
    }
}

/// Header and rows of a numeric CSV journal; malformed rows name their line.
pub fn read_journal(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader.headers().map_err(|e| csv_error(path, e))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let row = rec
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.trim().parse::<f64>().map_err(|_| CliError::Parse {
                    path: path.into(),
                    line,
                    reason: format!("column '{}': '{v}' is not a number", header.get(i).map_or("?", String::as_str)),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Sidecar describing a binary snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub t: f64,
    pub n: usize,
    pub length: f64,
    pub components: Vec<Component>,
    pub zero_modes: usize,
    /// Layout of the `.bin` file.
    pub layout: String,
    pub sha256: String,
}

const LAYOUT: &str = "spectral coefficients field by field in FFT order, (re, im) as little-endian f64; \
                      then (value, rate) of each zero mode";

/// Write `<stem>.bin` and `<stem>.json`; returns both file names.
pub fn write_snapshot(dir: &Path, stem: &str, state: &WaveState<f64>) -> Result<[String; 2]> {
    let mut bytes = Vec::with_capacity(state.fields.len() * state.grid().len() * 16 + state.zero_modes.len() * 16);
    for f in &state.fields {
        for v in f.values() {
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    for z in &state.zero_modes {
        bytes.extend_from_slice(&z.value.to_le_bytes());
        bytes.extend_from_slice(&z.rate.to_le_bytes());
    }
    let bin = format!("{stem}.bin");
    let json = format!("{stem}.json");
    let path = dir.join(&bin);
    fs::File::create(&path).and_then(|mut f| f.write_all(&bytes)).map_err(|e| CliError::io(&path, e))?;
    let g = state.grid();
    let meta = SnapshotMeta {
        t: state.t,
        n: g.n(),
        length: g.length(),
        components: state.components.clone(),
        zero_modes: state.zero_modes.len(),
        layout: LAYOUT.into(),
        sha256: sha256_hex(&bytes),
    };
    write_json(&dir.join(&json), &meta)?;
    Ok([bin, json])
}

pub fn read_snapshot(dir: &Path, stem: &str) -> Result<WaveState<f64>> {
    let meta: SnapshotMeta = read_json(&dir.join(format!("{stem}.json")))?;
    let path = dir.join(format!("{stem}.bin"));
    let mut bytes = Vec::new();
    fs::File::open(&path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(|e| CliError::io(&path, e))?;
    let bad = |reason: &str| CliError::Parse { path: path.clone(), line: 0, reason: reason.into() };
    if sha256_hex(&bytes) != meta.sha256 {
        return Err(bad("content hash does not match the sidecar"));
    }
    let grid = Grid2D::new(meta.n, meta.length)?;
    let np = grid.len();
    if bytes.len() != (meta.components.len() * np + meta.zero_modes) * 16 {
        return Err(bad("size does not match the sidecar"));
    }
    let mut nums = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let mut fields = Vec::with_capacity(meta.components.len());
    for _ in &meta.components {
        let v: Vec<Complex<f64>> = (0..np).map(|_| Complex::new(nums.next().unwrap(), nums.next().unwrap())).collect();
        fields.push(ComplexField::from_values(grid, v, Repr::Spectral)?);
    }
    let zero_modes =
        (0..meta.zero_modes).map(|_| ZeroMode { value: nums.next().unwrap(), rate: nums.next().unwrap() }).collect();
    Ok(WaveState::new(meta.t, fields, meta.components, zero_modes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cslab_core::real::Sign;
    use cslab_core::spectral::WaveOperator;

    #[test]
    fn hash_is_order_independent() {
        let a: serde_json::Value = serde_json::from_str(r#"{"x": 1, "y": [2, 3]}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{"y": [2, 3], "x": 1}"#).unwrap();
        assert_eq!(content_hash(&a), content_hash(&b));
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid2D::new(8, 5.0).unwrap();
        let f = ComplexField::from_fn_spectral(g, |xi| Complex::new(xi[0], -xi[1] * 0.5));
        let s = WaveState::new(
            0.25,
            vec![f.clone(), f],
            vec![
                Component { sign: Sign::Plus, op: WaveOperator::D },
                Component { sign: Sign::Minus, op: WaveOperator::Bracket },
            ],
            vec![ZeroMode { value: 1.5, rate: -2.0 }],
        )
        .unwrap();
        write_snapshot(dir.path(), "s", &s).unwrap();
        assert_eq!(read_snapshot(dir.path(), "s").unwrap(), s);
    }

    #[test]
    fn journal_round_trip_and_parse_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("j.csv");
        let mut j = Journal::create(&p, &["t", "x"]).unwrap();
        j.row(&[0.0, 1e-12]).unwrap();
        j.row(&[f64::NAN, -3.25e17]).unwrap();
        j.row(&[0.5, 0.1]).unwrap();
        j.finish().unwrap();
        let (h, rows) = read_journal(&p).unwrap();
        assert_eq!(h, ["t", "x"]);
        assert_eq!(rows[0], vec![0.0, 1e-12]);
        assert!(rows[1][0].is_nan() && rows[1][1] == -3.25e17);
        assert_eq!(rows[2], vec![0.5, 0.1]);
        assert!(fs::read_to_string(&p).unwrap().contains("0,1e-12\n"));
        fs::write(&p, "t,x\n0,1\n0.5,oops\n").unwrap();
        match read_journal(&p) {
            Err(CliError::Parse { line, reason, .. }) => {
                assert_eq!(line, 3);
                assert!(reason.contains("'x'"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
        fs::write(&p, "t,x\n0,1\n0.5\n").unwrap();
        assert!(matches!(read_journal(&p), Err(CliError::Parse { line: 3, .. })));
    }
}
