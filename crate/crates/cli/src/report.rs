//! Summaries of finished runs.

use std::path::Path;

use serde::Serialize;

use crate::criteria::CriterionResult;
use crate::error::{CliError, Result};
use crate::io::{read_journal, Manifest, MANIFEST};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input_hash: String,
    pub results: Vec<CriterionResult>,
    /// CSV outputs with their row counts.
    pub tables: Vec<(String, usize)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn table(&self) -> String {
        let mut out = format!("run: {} (input {})\n", self.command, &self.input_hash[..self.input_hash.len().min(16)]);
        for (name, rows) in &self.tables {
            out.push_str(&format!("table {name}: {rows} rows\n"));
        }
        if self.results.is_empty() {
            out.push_str("no criteria recorded\n");
        }
        for r in &self.results {
            out.push_str(&r.line());
            out.push('\n');
        }
        out
    }
}

/// Read `dir/manifest.json`, re-judge the stored metrics against the current
/// thresholds and check that every CSV output parses.
pub fn report(dir: &Path) -> Result<Report> {
    let path = dir.join(MANIFEST);
    if !path.exists() {
        return Err(CliError::validation("dir", format!("{} has no {MANIFEST}", dir.display())));
    }
    let m = Manifest::read(dir)?;
    let mut tables = Vec::new();
    for out in m.outputs.iter().filter(|o| o.ends_with(".csv")) {
        let (_, rows) = read_journal(&dir.join(out))?;
        tables.push((out.clone(), rows.len()));
    }
    Ok(Report {
        command: m.command,
        input_hash: m.input_hash,
        results: m.results.iter().map(CriterionResult::rejudge).collect(),
        tables,
    })
}
