//! Subcommand bodies. Each writes its tables into an output directory and
//! stores a manifest there.

use std::path::Path;

use cslab_core::evolve::{picard_iterate, ContractionStatus};
use cslab_core::norms::{critical_exponent, FLParams};
use cslab_core::nullform::{fk_exponents, DeltaCase};
use serde_json::json;

use crate::baseline;
use crate::config::{ExperimentConfig, SystemKind};
use crate::criteria::CriterionResult;
use crate::error::{CliError, Result};
use crate::experiments::{self, Model, ScanSettings};
use crate::io::{ensure_dir, write_snapshot, Journal, Manifest};

/// Column sets of every CSV the tool writes.
pub const CSV_COLUMNS: &str = "\
CSV outputs (one header row, numeric columns):
  simulate        diagnostics.csv  t, lorenz_residual, constraint_residual, realness_defect
                                   (csd adds charge, charge_drift)
  picard          picard.csv       iteration, xsb, sup_fl, ratio
  verify nullforms sup_scans.csv   seed, symbol_bound_equal, symbol_bound_unequal, angle_bound,
                                   hyperbolic_leibniz, i_sup
  verify integrals integrals.csv   tau, xi, alpha1, alpha2, value, reference, rel_error
  verify norms    bilinear.csv     n, nt, max_ratio, mean_ratio
  verify scaling  exponents.csv    r, s_c, threshold, gap
  suite           suite.csv        id, passed, seconds";

fn finish(dir: &Path, mut m: Manifest, outputs: &[&str], summary: serde_json::Value) -> Result<Manifest> {
    m.outputs = outputs.iter().map(|s| s.to_string()).collect();
    m.summary = summary;
    m.write(dir)?;
    Ok(m)
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("plain data serializes")
}

/// Integrate one trajectory, journaling diagnostics every `stride` steps.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Manifest> {
    let dir = &cfg.output;
    ensure_dir(dir)?;
    let manifest = Manifest::new(
        &format!("simulate {}", if cfg.system == SystemKind::Csh { "csh" } else { "csd" }),
        Some(cfg.data.seed),
        to_json(cfg),
    );
    let (model, s0, report) = Model::build(cfg)?;
    let q0 = model.charge(&s0);
    let mut journal = Journal::create(&dir.join("diagnostics.csv"), model.journal_columns())?;
    let mut outputs = vec!["diagnostics.csv".to_string()];
    outputs.extend(write_snapshot(dir, "initial", &s0)?);
    let run = experiments::run_trajectory(&model, &s0, &cfg.integrator, |_, _, sample| journal.row(&sample.row(q0)));
    journal.finish()?;
    let (samples, end) = run?;
    outputs.extend(write_snapshot(dir, "final", &end)?);
    let max = |f: fn(&experiments::Sample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    let drift = q0.map(|q0| samples.iter().filter_map(|s| s.charge).map(|q| (q - q0).abs() / q0).fold(0.0, f64::max));
    let outputs: Vec<&str> = outputs.iter().map(String::as_str).collect();
    finish(
        dir,
        manifest,
        &outputs,
        json!({
            "final_time": end.t,
            "max_lorenz_residual": max(|s| s.lorenz),
            "max_constraint_residual": max(|s| s.constraint),
            "max_charge_drift": drift,
            "initial_data": to_json(&report),
        }),
    )
}

/// Picard iteration on the configured window.
pub fn picard(cfg: &ExperimentConfig) -> Result<(Manifest, ContractionStatus)> {
    let dir = &cfg.output;
    ensure_dir(dir)?;
    let manifest = Manifest::new("picard", Some(cfg.data.seed), to_json(cfg));
    let (model, s0, _) = Model::build(cfg)?;
    let out = picard_iterate(&model, &s0, &cfg.picard)?;
    let mut j = Journal::create(&dir.join("picard.csv"), &["iteration", "xsb", "sup_fl", "ratio"])?;
    let mut prev: Option<f64> = None;
    for d in &out.differences {
        j.row(&[d.iteration as f64, d.xsb, d.sup_fl, prev.map_or(f64::NAN, |p| d.xsb / p)])?;
        prev = Some(d.xsb);
    }
    j.finish()?;
    let ratios = out.ratios();
    let m = finish(
        dir,
        manifest,
        &["picard.csv"],
        json!({ "status": to_json(&out.status), "ratios": ratios, "max_ratio": ratios.iter().copied().fold(0.0, f64::max) }),
    )?;
    Ok((m, out.status))
}

/// Outcome of `verify nullforms` against the frozen baselines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaselineCheck {
    Frozen,
    Matched(f64),
    Missing,
}

pub fn verify_nullforms(
    settings: &ScanSettings,
    seed: u64,
    freeze: bool,
    baselines: &Path,
    dir: &Path,
) -> Result<(Manifest, BaselineCheck)> {
    ensure_dir(dir)?;
    let manifest =
        Manifest::new("verify nullforms", Some(seed), json!({ "settings": to_json(settings), "seed": seed }));
    let scans = experiments::sup_scans(settings, seed)?;
    let mut header = vec!["seed"];
    header.extend(scans.iter().map(|s| s.name.as_str()));
    let mut j = Journal::create(&dir.join("sup_scans.csv"), &header)?;
    let mut row = vec![seed as f64];
    row.extend(scans.iter().map(|s| s.max));
    j.row(&row)?;
    j.finish()?;
    let check = if freeze {
        for s in &scans {
            baseline::freeze_scan(baselines, s, settings.radius)?;
        }
        BaselineCheck::Frozen
    } else if scans.iter().all(|s| baseline::path_for(baselines, s, settings.radius).exists()) {
        let mut worst: f64 = 0.0;
        for s in &scans {
            worst = worst.max(baseline::compare_scan(baselines, s, settings.radius)?);
        }
        BaselineCheck::Matched(worst)
    } else {
        BaselineCheck::Missing
    };
    let baseline_json = match check {
        BaselineCheck::Frozen => json!("frozen"),
        BaselineCheck::Matched(v) => json!({ "mismatch": v }),
        BaselineCheck::Missing => json!("missing"),
    };
    let m = finish(dir, manifest, &["sup_scans.csv"], json!({ "scans": to_json(&scans), "baseline": baseline_json }))?;
    Ok((m, check))
}

pub fn verify_integrals(case: DeltaCase, alpha: (f64, f64), r: f64, dir: &Path) -> Result<Manifest> {
    ensure_dir(dir)?;
    let e = fk_exponents(alpha.0, alpha.1, r, case)?;
    let manifest =
        Manifest::new("verify integrals", None, json!({ "case": to_json(&case), "alpha": [alpha.0, alpha.1], "r": r }));
    let rows = experiments::closed_form_rows(case, &[alpha], r)?;
    let mut j = Journal::create(
        &dir.join("integrals.csv"),
        &["tau", "xi", "alpha1", "alpha2", "value", "reference", "rel_error"],
    )?;
    for x in &rows {
        j.row(&[x.tau, x.xi, x.alpha1, x.alpha2, x.value, x.reference, x.rel_error])?;
    }
    j.finish()?;
    let worst = rows.iter().map(|x| x.rel_error).fold(0.0, f64::max);
    finish(dir, manifest, &["integrals.csv"], json!({ "max_rel_error": worst, "exponents": to_json(&e) }))
}

pub fn verify_norms(r: f64, eps: f64, count: usize, seed: u64, dir: &Path) -> Result<Manifest> {
    ensure_dir(dir)?;
    let preset = FLParams::theorem_compliant(r, eps)?;
    let crit = critical_exponent(r)?;
    let manifest =
        Manifest::new("verify norms", Some(seed), json!({ "r": r, "eps": eps, "count": count, "seed": seed }));
    let (rows, metrics) = experiments::bilinear_study(count, seed)?;
    let mut j = Journal::create(&dir.join("bilinear.csv"), &["n", "nt", "max_ratio", "mean_ratio"])?;
    for x in &rows {
        j.row(&[x.n as f64, x.nt as f64, x.max_ratio, x.mean_ratio])?;
    }
    j.finish()?;
    finish(
        dir,
        manifest,
        &["bilinear.csv"],
        json!({ "preset": to_json(&preset), "critical": to_json(&crit), "bilinear": to_json(&metrics) }),
    )
}

pub fn verify_scaling(dir: &Path) -> Result<Manifest> {
    ensure_dir(dir)?;
    let manifest = Manifest::new("verify scaling", None, json!({}));
    let mut j = Journal::create(&dir.join("exponents.csv"), &["r", "s_c", "threshold", "gap"])?;
    for k in 0..=10 {
        let r = 1.0 + f64::from(k) / 10.0;
        let c = critical_exponent(r)?;
        j.row(&[r, c.s_c, c.threshold, c.gap])?;
    }
    j.finish()?;
    let metrics = experiments::scaling_study()?;
    let result = CriterionResult::judge(7, metrics.clone(), 0.0);
    let mut m = finish(dir, manifest, &["exponents.csv"], to_json(&metrics))?;
    m.results.push(result);
    m.write(dir)?;
    Ok(m)
}

pub fn verify_decompositions(states: usize, seed: u64, dir: &Path) -> Result<Manifest> {
    if states == 0 {
        return Err(CliError::validation("samples", "need at least one random state"));
    }
    ensure_dir(dir)?;
    let manifest =
        Manifest::new("verify decompositions", Some(seed), json!({ "states": states, "seed": seed, "n": 32 }));
    let metrics = experiments::identity_suite(states, 32, seed)?;
    finish(dir, manifest, &[], to_json(&metrics))
}

/// Run acceptance criteria in sequence and record the verdicts.
pub fn suite(ids: &[u8], baselines: &Path, dir: &Path, mut progress: impl FnMut(&CriterionResult)) -> Result<Manifest> {
    if let Some(bad) = ids.iter().find(|&&i| !(1..=10).contains(&i)) {
        return Err(CliError::validation("criteria", format!("no criterion {bad} (expected 1..=10)")));
    }
    ensure_dir(dir)?;
    let mut manifest = Manifest::new("suite", None, json!({ "criteria": ids, "baselines": baselines }));
    let mut j = Journal::create(&dir.join("suite.csv"), &["id", "passed", "seconds"])?;
    for &id in ids {
        let r = experiments::run_criterion(id, baselines)?;
        progress(&r);
        j.row(&[f64::from(id), if r.passed { 1.0 } else { 0.0 }, r.seconds])?;
        manifest.results.push(r);
    }
    j.finish()?;
    finish(dir, manifest.clone(), &["suite.csv"], json!({ "passed": manifest.results.iter().all(|r| r.passed) }))
}
