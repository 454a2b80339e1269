//! Flat `key = value` configuration with `[section]` headers.
//!
//! ```text
//! # comment
//! [grid]
//! n = 64
//! [data]
//! recipe = modulated-gaussian
//! amp = 0.05
//! ```
//!
//! Keys are addressed as `section.key`; command-line flags override file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cslab_core::csd::CsdParams;
use cslab_core::csh::{CshParams, HiggsPotential};
use cslab_core::data::Recipe;
use cslab_core::evolve::{IntegratorConfig, PicardConfig, Scheme};
use cslab_core::norms::FLParams;
use cslab_core::spectral::Grid2D;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Every recognised key with its default.
pub const KEYS: &[(&str, &str)] = &[
    ("run.system", "csh"),
    ("run.output", "cslab-out"),
    ("grid.n", "64"),
    ("grid.length", "50.26548245743669"),
    ("system.kappa", "1"),
    ("system.mass", "0"),
    ("system.potential", "standard"),
    ("data.recipe", "modulated-gaussian"),
    ("data.amp", "0.05"),
    ("data.seed", "1"),
    ("data.sigma", "2"),
    ("data.k0", "0.5"),
    ("data.k_min", "0.5"),
    ("data.k_max", "1.5"),
    ("integrator.dt", "1e-3"),
    ("integrator.T", "1"),
    ("integrator.scheme", "etd-midpoint"),
    ("integrator.stride", "10"),
    ("picard.iterations", "5"),
    ("picard.T", "0.5"),
    ("picard.dt", "5e-3"),
    ("picard.s", ""),
    ("picard.b", ""),
    ("picard.r", ""),
    ("norms.r", "1.5"),
    ("norms.s", ""),
    ("norms.b", ""),
    ("norms.gamma", "0"),
    ("norms.theorem_compliant", "true"),
    ("norms.eps", "0.01"),
];

/// Raw `section.key -> value` pairs with the line each came from.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        let mut section = String::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            let err = |reason: String| CliError::Parse { path: path.to_path_buf(), line: i + 1, reason };
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| err("unterminated section header".into()))?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got '{line}'")))?;
            let key = if section.is_empty() { k.trim().to_string() } else { format!("{section}.{}", k.trim()) };
            if !KEYS.iter().any(|(name, _)| *name == key) {
                return Err(err(format!("unknown key '{key}'")));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Set `key`, rejecting unknown names.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KEYS.iter().any(|(name, _)| *name == key) {
            return Err(CliError::validation(key, "unknown configuration key"));
        }
        self.values.insert(key.to_string(), value.into());
        Ok(())
    }

    fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .or_else(|| KEYS.iter().find(|(k, _)| *k == key).map(|(_, d)| *d))
            .unwrap_or("")
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let v = self.raw(key);
        v.parse().map_err(|e: T::Err| CliError::validation(key, format!("cannot parse '{v}': {e}")))
    }

    fn optional(&self, key: &str) -> Result<Option<f64>> {
        if self.raw(key).is_empty() {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    /// Pairs explicitly set, for manifests.
    pub fn explicit(&self) -> &BTreeMap<String, String> {
        &self.values
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Csh,
    Csd,
}

impl FromStr for SystemKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csh" => Ok(SystemKind::Csh),
            "csd" => Ok(SystemKind::Csd),
            _ => Err(format!("expected csh or csd, got '{s}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataConfig {
    pub recipe: Recipe,
    pub amp: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub system: SystemKind,
    pub n: usize,
    pub length: f64,
    pub fl: FLParams<f64>,
    pub theorem_compliant: bool,
    pub eps: f64,
    pub integrator: IntegratorConfig<f64>,
    pub picard: PicardConfig<f64>,
    pub potential: HiggsPotential<f64>,
    pub mass: f64,
    pub kappa: f64,
    pub data: DataConfig,
    pub output: PathBuf,
}

fn core_err(name: &str) -> impl Fn(cslab_core::Error) -> CliError + '_ {
    move |e| CliError::validation(name, e.to_string())
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let system = raw.get("run.system")?;
        let n: usize = raw.get("grid.n")?;
        let length: f64 = raw.get("grid.length")?;
        Grid2D::<f64>::new(n, length).map_err(core_err("grid.n"))?;

        let kappa: f64 = raw.get("system.kappa")?;
        let mass: f64 = raw.get("system.mass")?;
        CsdParams::new(mass, kappa).map_err(core_err("system"))?;
        let potential = match raw.raw("system.potential") {
            "standard" => HiggsPotential::standard(kappa),
            "zero" => HiggsPotential::zero(),
            list => {
                let c: Vec<f64> = list
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| CliError::validation("system.potential", e.to_string()))?;
                let coeffs: [f64; 4] = c.try_into().map_err(|_| {
                    CliError::validation("system.potential", "expected standard, zero or four coefficients c0,c1,c2,c3")
                })?;
                HiggsPotential { coeffs }
            }
        };
        CshParams::new(kappa, potential).map_err(core_err("system.kappa"))?;

        let recipe = match raw.raw("data.recipe") {
            "gaussian" => Recipe::Gaussian { sigma: raw.get("data.sigma")? },
            "modulated-gaussian" => {
                Recipe::ModulatedGaussian { sigma: raw.get("data.sigma")?, k0: raw.get("data.k0")? }
            }
            "annulus-spectrum" => {
                Recipe::AnnulusSpectrum { k_min: raw.get("data.k_min")?, k_max: raw.get("data.k_max")? }
            }
            other => return Err(CliError::validation("data.recipe", format!("unknown recipe '{other}'"))),
        };
        let amp: f64 = raw.get("data.amp")?;
        if !(amp >= 0.0 && amp.is_finite()) {
            return Err(CliError::validation("data.amp", format!("{amp} must be finite and nonnegative")));
        }
        let data = DataConfig { recipe, amp, seed: raw.get("data.seed")? };
        let probe = Grid2D::<f64>::new(8, length).map_err(core_err("grid.length"))?;
        recipe.profile(&probe, [0.5, 0.5], data.seed).map(|_| ()).or_else(|e| match recipe {
            // an annulus may be empty on the probe grid only
            Recipe::AnnulusSpectrum { .. } if e.to_string().contains("no lattice frequency") => Ok(()),
            _ => Err(CliError::validation("data", e.to_string())),
        })?;

        let mut integrator = IntegratorConfig::new(raw.get("integrator.dt")?, raw.get("integrator.T")?)
            .map_err(core_err("integrator"))?;
        integrator.scheme = raw.get::<Scheme>("integrator.scheme")?;
        integrator.snapshot_stride = raw.get("integrator.stride")?;
        integrator.validate().map_err(core_err("integrator.stride"))?;

        let r: f64 = raw.get("norms.r")?;
        let eps: f64 = raw.get("norms.eps")?;
        let theorem_compliant: bool = raw.get("norms.theorem_compliant")?;
        let gamma: f64 = raw.get("norms.gamma")?;
        let (s, b) = (raw.optional("norms.s")?, raw.optional("norms.b")?);
        let fl = if theorem_compliant {
            let preset = FLParams::theorem_compliant(r, eps).map_err(core_err("norms.eps"))?;
            let p =
                FLParams::new(r, s.unwrap_or(preset.s), b.unwrap_or(preset.b), gamma).map_err(core_err("norms.r"))?;
            if !p.is_theorem_compliant() {
                let name = if p.s <= preset.s - eps { "norms.s" } else { "norms.b" };
                return Err(CliError::validation(
                    name,
                    format!("theorem-compliant run needs s > {} and b > {}", preset.s - eps, preset.b - eps),
                ));
            }
            p
        } else {
            FLParams::new(r, s.unwrap_or(0.0), b.unwrap_or(0.5), gamma).map_err(core_err("norms.r"))?
        };

        let picard = PicardConfig::new(
            raw.get("picard.iterations")?,
            raw.get("picard.T")?,
            raw.get("picard.dt")?,
            raw.optional("picard.s")?.unwrap_or(fl.s),
            raw.optional("picard.b")?.unwrap_or(fl.b),
            raw.optional("picard.r")?.unwrap_or(fl.r),
        )
        .map_err(core_err("picard"))?;
        if !(picard.r > 1.0 && picard.r <= 2.0) {
            return Err(CliError::validation("picard.r", format!("{} must lie in (1, 2]", picard.r)));
        }

        Ok(Self {
            system,
            n,
            length,
            fl,
            theorem_compliant,
            eps,
            integrator,
            picard,
            potential,
            mass,
            kappa,
            data,
            output: PathBuf::from(raw.raw("run.output")),
        })
    }

    pub fn grid(&self) -> Grid2D<f64> {
        Grid2D::new(self.n, self.length).expect("validated grid")
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::from_raw(&RawConfig::default()).expect("defaults validate")
    }
}
