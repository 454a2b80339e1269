//! The ten acceptance criteria: metric names, thresholds and verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
}

impl Bound {
    pub fn holds(self, v: f64) -> bool {
        match self {
            Bound::AtMost(x) => v <= x,
            Bound::AtLeast(x) => v >= x,
            Bound::Within(a, b) => v >= a && v <= b,
        }
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::AtMost(x) => write!(f, "<= {x:e}"),
            Bound::AtLeast(x) => write!(f, ">= {x}"),
            Bound::Within(a, b) => write!(f, "in [{a}, {b}]"),
        }
    }
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub checks: &'static [(&'static str, Bound)],
    pub seconds: f64,
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        name: "algebraic identities",
        checks: &[
            ("projector_error", Bound::AtMost(1e-11)),
            ("levi_civita_error", Bound::AtMost(1e-11)),
            ("n_decomposition_error", Bound::AtMost(1e-11)),
            ("m_decomposition_error", Bound::AtMost(1e-11)),
        ],
        seconds: 10.0,
    },
    Criterion {
        id: 2,
        name: "spectral core",
        checks: &[
            ("round_trip_error", Bound::AtMost(1e-12)),
            ("parseval_error", Bound::AtMost(1e-12)),
            ("multiplier_error", Bound::AtMost(1e-12)),
            ("half_wave_error", Bound::AtMost(1e-12)),
            ("hodge_error", Bound::AtMost(1e-12)),
            ("dealias_error", Bound::AtMost(1e-12)),
        ],
        seconds: 10.0,
    },
    Criterion {
        id: 3,
        name: "gauge residual",
        checks: &[
            ("csh_residual", Bound::AtMost(1e-3)),
            ("csd_residual", Bound::AtMost(1e-3)),
            ("csh_refinement_factor", Bound::AtLeast(4.0)),
            ("csd_refinement_factor", Bound::AtLeast(4.0)),
        ],
        seconds: 180.0,
    },
    Criterion {
        id: 4,
        name: "charge conservation",
        checks: &[("relative_drift", Bound::AtMost(1e-6)), ("halving_factor", Bound::Within(3.5, 4.5))],
        seconds: 120.0,
    },
    Criterion {
        id: 5,
        name: "integrator order",
        checks: &[("csh_slope", Bound::Within(1.8, 2.2)), ("csd_slope", Bound::Within(1.8, 2.2))],
        seconds: 300.0,
    },
    Criterion {
        id: 6,
        name: "picard contraction",
        checks: &[("max_ratio", Bound::AtMost(0.5)), ("doubling_factor", Bound::Within(3.0, 5.0))],
        seconds: 120.0,
    },
    Criterion {
        id: 7,
        name: "scaling covariance",
        checks: &[
            ("pullback_error", Bound::AtMost(1e-3)),
            ("single_mode_error", Bound::AtMost(1e-10)),
            ("gaussian_error", Bound::AtMost(1e-3)),
            ("exponent_at_r2", Bound::AtMost(0.0)),
            ("gap_at_r1", Bound::AtMost(0.0)),
            ("gap_decreasing", Bound::AtLeast(1.0)),
        ],
        seconds: 120.0,
    },
    Criterion {
        id: 8,
        name: "delta-integral quadrature",
        checks: &[
            ("closed_form_error", Bound::AtMost(1e-8)),
            ("monte_carlo_error", Bound::AtMost(0.01)),
            ("slope_deviation", Bound::AtMost(0.1)),
        ],
        seconds: 180.0,
    },
    Criterion {
        id: 9,
        name: "sup-scans",
        checks: &[
            ("all_finite", Bound::AtLeast(1.0)),
            ("seed_spread", Bound::AtMost(0.02)),
            ("baseline_mismatch", Bound::AtMost(1e-12)),
            ("calibration_error", Bound::AtMost(0.0)),
        ],
        seconds: 180.0,
    },
    Criterion { id: 10, name: "bilinear refinement", checks: &[("growth", Bound::AtMost(1.1))], seconds: 180.0 },
];

pub fn criterion(id: u8) -> &'static Criterion {
    &CRITERIA[usize::from(id) - 1]
}

/// Measured metrics of one criterion and the verdict against its thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub metrics: BTreeMap<String, f64>,
    pub seconds: f64,
    pub passed: bool,
    /// Names of failed checks.
    pub failures: Vec<String>,
}

impl CriterionResult {
    pub fn judge(id: u8, metrics: BTreeMap<String, f64>, seconds: f64) -> Self {
        let c = criterion(id);
        let mut failures: Vec<String> = c
            .checks
            .iter()
            .filter(|(name, bound)| !metrics.get(*name).is_some_and(|&v| bound.holds(v)))
            .map(|(name, bound)| {
                format!(
                    "{name} = {} (needs {bound})",
                    metrics.get(*name).map_or("missing".into(), |v| format!("{v:e}"))
                )
            })
            .collect();
        if seconds >= c.seconds {
            failures.push(format!("runtime {seconds:.1} s (needs < {} s)", c.seconds));
        }
        Self { id, name: c.name.into(), metrics, seconds, passed: failures.is_empty(), failures }
    }

    /// Recompute the verdict from the stored metrics.
    pub fn rejudge(&self) -> Self {
        Self::judge(self.id, self.metrics.clone(), self.seconds)
    }

    /// One summary line.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let metrics: Vec<String> = criterion(self.id)
            .checks
            .iter()
            .filter_map(|(k, _)| self.metrics.get(*k).map(|v| format!("{k}={v:.4e}")))
            .collect();
        let mut s = format!(
            "criterion {:>2} {status} {:<26} {:>7.2}s  {}",
            self.id,
            self.name,
            self.seconds,
            metrics.join(" ")
        );
        if !self.failures.is_empty() {
            s.push_str(&format!("  [{}]", self.failures.join("; ")));
        }
        s
    }
}
