use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cslab::baseline::shipped_dir;
use cslab::commands::{self, BaselineCheck, CSV_COLUMNS};
use cslab::config::{ExperimentConfig, RawConfig};
use cslab::error::{CliError, Result, EXIT_ACCEPTANCE, EXIT_BLOWUP, EXIT_OK};
use cslab::experiments::ScanSettings;
use cslab::report::report;
use cslab_core::evolve::ContractionStatus;
use cslab_core::nullform::DeltaCase;

const EXIT_CODES: &str = "\
Exit codes: 0 ok, 1 I/O error, 2 invalid parameter or input file, 3 blowup, 4 acceptance failure.";

#[derive(Parser)]
#[command(name = "cslab", version, about = "Chern-Simons-Higgs/Dirac experiments in Lorenz gauge")]
#[command(after_help = format!("{CSV_COLUMNS}\n\n{EXIT_CODES}"))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and journal its constraint diagnostics.
    #[command(allow_negative_numbers = true)]
    Simulate {
        /// csh or csd
        system: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Numerical checks of the harmonic-analysis ingredients.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Picard iteration on a short window; exits 3 if the iterates diverge.
    #[command(allow_negative_numbers = true)]
    Picard {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Summarize a run directory against the acceptance thresholds.
    Report {
        dir: PathBuf,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Run acceptance criteria (all when none are given); exits 4 on failure.
    Suite {
        criteria: Vec<u8>,
        #[arg(long, default_value = "cslab-out/suite")]
        output: PathBuf,
        /// Directory of frozen sup-scan baselines.
        #[arg(long)]
        baselines: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Sup-scans of the symbol, angle, Leibniz and I ratios.
    Nullforms {
        /// Samples per scan (accepts 1e6).
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        samples: usize,
        /// Samples of the I scan.
        #[arg(long, default_value = "4000", value_parser = parse_count)]
        i_samples: usize,
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Store the results as the new baselines.
        #[arg(long)]
        freeze: bool,
        #[arg(long)]
        baselines: Option<PathBuf>,
        #[arg(long, default_value = "cslab-out/nullforms")]
        output: PathBuf,
    },
    /// Delta-restricted convolution integrals against closed forms.
    #[command(allow_negative_numbers = true)]
    Integrals {
        /// pp, pma or pmb
        #[arg(long, default_value = "pp")]
        case: DeltaCase,
        #[arg(long, num_args = 2, default_values_t = [0.5, 0.5])]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long, default_value = "cslab-out/integrals")]
        output: PathBuf,
    },
    /// Theorem-compliant exponents and the bilinear ratio on two grids.
    Norms {
        #[arg(long, default_value_t = 1.5)]
        r: f64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Ensemble size.
        #[arg(long, default_value = "64", value_parser = parse_count)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "cslab-out/norms")]
        output: PathBuf,
    },
    /// Scaling covariance of the flow and of the norms.
    Scaling {
        #[arg(long, default_value = "cslab-out/scaling")]
        output: PathBuf,
    },
    /// Projector algebra and null-form decompositions on random states.
    Decompositions {
        #[arg(long, default_value = "100", value_parser = parse_count)]
        samples: usize,
        #[arg(long, default_value_t = 1000)]
        seed: u64,
        #[arg(long, default_value = "cslab-out/decompositions")]
        output: PathBuf,
    },
}

/// Flags mirroring the configuration keys; they override `--config`.
#[derive(Args)]
struct ConfigArgs {
    /// key = value file with [section] headers.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    length: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    mass: Option<String>,
    /// standard, zero or c0,c1,c2,c3
    #[arg(long)]
    potential: Option<String>,
    /// gaussian, modulated-gaussian or annulus-spectrum
    #[arg(long)]
    recipe: Option<String>,
    #[arg(long)]
    amp: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    k0: Option<String>,
    #[arg(long)]
    k_min: Option<String>,
    #[arg(long)]
    k_max: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    /// Final time.
    #[arg(long = "T")]
    horizon: Option<String>,
    /// etd-midpoint or etd-euler
    #[arg(long)]
    scheme: Option<String>,
    /// Journal every this many steps.
    #[arg(long)]
    stride: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    theorem_compliant: Option<String>,
    #[arg(long)]
    picard_iterations: Option<String>,
    #[arg(long = "picard-T")]
    picard_horizon: Option<String>,
    #[arg(long)]
    picard_dt: Option<String>,
    #[arg(long)]
    output: Option<String>,
}

impl ConfigArgs {
    fn resolve(self, system: Option<String>) -> Result<ExperimentConfig> {
        let mut raw = match &self.config {
            Some(p) => RawConfig::load(p)?,
            None => RawConfig::default(),
        };
        let pairs = [
            ("run.system", system),
            ("grid.n", self.n),
            ("grid.length", self.length),
            ("system.kappa", self.kappa),
            ("system.mass", self.mass),
            ("system.potential", self.potential),
            ("data.recipe", self.recipe),
            ("data.amp", self.amp),
            ("data.seed", self.seed),
            ("data.sigma", self.sigma),
            ("data.k0", self.k0),
            ("data.k_min", self.k_min),
            ("data.k_max", self.k_max),
            ("integrator.dt", self.dt),
            ("integrator.T", self.horizon),
            ("integrator.scheme", self.scheme),
            ("integrator.stride", self.stride),
            ("norms.r", self.r),
            ("norms.s", self.s),
            ("norms.b", self.b),
            ("norms.eps", self.eps),
            ("norms.theorem_compliant", self.theorem_compliant),
            ("picard.iterations", self.picard_iterations),
            ("picard.T", self.picard_horizon),
            ("picard.dt", self.picard_dt),
            ("run.output", self.output),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                raw.set(key, v)?;
            }
        }
        ExperimentConfig::from_raw(&raw)
    }
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v >= 0.0 && v.fract() == 0.0 && v < 1e15 {
        Ok(v as usize)
    } else {
        Err(format!("'{s}' is not a nonnegative integer"))
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate { system, config } => {
            let cfg = config.resolve(Some(system))?;
            let m = commands::simulate(&cfg)?;
            println!("wrote {} ({})", cfg.output.display(), m.outputs.join(", "));
            println!("{}", serde_json::to_string_pretty(&m.summary).unwrap_or_default());
            Ok(EXIT_OK)
        }
        Command::Picard { config } => {
            let cfg = config.resolve(None)?;
            let (m, status) = commands::picard(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&m.summary).unwrap_or_default());
            Ok(if matches!(status, ContractionStatus::Diverged { .. }) { EXIT_BLOWUP } else { EXIT_OK })
        }
        Command::Report { dir, json } => {
            let r = report(&dir)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r).unwrap_or_default());
            } else {
                print!("{}", r.table());
            }
            Ok(if r.passed() { EXIT_OK } else { EXIT_ACCEPTANCE })
        }
        Command::Suite { criteria, output, baselines } => {
            let ids: Vec<u8> = if criteria.is_empty() { (1..=10).collect() } else { criteria };
            let m =
                commands::suite(&ids, &baselines.unwrap_or_else(shipped_dir), &output, |r| println!("{}", r.line()))?;
            Ok(if m.results.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_ACCEPTANCE })
        }
        Command::Verify { what } => verify(what),
    }
}

fn verify(what: Verify) -> Result<i32> {
    let show = |m: &cslab::io::Manifest| println!("{}", serde_json::to_string_pretty(&m.summary).unwrap_or_default());
    match what {
        Verify::Nullforms { samples, i_samples, radius, seed, freeze, baselines, output } => {
            let settings = ScanSettings { samples, i_samples, radius };
            let dir = baselines.unwrap_or_else(shipped_dir);
            let (m, check) = commands::verify_nullforms(&settings, seed, freeze, &dir, &output)?;
            for s in m.summary["scans"].as_array().into_iter().flatten() {
                println!("{:<20} {:.6e}", s["name"].as_str().unwrap_or("?"), s["max"].as_f64().unwrap_or(f64::NAN));
            }
            match check {
                BaselineCheck::Frozen => println!("baselines frozen in {}", dir.display()),
                BaselineCheck::Missing => println!("no baselines for these settings in {}", dir.display()),
                BaselineCheck::Matched(v) if v <= 1e-12 => println!("baselines match"),
                BaselineCheck::Matched(v) => {
                    return Err(CliError::Acceptance(format!("sup-scans deviate from baselines by {v:e}")))
                }
            }
        }
        Verify::Integrals { case, alpha, r, output } => {
            show(&commands::verify_integrals(case, (alpha[0], alpha[1]), r, &output)?)
        }
        Verify::Norms { r, eps, samples, seed, output } => {
            show(&commands::verify_norms(r, eps, samples, seed, &output)?)
        }
        Verify::Scaling { output } => {
            let m = commands::verify_scaling(&output)?;
            show(&m);
            if !m.results.iter().all(|r| r.passed) {
                return Ok(EXIT_ACCEPTANCE);
            }
        }
        Verify::Decompositions { samples, seed, output } => {
            show(&commands::verify_decompositions(samples, seed, &output)?)
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
