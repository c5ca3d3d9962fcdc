//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use robin_box::spectrum::{Family, Gamma, RobinBC};
use robin_box::BoxConfig;
use serde::Deserialize;

use crate::Usage;

#[derive(Debug, Parser)]
#[command(name = "robin-box", version, about = "Particle in a box with Robin walls and the two-component momentum")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Particle mass
    #[arg(long, global = true)]
    pub m: Option<f64>,
    /// Box length; the box is [-L/2, L/2]
    #[arg(long = "L", global = true)]
    pub l: Option<f64>,
    /// dirichlet | neumann | mixed | symmetric | antisymmetric | general
    #[arg(long, global = true)]
    pub bc: Option<String>,
    /// Wall parameter for the symmetric and antisymmetric families
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Right wall parameter for `general` (a number or `inf`)
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_gamma)]
    pub gamma_plus: Option<Gamma>,
    /// Left wall parameter for `general` (a number or `inf`)
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_gamma)]
    pub gamma_minus: Option<Gamma>,
    /// Momentum extension phase, k_n = (pi n + theta) / L
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// JSON file with any of the settings; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels, eigenfunction samples and an optional parameter sweep
    Spectrum(SpectrumArgs),
    /// Momentum measurement probabilities of a state
    Measure(MeasureArgs),
    /// Time series and snapshots of an evolving state
    Evolve(EvolveArgs),
    /// Ehrenfest residuals on a time grid
    Ehrenfest(EhrenfestArgs),
    /// Kinetic-energy inequality report and a random-state sweep
    Uncertainty(UncertaintyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpectrumArgs {
    /// Highest level index
    #[arg(long)]
    pub levels: Option<usize>,
    /// Points per eigenfunction file; 0 skips the files
    #[arg(long)]
    pub samples: Option<usize>,
    /// Sweep the symmetric or antisymmetric family over this many values of arctan(gamma L)
    #[arg(long)]
    pub sweep_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub state: Option<String>,
    /// Histogram covers -n_max..=n_max
    #[arg(long)]
    pub n_max: Option<i64>,
    /// Points in the continuous density file
    #[arg(long)]
    pub density_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TimeArgs {
    /// Explicit times in units of the revival time T, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub times: Option<Vec<f64>>,
    /// Grid end in units of T
    #[arg(long)]
    pub span: Option<f64>,
    /// Grid intervals; the grid has steps + 1 points including both ends
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub state: Option<String>,
    #[command(flatten)]
    pub time: TimeArgs,
    /// Points per position snapshot
    #[arg(long)]
    pub snapshot_points: Option<usize>,
    /// Points per momentum snapshot; 0 skips them
    #[arg(long)]
    pub momentum_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EhrenfestArgs {
    #[arg(long)]
    pub state: Option<String>,
    #[command(flatten)]
    pub time: TimeArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct UncertaintyArgs {
    #[arg(long)]
    pub state: Option<String>,
    /// Number of random states in the sweep; 0 skips it
    #[arg(long)]
    pub count: Option<usize>,
    /// Modes per random state in the sweep
    #[arg(long)]
    pub modes: Option<usize>,
}

/// Everything a JSON config file may set. Keys match the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub m: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub bc: Option<String>,
    pub gamma: Option<f64>,
    pub gamma_plus: Option<GammaSpec>,
    pub gamma_minus: Option<GammaSpec>,
    pub theta: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub state: Option<String>,
    pub levels: Option<usize>,
    pub samples: Option<usize>,
    pub sweep_points: Option<usize>,
    pub n_max: Option<i64>,
    pub density_points: Option<usize>,
    pub times: Option<Vec<f64>>,
    pub span: Option<f64>,
    pub steps: Option<usize>,
    pub snapshot_points: Option<usize>,
    pub momentum_points: Option<usize>,
    pub count: Option<usize>,
    pub modes: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Number(f64),
    Text(String),
}

impl GammaSpec {
    fn resolve(&self) -> Result<Gamma> {
        match self {
            GammaSpec::Number(v) => Ok(Gamma::Finite(*v)),
            GammaSpec::Text(s) => parse_gamma(s).map_err(|e| Usage::new(e).into()),
        }
    }
}

pub fn parse_gamma(s: &str) -> std::result::Result<Gamma, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "dirichlet" => Ok(Gamma::Dirichlet),
        t => t
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Gamma::Finite)
            .ok_or_else(|| format!("invalid wall parameter '{s}'")),
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| Usage::new(format!("{}: {e}", path.display())).into())
    }
}

/// Settings shared by every subcommand, after merging.
#[derive(Debug, Clone)]
pub struct Common {
    pub cfg: BoxConfig,
    /// `None` when neither flags nor file name a family.
    pub family: Option<Family>,
    pub theta: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Common {
    pub fn family_or_default(&self) -> Family {
        self.family.unwrap_or(Family::Dirichlet)
    }
}

pub fn merge_common(g: &GlobalArgs, f: &FileConfig) -> Result<Common> {
    let m = g.m.or(f.m).unwrap_or(1.0);
    let l = g.l.or(f.l).unwrap_or(1.0);
    let cfg = BoxConfig::new(m, l).map_err(|e| Usage::new(e.to_string()))?;
    let gamma = g.gamma.or(f.gamma);
    let gamma_plus = match (g.gamma_plus, &f.gamma_plus) {
        (Some(v), _) => Some(v),
        (None, Some(s)) => Some(s.resolve()?),
        _ => None,
    };
    let gamma_minus = match (g.gamma_minus, &f.gamma_minus) {
        (Some(v), _) => Some(v),
        (None, Some(s)) => Some(s.resolve()?),
        _ => None,
    };
    let family = match g.bc.as_ref().or(f.bc.as_ref()) {
        Some(name) => Some(parse_family(name, gamma, gamma_plus, gamma_minus)?),
        None => None,
    };
    let theta = g.theta.or(f.theta).unwrap_or(0.0);
    if !theta.is_finite() {
        return Err(Usage::new("theta must be finite").into());
    }
    Ok(Common {
        cfg,
        family,
        theta,
        out_dir: g.out_dir.clone().or_else(|| f.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out")),
        seed: g.seed.or(f.seed).unwrap_or(0),
    })
}

fn parse_family(name: &str, gamma: Option<f64>, plus: Option<Gamma>, minus: Option<Gamma>) -> Result<Family> {
    let need_gamma = || -> Result<f64> {
        match gamma {
            Some(g) if g.is_finite() => Ok(g),
            Some(g) => Err(Usage::new(format!("gamma must be finite, got {g}")).into()),
            None => Err(Usage::new(format!("--bc {name} needs --gamma")).into()),
        }
    };
    Ok(match name.to_ascii_lowercase().as_str() {
        "dirichlet" => Family::Dirichlet,
        "neumann" => Family::Neumann,
        "mixed" => Family::Mixed,
        "symmetric" => Family::Symmetric(need_gamma()?),
        "antisymmetric" => Family::Antisymmetric(need_gamma()?),
        "general" => {
            let (Some(p), Some(m)) = (plus, minus) else {
                return Err(Usage::new("--bc general needs --gamma-plus and --gamma-minus").into());
            };
            Family::General(RobinBC::new(p, m).map_err(|e| Usage::new(e.to_string()))?)
        }
        other => return Err(Usage::new(format!("unknown boundary family '{other}'")).into()),
    })
}

/// Times in absolute units, either listed or on an inclusive uniform grid.
pub fn time_grid(t: &TimeArgs, f: &FileConfig, revival: f64, default_steps: usize) -> Result<Vec<f64>> {
    if let Some(list) = t.times.as_ref().or(f.times.as_ref()) {
        if list.is_empty() || list.iter().any(|v| !v.is_finite()) {
            return Err(Usage::new("--times needs finite values").into());
        }
        return Ok(list.iter().map(|v| v * revival).collect());
    }
    let span = t.span.or(f.span).unwrap_or(1.0);
    let steps = t.steps.or(f.steps).unwrap_or(default_steps);
    if !span.is_finite() || steps == 0 {
        return Err(Usage::new("--span must be finite and --steps positive").into());
    }
    Ok((0..=steps).map(|j| span * revival * j as f64 / steps as f64).collect())
}
