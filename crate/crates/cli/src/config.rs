use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "qibound", version, about = "Quantum-inequality bounds from discretized integral operators")]
pub struct Cli {
    /// Directory receiving result.json and plot data.
    #[arg(long, global = true, default_value = "qibound-out")]
    pub out: PathBuf,
    /// JSON file holding a full command configuration (replaces the subcommand).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Always recompute, ignoring and not updating the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

/// Everything that determines a result. Serialized form doubles as the
/// config-file format and the cache key input.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Analytic, operator-norm and sharp flux bounds for one family.
    FluxBound(FluxBoundArgs),
    /// Spectral summary of one discretized flux kernel.
    FluxSpectrum(SpectrumArgs),
    /// Backflow eigenvalue sweep over X with the a + b/√X fit.
    BackflowConstant(BackflowArgs),
    /// Free evolution of the backflow wavepacket.
    Evolve(EvolveArgs),
    /// Wigner function and phase-space densities of a test state.
    Wigner(WignerArgs),
    /// Harmonic-oscillator energy-density bound B(x).
    OscBound(OscArgs),
    /// Recompute the reference manifest and compare.
    Verify(VerifyArgs),
    /// Spectral convergence sweep over truncations K.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FluxBound(_) => "flux-bound",
            Command::FluxSpectrum(_) => "flux-spectrum",
            Command::BackflowConstant(_) => "backflow-constant",
            Command::Evolve(_) => "evolve",
            Command::Wigner(_) => "wigner",
            Command::OscBound(_) => "osc-bound",
            Command::Verify(_) => "verify",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluxBoundArgs {
    #[arg(long, default_value = "gaussian")]
    pub family: String,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Truncation for T (default: reference setting of the family).
    #[arg(long)]
    pub t_k: Option<f64>,
    #[arg(long)]
    pub t_nodes: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub t_panels: usize,
    /// Truncation for J (default: reference setting of the family).
    #[arg(long)]
    pub j_k: Option<f64>,
    #[arg(long)]
    pub j_density: Option<f64>,
}

impl Default for FluxBoundArgs {
    fn default() -> Self {
        Self {
            family: "gaussian".into(),
            lambda: 1.0,
            hbar: 1.0,
            mass: 1.0,
            t_k: None,
            t_nodes: None,
            t_panels: 1,
            j_k: None,
            j_density: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumArgs {
    #[arg(long, default_value = "gaussian")]
    pub family: String,
    /// `t` (norm operator) or `j` (flux operator).
    #[arg(long, default_value = "t")]
    pub kernel: String,
    #[arg(long, default_value_t = 10.0)]
    pub k: f64,
    /// Nodes per unit K; ignored when --nodes is given.
    #[arg(long, default_value_t = 5.0)]
    pub density: f64,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub panels: usize,
    #[arg(long, default_value_t = 4)]
    pub count: usize,
}

impl Default for SpectrumArgs {
    fn default() -> Self {
        Self { family: "gaussian".into(), kernel: "t".into(), k: 10.0, density: 5.0, nodes: None, panels: 1, count: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackflowArgs {
    #[arg(long = "Xs", alias = "xs", value_delimiter = ',', default_value = "2000,3000,4000,6000,8000")]
    pub xs: Vec<f64>,
    /// Nodes per unit X.
    #[arg(long, default_value_t = 0.5)]
    pub nodes_per_x: f64,
}

impl Default for BackflowArgs {
    fn default() -> Self {
        Self { xs: vec![2000.0, 3000.0, 4000.0, 6000.0, 8000.0], nodes_per_x: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveArgs {
    #[arg(long, default_value_t = 5.0)]
    pub k0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 0.5)]
    pub mass: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-0.1,0,0.1")]
    pub times: Vec<f64>,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 601)]
    pub points: usize,
}

impl Default for EvolveArgs {
    fn default() -> Self {
        Self { k0: 5.0, hbar: 1.0, mass: 0.5, times: vec![-0.1, 0.0, 0.1], x_min: -3.0, x_max: 3.0, points: 601 }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WignerArgs {
    /// ground, excited or superposition oscillator state.
    #[arg(long, default_value = "ground")]
    pub state: String,
    #[arg(long, default_value_t = 128)]
    pub points: usize,
    #[arg(long, default_value_t = 10.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
}

impl Default for WignerArgs {
    fn default() -> Self {
        Self { state: "ground".into(), points: 128, half_width: 10.0, hbar: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscArgs {
    #[arg(long, default_value = "gaussian")]
    pub family: String,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 30)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

impl Default for OscArgs {
    fn default() -> Self {
        Self {
            family: "gaussian".into(),
            lambda: 1.0,
            n_max: 30,
            hbar: 1.0,
            omega: 1.0,
            mass: 1.0,
            x_min: -5.0,
            x_max: 5.0,
            points: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    /// Keep only entries whose id starts with one of these prefixes.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Manifest JSON to use instead of the built-in one.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long, default_value = "gaussian")]
    pub family: String,
    /// `j` sweeps the minimum eigenvalue, `t` the top singular value.
    #[arg(long, default_value = "j")]
    pub kernel: String,
    #[arg(long, value_delimiter = ',', default_value = "10,20,30")]
    pub ks: Vec<f64>,
    #[arg(long, default_value_t = 5.0)]
    pub density: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub precision: f64,
}

impl Default for SweepArgs {
    fn default() -> Self {
        Self { family: "gaussian".into(), kernel: "j".into(), ks: vec![10.0, 20.0, 30.0], density: 5.0, precision: 1e-9 }
    }
}
