//! JSON run configurations, one schema per subcommand. Every config is
//! resolved (defaults filled in) before execution and the resolved form is
//! embedded verbatim in every output file.

use serde::{Deserialize, Serialize};
use uamo_core::{Boundary, FluxSpec, ModelParams};

use crate::AppError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FluxConfig {
    Golden,
    Irrational { value: f64 },
    Approximant { p: u32, q: u32 },
}

impl Default for FluxConfig {
    fn default() -> Self {
        FluxConfig::Golden
    }
}

impl FluxConfig {
    pub fn to_spec(self) -> Result<FluxSpec, AppError> {
        match self {
            FluxConfig::Golden => Ok(FluxSpec::golden()),
            FluxConfig::Irrational { value } => Ok(FluxSpec::Irrational(value)),
            FluxConfig::Approximant { p, q } => {
                FluxSpec::approximant(p, q).map_err(AppError::config)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryConfig {
    Open,
    Periodic,
}

impl BoundaryConfig {
    pub fn to_boundary(self) -> Boundary {
        match self {
            BoundaryConfig::Open => Boundary::Open,
            BoundaryConfig::Periodic => Boundary::Periodic,
        }
    }
}

fn default_theta() -> f64 {
    0.0
}

fn default_steps() -> usize {
    6
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub flux: FluxConfig,
    #[serde(default = "EvolveConfig::default_boundary")]
    pub boundary: BoundaryConfig,
    /// Defaults to 2 * steps + 5 on open chains.
    #[serde(default)]
    pub lattice_size: Option<usize>,
    pub steps: usize,
    /// Expected photon counts per time step; enables Poisson resampling.
    #[serde(default)]
    pub poisson_counts: Option<f64>,
}

impl EvolveConfig {
    fn default_boundary() -> BoundaryConfig {
        BoundaryConfig::Open
    }

    pub fn params(&self) -> Result<ModelParams, AppError> {
        ModelParams::new(
            self.lambda1,
            self.lambda2,
            self.theta,
            self.eta,
            self.flux.to_spec()?,
        )
        .map_err(AppError::config)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// A single eta or a sweep.
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub etas: Option<Vec<f64>>,
    pub flux: FluxConfig,
    /// Ring size; defaults to the approximant denominator.
    #[serde(default)]
    pub lattice_size: Option<usize>,
}

impl SpectrumConfig {
    pub fn eta_list(&self) -> Result<Vec<f64>, AppError> {
        match (&self.eta, &self.etas) {
            (Some(e), None) => Ok(vec![*e]),
            (None, Some(v)) if !v.is_empty() => Ok(v.clone()),
            (None, None) => Ok(vec![0.0]),
            _ => Err(AppError::config_msg(
                "specify exactly one of `eta` or a non-empty `etas`",
            )),
        }
    }

    pub fn ring(&self) -> Result<(FluxSpec, uamo_core::Lattice), AppError> {
        let flux = self.flux.to_spec()?;
        let size = match (self.lattice_size, flux) {
            (Some(n), _) => n,
            (None, FluxSpec::Approximant { q, .. }) => q as usize,
            (None, FluxSpec::Irrational(_)) => {
                return Err(AppError::config_msg(
                    "spectra need an approximant flux (or an explicit lattice size)",
                ))
            }
        };
        let lat = uamo_core::Lattice::periodic(size, flux).map_err(AppError::config)?;
        Ok((flux, lat))
    }
}

fn default_base_points() -> usize {
    12
}

fn default_samples() -> usize {
    uamo_core::spectral::WINDING_SAMPLES
}

fn default_scan_eta_max() -> f64 {
    0.45
}

fn default_scan_resolution() -> f64 {
    1e-3
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindingConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    pub etas: Vec<f64>,
    pub flux: FluxConfig,
    #[serde(default)]
    pub lattice_size: Option<usize>,
    #[serde(default = "default_base_points")]
    pub base_points: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Also locate both transitions by spectral bisection.
    #[serde(default = "default_true")]
    pub scan_transitions: bool,
    #[serde(default = "default_scan_eta_max")]
    pub scan_eta_max: f64,
    #[serde(default = "default_scan_resolution")]
    pub scan_resolution: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseObservable {
    Sigma,
    SecondMoment,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagramConfig {
    /// Grid points per axis.
    pub grid: usize,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub flux: FluxConfig,
    pub observable: PhaseObservable,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalConfig {
    pub lambda1: f64,
    pub lambda2: f64,
}

pub fn load_config<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        AppError::config_msg(format!("cannot read config {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| AppError::config_msg(format!("invalid config {}: {e}", path.display())))
}
