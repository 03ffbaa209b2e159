//! TOML experiment configurations. Every struct rejects unknown keys so a
//! typo fails loudly before any computation starts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use biwave_core::exponents::{parse_rational, ExponentTriple};
use biwave_core::nls::Sign;
use biwave_core::norms::Exponent;
use biwave_core::profiles::Profile;
use biwave_core::{make_grid, BipartiteField, GridSpec};

use crate::CliError;

/// Named initial-data profile with an optional overall amplitude.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "profile", rename_all = "snake_case")]
pub enum InitialConfig {
    Gaussian {
        width: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    ProductGaussian {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    PlaneModulated {
        xi0: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    RandomBandlimited {
        cutoff: usize,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
}

fn default_amplitude() -> f64 {
    1.0
}

impl InitialConfig {
    pub fn realize(&self, grid: GridSpec, seed: u64) -> Result<BipartiteField, CliError> {
        let (profile, amplitude) = match self {
            InitialConfig::Gaussian { width, amplitude } => {
                (Profile::Gaussian { width: *width }, *amplitude)
            }
            InitialConfig::ProductGaussian { amplitude } => (Profile::ProductGaussian, *amplitude),
            InitialConfig::PlaneModulated { xi0, amplitude } => {
                (Profile::PlaneModulated { xi0: *xi0 }, *amplitude)
            }
            InitialConfig::RandomBandlimited { cutoff, amplitude } => {
                (Profile::RandomBandlimited { cutoff: *cutoff }, *amplitude)
            }
        };
        if !amplitude.is_finite() {
            return Err(CliError::config("initial amplitude must be finite"));
        }
        let field = profile.realize(grid, seed).map_err(CliError::from_core)?;
        Ok(field.scaled(num_complex::Complex64::new(amplitude, 0.0)))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateConfig {
    pub n: usize,
    pub points_per_axis: usize,
    pub half_length: f64,
    pub times: Vec<f64>,
    #[serde(default)]
    pub kernel_oracle: bool,
    pub initial: InitialConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub n: usize,
    pub points_per_axis: usize,
    pub half_length: f64,
    pub window: [f64; 2],
    pub samples: usize,
    /// outer exponent over x: "inf" or a number >= 1
    pub r1: String,
    /// inner exponent over y: "inf" or a number >= 1
    pub r2: String,
    pub initial: InitialConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub n: u32,
    #[serde(default = "default_denominator_bound")]
    pub denominator_bound: i64,
}

fn default_denominator_bound() -> i64 {
    60
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhitneyConfig {
    pub n: usize,
    pub points_per_axis: usize,
    pub half_length: f64,
    pub window: [f64; 2],
    pub j_min: i32,
    pub j_max: i32,
    pub nodes_per_interval: usize,
    pub initial: InitialConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrichartzConfig {
    pub n: usize,
    pub points_per_axis: usize,
    pub half_length: f64,
    pub horizon: f64,
    pub steps: usize,
    /// reciprocals [1/q, 1/r1, 1/r2] as exact rationals, "0" meaning infinity
    pub triple: [String; 3],
    pub lambdas: Vec<f64>,
    pub initial: InitialConfig,
    /// extra horizons for the growth-in-T table; computed without the
    /// admissibility gate so the excluded endpoints can be probed
    #[serde(default)]
    pub growth_horizons: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub n: usize,
    pub points_per_axis: usize,
    pub half_length: f64,
    pub alpha: f64,
    /// +1 defocusing, -1 focusing, 0 disables the nonlinearity
    pub sign: i8,
    pub horizon: f64,
    pub steps: usize,
    /// reciprocals [1/q, 1/r1, 1/r2] as exact rationals, "0" meaning infinity
    pub triple: [String; 3],
    pub initial: InitialConfig,
    #[serde(default = "default_save_every")]
    pub save_every: usize,
}

fn default_save_every() -> usize {
    32
}

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))
}

pub fn grid_of(n: usize, points_per_axis: usize, half_length: f64) -> Result<GridSpec, CliError> {
    make_grid(n, points_per_axis, half_length).map_err(CliError::from_core)
}

pub fn parse_exponent(s: &str) -> Result<Exponent, CliError> {
    if s.trim() == "inf" {
        return Ok(Exponent::INF);
    }
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("bad exponent '{s}' (use 'inf' or a number)")))?;
    Exponent::new(v).map_err(CliError::from_core)
}

pub fn parse_triple(parts: &[String; 3]) -> Result<ExponentTriple, CliError> {
    let inv_q = parse_rational(&parts[0]).map_err(CliError::from_core)?;
    let inv_r1 = parse_rational(&parts[1]).map_err(CliError::from_core)?;
    let inv_r2 = parse_rational(&parts[2]).map_err(CliError::from_core)?;
    ExponentTriple::from_inverses(inv_q, inv_r1, inv_r2).map_err(CliError::from_core)
}

pub fn parse_sign(raw: i8) -> Result<Sign, CliError> {
    match raw {
        1 => Ok(Sign::Defocusing),
        -1 => Ok(Sign::Focusing),
        0 => Ok(Sign::Off),
        other => Err(CliError::config(format!("sign must be +1, -1 or 0, got {other}"))),
    }
}
