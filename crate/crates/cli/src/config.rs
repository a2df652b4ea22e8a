//! JSON experiment configuration: schema structs, validation and conversion
//! into core types.

use num_complex::Complex64;
use serde::Deserialize;

use cfs_core::cutoff::{build_mollifier, standard_bump, CutoffProfile, FourMomentumCutoff};
use cfs_core::dirac::{EnergySign, Mass, SpacetimePoint, Spin, ThreeMomentum};
use cfs_core::packet::WavePacket;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    pub kind: String,
    pub epsilon: f64,
    #[serde(default)]
    pub params: CutoffParams,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffParams {
    /// gaussian width (defaults to 1)
    pub width: Option<f64>,
    /// mollifier grid resolution per axis (defaults to 16)
    pub grid_n: Option<usize>,
    /// custom radial table
    pub rs: Option<Vec<f64>>,
    pub vals: Option<Vec<f64>>,
    /// four-momentum ball radius for the on-shell sharp profile
    pub ball_radius: Option<f64>,
}

impl CutoffSpec {
    pub fn build(&self, m: Mass) -> Result<CutoffProfile, ConfigError> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(invalid(format!(
                "cutoff epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        let g = match self.kind.as_str() {
            "sharp" => CutoffProfile::sharp(self.epsilon),
            "gaussian" => {
                CutoffProfile::gaussian(self.epsilon, self.params.width.unwrap_or(1.0))
            }
            "mollifier" => {
                let grid = self.params.grid_n.unwrap_or(16);
                let moll = build_mollifier(standard_bump, self.epsilon, grid)
                    .map_err(|e| invalid(e.to_string()))?;
                moll.to_cutoff(m)
            }
            "custom" => {
                let rs = self
                    .params
                    .rs
                    .clone()
                    .ok_or_else(|| invalid("custom cutoff needs params.rs"))?;
                let vals = self
                    .params
                    .vals
                    .clone()
                    .ok_or_else(|| invalid("custom cutoff needs params.vals"))?;
                CutoffProfile::custom(self.epsilon, rs, vals)
            }
            "ball4" => cfs_core::cutoff::cutoff_on_shell(
                FourMomentumCutoff::Ball {
                    radius: self.params.ball_radius.unwrap_or(1.0),
                },
                self.epsilon,
                m,
            ),
            other => return Err(invalid(format!("unknown cutoff kind: {other}"))),
        };
        g.map_err(|e| invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    /// "negative" | "positive"
    pub sign: String,
    /// "up" | "down"
    pub spin: String,
    /// "special_a" | "special_b" | "isotropic_gaussian" | "narrow_gaussian"
    pub profile: String,
    pub sigma: f64,
    #[serde(default)]
    pub center: [f64; 4],
    #[serde(default)]
    pub momentum_center: [f64; 3],
    /// complex amplitude [re, im]; special profiles use `coeff` instead
    #[serde(default)]
    pub amplitude: Option<[f64; 2]>,
    #[serde(default)]
    pub coeff: Option<f64>,
}

impl PacketSpec {
    pub fn build(&self) -> Result<WavePacket, ConfigError> {
        let sign = match self.sign.as_str() {
            "negative" => EnergySign::Negative,
            "positive" => EnergySign::Positive,
            other => return Err(invalid(format!("unknown sign: {other}"))),
        };
        let spin = match self.spin.as_str() {
            "up" => Spin::Up,
            "down" => Spin::Down,
            other => return Err(invalid(format!("unknown spin: {other}"))),
        };
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(invalid(format!(
                "packet sigma must be positive, got {}",
                self.sigma
            )));
        }
        let center = SpacetimePoint::new(
            self.center[0],
            self.center[1],
            self.center[2],
            self.center[3],
        )
        .map_err(|e| invalid(e.to_string()))?;
        let p = ThreeMomentum::new(
            self.momentum_center[0],
            self.momentum_center[1],
            self.momentum_center[2],
        )
        .map_err(|e| invalid(e.to_string()))?;
        let amp = self
            .amplitude
            .map(|[re, im]| Complex64::new(re, im))
            .unwrap_or(Complex64::new(1.0, 0.0));
        let packet = match self.profile.as_str() {
            "special_a" => {
                if sign != EnergySign::Negative {
                    return Err(invalid("special_a packets live in the negative branch"));
                }
                let coeff = self
                    .coeff
                    .unwrap_or((2.0 * std::f64::consts::PI.sqrt() * self.sigma).powi(-3));
                WavePacket::special_a(spin, self.sigma, coeff, center)
            }
            "special_b" => {
                if sign != EnergySign::Negative {
                    return Err(invalid("special_b packets live in the negative branch"));
                }
                let coeff = self.coeff.unwrap_or(
                    std::f64::consts::PI.powf(-1.5) * self.sigma.powi(-5) / 16.0,
                );
                WavePacket::special_b(spin, self.sigma, coeff, center)
            }
            "isotropic_gaussian" => {
                WavePacket::isotropic_gaussian(sign, spin, self.sigma, center, p, amp)
            }
            "narrow_gaussian" => WavePacket::narrow_gaussian(sign, spin, self.sigma, p),
            other => return Err(invalid(format!("unknown packet profile: {other}"))),
        };
        packet.map_err(|e| invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub sizes: Vec<usize>,
    #[serde(default = "default_extent_factor")]
    pub extent_factor: f64,
}

fn default_extent_factor() -> f64 {
    1.1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default = "default_mass")]
    pub m: f64,
    pub cutoff: Option<CutoffSpec>,
    #[serde(default)]
    pub family: Vec<PacketSpec>,
    #[serde(default)]
    pub points: Vec<[f64; 4]>,
    pub lattice: Option<LatticeSpec>,
    /// decay-probe data: ray direction and radii
    #[serde(default)]
    pub ray_direction: Option<[f64; 4]>,
    #[serde(default)]
    pub radii: Vec<f64>,
    /// xi-grid for kernel sweeps
    #[serde(default)]
    pub xi_grid: Vec<[f64; 4]>,
    /// perturbation experiment: number of random state sets and per-set size
    #[serde(default)]
    pub random_sets: Option<usize>,
    #[serde(default)]
    pub states_per_set: Option<usize>,
    /// rank threshold tau
    #[serde(default)]
    pub rank_tau: Option<f64>,
}

fn default_mass() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_str_checked(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(invalid(format!("mass must be positive, got {}", self.m)));
        }
        for p in &self.points {
            if p.iter().any(|v| !v.is_finite()) {
                return Err(invalid("grid points must be finite"));
            }
        }
        if let Some(l) = &self.lattice {
            if l.sizes.is_empty() || l.sizes.iter().any(|n| *n < 2) {
                return Err(invalid("lattice sizes must all be at least 2"));
            }
            if !l.extent_factor.is_finite() || l.extent_factor <= 0.0 {
                return Err(invalid("lattice extent factor must be positive"));
            }
        }
        Ok(())
    }

    pub fn mass(&self) -> Result<Mass, ConfigError> {
        Mass::new(self.m).map_err(|e| invalid(e.to_string()))
    }

    pub fn cutoff_profile(&self) -> Result<CutoffProfile, ConfigError> {
        let spec = self
            .cutoff
            .as_ref()
            .ok_or_else(|| invalid("experiment needs a cutoff spec"))?;
        spec.build(self.mass()?)
    }

    pub fn packets(&self) -> Result<Vec<WavePacket>, ConfigError> {
        self.family.iter().map(|p| p.build()).collect()
    }

    pub fn spacetime_points(&self) -> Result<Vec<SpacetimePoint>, ConfigError> {
        self.points
            .iter()
            .map(|p| SpacetimePoint::new(p[0], p[1], p[2], p[3]).map_err(|e| invalid(e.to_string())))
            .collect()
    }
}
