//! Run configuration read from TOML.
//!
//! ```toml
//! [physical]
//! fr = 0.6
//!
//! [grid]
//! nx = 60
//! nz = 12
//! ```
//!
//! Every key has a default; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HullError, Result};
use crate::geometry::{build_grid, FlowParams, GridSpec};
use crate::solver::UzawaOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalConfig {
    pub rho: f64,
    pub g: f64,
    pub length: f64,
    pub draft: f64,
    pub volume: f64,
    pub cd: f64,
    /// Towing speed in m/s; exclusive with `fr`.
    pub speed: Option<f64>,
    pub fr: Option<f64>,
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        Self { rho: 1000.0, g: 9.81, length: 2.0, draft: 0.2, volume: 0.03, cd: 1e-2, speed: None, fr: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub nz: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { nx: 100, nz: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Midpoint nodes per octave and on the singular interval.
    pub n_per_octave: usize,
    pub k_lambda_max: usize,
    /// Relative Frobenius contribution below which octaves stop; `0` keeps all.
    pub tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { n_per_octave: 80, k_lambda_max: 14, tol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    #[default]
    Flat,
    Wigley,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub dr1: Option<f64>,
    pub dr2: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub init: InitKind,
    /// Hull CSV used when `init = "file"`.
    pub init_file: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = UzawaOptions::default();
        Self { dr1: d.dr1, dr2: d.dr2, tol: d.tol, max_iter: d.max_iter, init: InitKind::Flat, init_file: None }
    }
}

impl SolverConfig {
    pub fn uzawa(&self) -> UzawaOptions {
        UzawaOptions { dr1: self.dr1, dr2: self.dr2, tol: self.tol, max_iter: self.max_iter }
    }
}

/// Parameters of the sweep-style subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub froude: Vec<f64>,
    /// Froude number of the boundary-layer study.
    pub blayer_fr: f64,
    /// Multiples of the reference `eps` visited by the boundary-layer study.
    pub eps_factors: Vec<f64>,
    /// Design speed of the hull compared against the Wigley hull.
    pub design_fr: f64,
    /// Relative eigenvalue thresholds counted by the spectrum census.
    pub thresholds: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            froude: vec![0.1, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.5, 2.0],
            blayer_fr: 1.0,
            eps_factors: vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4],
            design_fr: 0.5,
            thresholds: vec![1e-15, 1e-12, 1e-9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub physical: PhysicalConfig,
    pub grid: GridConfig,
    pub quadrature: QuadratureConfig,
    pub solver: SolverConfig,
    pub experiment: ExperimentConfig,
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(HullError::arg(name, format!("must be positive, got {value}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HullError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HullError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.physical;
        positive("physical.rho", p.rho)?;
        positive("physical.g", p.g)?;
        positive("physical.length", p.length)?;
        positive("physical.draft", p.draft)?;
        positive("physical.volume", p.volume)?;
        positive("physical.cd", p.cd)?;
        match (p.speed, p.fr) {
            (Some(_), Some(_)) => return Err(HullError::arg("physical.speed", "give either `speed` or `fr`, not both")),
            (Some(u), None) => positive("physical.speed", u)?,
            (None, Some(fr)) => positive("physical.fr", fr)?,
            (None, None) => {}
        }
        if self.grid.nx < 2 || self.grid.nz < 2 {
            return Err(HullError::arg("grid.nx", "grid needs at least 2 cells in each direction"));
        }
        if self.quadrature.n_per_octave == 0 {
            return Err(HullError::arg("quadrature.n_per_octave", "must be at least 1"));
        }
        if self.quadrature.k_lambda_max == 0 {
            return Err(HullError::arg("quadrature.k_lambda_max", "must be at least 1"));
        }
        if !(self.quadrature.tol.is_finite() && self.quadrature.tol >= 0.0) {
            return Err(HullError::arg("quadrature.tol", "must be nonnegative"));
        }
        let s = &self.solver;
        if let Some(d) = s.dr1 {
            positive("solver.dr1", d)?;
        }
        if let Some(d) = s.dr2 {
            positive("solver.dr2", d)?;
        }
        positive("solver.tol", s.tol)?;
        if s.max_iter == 0 {
            return Err(HullError::arg("solver.max_iter", "must be at least 1"));
        }
        if s.init == InitKind::File && s.init_file.is_none() {
            return Err(HullError::arg("solver.init_file", "required when init = \"file\""));
        }
        let e = &self.experiment;
        for &fr in &e.froude {
            positive("experiment.froude", fr)?;
        }
        positive("experiment.blayer_fr", e.blayer_fr)?;
        positive("experiment.design_fr", e.design_fr)?;
        for &k in &e.eps_factors {
            positive("experiment.eps_factors", k)?;
        }
        for &t in &e.thresholds {
            positive("experiment.thresholds", t)?;
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        build_grid(self.physical.length, self.physical.draft, self.grid.nx, self.grid.nz)
    }

    /// Flow at Froude number `fr`.
    pub fn flow_at(&self, fr: f64) -> Result<FlowParams> {
        let p = &self.physical;
        FlowParams::from_froude(p.rho, p.g, fr, p.length, p.cd)
    }

    /// Flow at the configured speed, if one was given.
    pub fn flow(&self) -> Result<FlowParams> {
        let p = &self.physical;
        match (p.speed, p.fr) {
            (Some(u), None) => FlowParams::new(p.rho, p.g, u, p.length, p.cd),
            (None, Some(fr)) => self.flow_at(fr),
            _ => Err(HullError::arg("physical.fr", "set exactly one of `speed` or `fr`")),
        }
    }
}
