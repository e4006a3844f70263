//! JSON run configuration.

use crate::CliError;
use dtn_core::basis::Robin;
use dtn_core::fd::OracleOptions;
use dtn_core::solver::SolverOptions;
use dtn_core::window::{Window1D, Window2D};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Strip,
    Coupled,
    Layer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum WindowSpec {
    Intervals { items: Vec<[f64; 2]> },
    Disk { radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub enabled: bool,
    pub h: f64,
    pub half_length: f64,
    pub refinements: usize,
    pub check_truncation: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        let o = OracleOptions::default();
        Self { enabled: true, h: o.h, half_length: o.half_length, refinements: o.refinements, check_truncation: true }
    }
}

impl OracleConfig {
    pub fn options(&self) -> OracleOptions {
        OracleOptions {
            h: self.h,
            half_length: self.half_length,
            refinements: self.refinements,
            check_truncation: self.check_truncation,
            ..OracleOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub alpha: f64,
    pub alpha_plus: Option<f64>,
    pub alpha_minus: Option<f64>,
    pub window: WindowSpec,
    /// polynomial coefficients of b in the physical coordinate
    pub robin: Vec<f64>,
    pub ells: Vec<f64>,
    pub basis_degree: usize,
    pub harmonics: usize,
    pub solver: SolverOptions,
    pub oracle: OracleConfig,
    /// threshold − ω used by the expansion-residual table
    pub detuning: f64,
    pub tolerance_scale: f64,
    pub export_matrices: bool,
    pub deterministic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: Geometry::Strip,
            alpha: std::f64::consts::PI,
            alpha_plus: None,
            alpha_minus: None,
            window: WindowSpec::Intervals { items: vec![[-1.0, 1.0]] },
            robin: Vec::new(),
            ells: vec![0.2, 0.1, 0.05, 0.025],
            basis_degree: 32,
            harmonics: 3,
            solver: SolverOptions::default(),
            oracle: OracleConfig::default(),
            detuning: 1e-8,
            tolerance_scale: 1.0,
            export_matrices: false,
            deterministic: true,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !self.deterministic {
            return Err(CliError::Config("runs are always deterministic".into()));
        }
        positive("alpha", self.alpha)?;
        positive("tolerance_scale", self.tolerance_scale)?;
        positive("detuning", self.detuning)?;
        positive("solver.rel_tol", self.solver.rel_tol)?;
        for &l in &self.ells {
            positive("ell", l)?;
        }
        if self.basis_degree == 0 || self.basis_degree > 512 {
            return Err(CliError::Config("basis_degree must lie in 1..=512".into()));
        }
        if self.harmonics == 0 {
            return Err(CliError::Config("harmonics must be at least 1".into()));
        }
        if self.robin.iter().any(|c| !c.is_finite()) {
            return Err(CliError::Config("robin coefficients must be finite".into()));
        }
        positive("oracle.h", self.oracle.h)?;
        positive("oracle.half_length", self.oracle.half_length)?;
        if self.geometry == Geometry::Coupled {
            positive("alpha_plus", self.alpha_plus.unwrap_or(f64::NAN))?;
            positive("alpha_minus", self.alpha_minus.unwrap_or(f64::NAN))?;
        }
        match (&self.window, self.geometry) {
            (WindowSpec::Intervals { .. }, Geometry::Layer) | (WindowSpec::Disk { .. } | WindowSpec::Annulus { .. }, Geometry::Strip | Geometry::Coupled) => {
                return Err(CliError::Config("window type does not match the geometry".into()));
            }
            _ => {}
        }
        match &self.window {
            WindowSpec::Intervals { .. } => {
                self.window_1d()?;
            }
            _ => {
                self.window_2d()?;
            }
        }
        Ok(())
    }

    pub fn robin(&self) -> Robin {
        Robin { coeffs: self.robin.clone() }
    }

    pub fn window_1d(&self) -> Result<Window1D, CliError> {
        match &self.window {
            WindowSpec::Intervals { items } => Ok(Window1D::new(items.iter().map(|p| (p[0], p[1])).collect())?),
            _ => Err(CliError::Config("expected an interval window".into())),
        }
    }

    pub fn window_2d(&self) -> Result<Window2D, CliError> {
        match self.window {
            WindowSpec::Disk { radius } => Ok(Window2D::disk(radius)?),
            WindowSpec::Annulus { r_in, r_out } => Ok(Window2D::annulus(r_in, r_out)?),
            _ => Err(CliError::Config("expected a disk or annulus window".into())),
        }
    }

    pub fn coupled_widths(&self) -> (f64, f64) {
        (self.alpha_plus.unwrap_or(self.alpha), self.alpha_minus.unwrap_or(self.alpha))
    }
}
