//! Unscaled windows Σ on the boundary and their dilations ℓΣ.

use crate::error::{Error, Result};
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Finite union of disjoint open intervals on the boundary line.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Window1D {
    intervals: Vec<(f64, f64)>,
}

impl Window1D {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Geometry("window needs at least one interval".into()));
        }
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Geometry("interval endpoints must be finite with a < b".into()));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for pair in intervals.windows(2) {
            if !(pair[0].1 < pair[1].0) {
                return Err(Error::Geometry("intervals must be separated by positive gaps".into()));
            }
        }
        Ok(Self { intervals })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(alloc::vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a < x && x < b)
    }

    /// Dilation by `s` about the origin.
    pub fn dilate(&self, s: f64) -> Self {
        Self { intervals: self.intervals.iter().map(|&(a, b)| (s * a, s * b)).collect() }
    }

    /// Smallest interval containing the window.
    pub fn hull(&self) -> (f64, f64) {
        (self.intervals[0].0, self.intervals[self.intervals.len() - 1].1)
    }
}

/// Rotationally symmetric window in the boundary plane, centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Window2D {
    Disk { radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
}

impl Window2D {
    pub fn disk(radius: f64) -> Result<Self> {
        let w = Window2D::Disk { radius };
        w.validate()?;
        Ok(w)
    }

    pub fn annulus(r_in: f64, r_out: f64) -> Result<Self> {
        let w = Window2D::Annulus { r_in, r_out };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Window2D::Disk { radius } if radius > 0.0 && radius.is_finite() => Ok(()),
            Window2D::Annulus { r_in, r_out } if r_in > 0.0 && r_in < r_out && r_out.is_finite() => Ok(()),
            _ => Err(Error::Geometry("radii must be positive with r_in < r_out".into())),
        }
    }

    pub fn measure(&self) -> f64 {
        match *self {
            Window2D::Disk { radius } => PI * radius * radius,
            Window2D::Annulus { r_in, r_out } => PI * (r_out * r_out - r_in * r_in),
        }
    }

    pub fn dilate(&self, s: f64) -> Self {
        match *self {
            Window2D::Disk { radius } => Window2D::Disk { radius: s * radius },
            Window2D::Annulus { r_in, r_out } => Window2D::Annulus { r_in: s * r_in, r_out: s * r_out },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Window {
    Line(Window1D),
    Plane(Window2D),
}

impl Window {
    /// Dimension of the boundary carrying the window.
    pub fn dim(&self) -> i32 {
        match self {
            Window::Line(_) => 1,
            Window::Plane(_) => 2,
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            Window::Line(w) => w.measure(),
            Window::Plane(w) => w.measure(),
        }
    }

    pub fn dilate(&self, s: f64) -> Self {
        match self {
            Window::Line(w) => Window::Line(w.dilate(s)),
            Window::Plane(w) => Window::Plane(w.dilate(s)),
        }
    }
}

/// Unscaled window plus scale; geometry is never pre-multiplied.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScaledWindow {
    pub base: Window,
    pub ell: f64,
}

impl ScaledWindow {
    pub fn realized(&self) -> Window {
        self.base.dilate(self.ell)
    }

    pub fn measure(&self) -> f64 {
        libm::pow(self.ell, self.base.dim() as f64) * self.base.measure()
    }
}

pub fn scale(w: &Window, ell: f64) -> Result<ScaledWindow> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::InvalidInput("scale must be positive".into()));
    }
    Ok(ScaledWindow { base: w.clone(), ell })
}
