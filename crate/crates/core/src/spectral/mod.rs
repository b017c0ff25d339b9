//! Rayleigh–Ritz estimates for |p| on intervals and boxes.
//!
//! The form ∫|ξ||û(ξ)|²dξ is discretized on two unrelated trial families:
//! global sines and piecewise-linear hats. Both vanish outside the domain.

mod assembly;
pub mod axis;
mod solver;

pub use assembly::{assemble_form_matrix, FormMatrices};
pub use axis::{Axis, Family};
pub use solver::{generalized_eigen, solve_spectrum};

use crate::geometry::{Domain, Shape};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const DEFAULT_QUAD_TOL: f64 = 1e-6;
/// Default cutoff as a multiple of the largest basis frequency.
pub const DEFAULT_CUTOFF_FACTOR: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub family: Family,
    pub domain: Domain,
    /// Per-axis mode count (sine) or cell count (hat).
    pub resolution: Vec<usize>,
    pub xi_cutoff: f64,
    pub quad_tol: f64,
}

impl BasisDescriptor {
    /// Same resolution on every axis, default cutoff and tolerance.
    pub fn new(domain: &Domain, family: Family, resolution: usize) -> Result<Self> {
        let d = domain.dim();
        Self::with_resolution(domain, family, vec![resolution; d])
    }

    pub fn with_resolution(domain: &Domain, family: Family, resolution: Vec<usize>) -> Result<Self> {
        let mut b = BasisDescriptor {
            family,
            domain: domain.clone(),
            resolution,
            xi_cutoff: f64::NAN,
            quad_tol: DEFAULT_QUAD_TOL,
        };
        b.check_shape()?;
        b.xi_cutoff = DEFAULT_CUTOFF_FACTOR * b.max_frequency();
        b.validate()?;
        Ok(b)
    }

    pub fn with_cutoff(mut self, xi: f64) -> Result<Self> {
        self.xi_cutoff = xi;
        self.validate()?;
        Ok(self)
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Result<Self> {
        self.quad_tol = tol;
        self.validate()?;
        Ok(self)
    }

    fn check_shape(&self) -> Result<()> {
        match self.domain.shape() {
            Shape::Interval { .. } | Shape::Box { .. } => {}
            Shape::Ball { .. } => return Err(Error::UnsupportedDomain),
        }
        let d = self.domain.dim();
        if d > 2 {
            return Err(Error::DimensionUnsupported { operation: "spectral assembly", dim: d });
        }
        if self.resolution.len() != d {
            return Err(Error::InvalidArgument(format!("resolution has {} axes, domain has {d}", self.resolution.len())));
        }
        let min = match self.family {
            Family::Sine => 1,
            Family::Hat => 2,
        };
        if self.resolution.iter().any(|&n| n < min) {
            return Err(Error::InvalidArgument(format!("{} resolution must be at least {min} per axis", self.family)));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        if !(self.xi_cutoff.is_finite() && self.xi_cutoff > self.max_frequency()) {
            return Err(Error::InvalidArgument(format!(
                "cutoff {} must exceed the largest basis frequency {}",
                self.xi_cutoff,
                self.max_frequency()
            )));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol <= 1e-4) {
            return Err(Error::InvalidArgument(format!("quad_tol {} outside (0, 1e-4]", self.quad_tol)));
        }
        Ok(())
    }

    pub fn axes(&self) -> Vec<Axis> {
        let sides = self.domain.sides().expect("interval or box");
        sides
            .iter()
            .zip(&self.resolution)
            .zip(self.domain.anchor())
            .map(|((&l, &n), &a)| Axis::new(self.family, n, l, a))
            .collect()
    }

    pub fn max_frequency(&self) -> f64 {
        self.axes().iter().map(Axis::max_frequency).fold(0.0, f64::max)
    }

    /// Number of trial functions (product of per-axis counts).
    pub fn size(&self) -> usize {
        self.axes().iter().map(Axis::count).product()
    }

    /// Multi-index of flat index `i` (last axis fastest).
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let axes = self.axes();
        let mut out = vec![0; axes.len()];
        for (slot, ax) in out.iter_mut().zip(&axes).rev() {
            *slot = i % ax.count();
            i /= ax.count();
        }
        out
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        self.axes().iter().zip(index).fold(0, |acc, (ax, &a)| acc * ax.count() + a)
    }

    /// The same descriptor at half the resolution, if it still has at least `k` functions.
    pub fn coarsened(&self, k: usize) -> Option<Self> {
        let res: Vec<usize> = self.resolution.iter().map(|&n| n / 2).collect();
        let b = BasisDescriptor { resolution: res, ..self.clone() };
        (b.check_shape().is_ok() && b.size() >= k).then_some(b)
    }
}

/// Fourier transform of the zero-extended trial function at `index`.
pub fn basis_fourier_transform(basis: &BasisDescriptor, index: &[usize], xi: &[f64]) -> Result<Complex64> {
    let axes = basis.axes();
    if index.len() != axes.len() || xi.len() != axes.len() {
        return Err(Error::InvalidArgument("index and xi must match the domain dimension".into()));
    }
    let mut out = Complex64::new(1.0, 0.0);
    for ((ax, &a), &t) in axes.iter().zip(index).zip(xi) {
        if a >= ax.count() {
            return Err(Error::InvalidArgument(format!("index {a} out of range (< {})", ax.count())));
        }
        out *= ax.ft(a, t) * Complex64::from_polar(1.0, -t * ax.center());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub domain: Domain,
    pub basis: BasisDescriptor,
    pub eigenvalues: Vec<f64>,
    /// coefficients[j] is the coordinate vector of mode j.
    pub coefficients: Vec<Vec<f64>>,
    pub k_retained: usize,
    /// |β_j(n) − β_j(n/2)|, when the coarse basis is large enough.
    pub error_estimates: Option<Vec<f64>>,
}

/// External JSON shape of a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub domain: String,
    pub family: Family,
    pub resolution: Vec<usize>,
    pub xi_cutoff: f64,
    pub eigenvalues: Vec<f64>,
    pub error_estimates: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coefficients: Option<Vec<Vec<f64>>>,
}

impl SpectrumResult {
    pub fn report(&self, with_coefficients: bool) -> SpectrumReport {
        SpectrumReport {
            domain: self.domain.to_string(),
            family: self.basis.family,
            resolution: self.basis.resolution.clone(),
            xi_cutoff: self.basis.xi_cutoff,
            eigenvalues: self.eigenvalues.clone(),
            error_estimates: self.error_estimates.clone(),
            coefficients: with_coefficients.then(|| self.coefficients.clone()),
        }
    }
}

/// Assemble and solve at `basis`, attaching a two-resolution error estimate.
pub fn compute_spectrum_with(basis: &BasisDescriptor, k: usize) -> Result<SpectrumResult> {
    let mats = assemble_form_matrix(basis)?;
    let mut result = solve_spectrum(&mats, k)?;
    if let Some(coarse) = basis.coarsened(k) {
        let coarse = coarse.with_cutoff(basis.xi_cutoff)?;
        let rough = solve_spectrum(&assemble_form_matrix(&coarse)?, k)?;
        result.error_estimates = Some(
            result.eigenvalues.iter().zip(&rough.eigenvalues).map(|(f, c)| (c - f).abs()).collect(),
        );
    }
    Ok(result)
}

pub fn compute_spectrum(domain: &Domain, family: Family, resolution: usize, k: usize) -> Result<SpectrumResult> {
    compute_spectrum_with(&BasisDescriptor::new(domain, family, resolution)?, k)
}
