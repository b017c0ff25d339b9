//! Closed-form constants and eigenvalue-sum bounds.
//!
//! Laplacian comparators (Li–Yau, Melas) take eigenvalue sums of the
//! Dirichlet Laplacian; the `kg_*` evaluators bound sums of eigenvalues of
//! |p| restricted to Ω.

use crate::error::{Error, Result};
use crate::special::gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Volume of the unit ball in ℝ^d.
pub fn omega_d(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    PI.powf(h) / gamma(1.0 + h)
}

/// C̃_d = √(4π) Γ(1 + d/2)^{1/d}, the Weyl constant for |p|.
pub fn tilde_c_d(d: usize) -> f64 {
    let df = d as f64;
    (4.0 * PI).sqrt() * gamma(1.0 + df / 2.0).powf(1.0 / df)
}

/// Geometric input of the bounds: dimension, |Ω| and I(Ω).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub d: usize,
    pub volume: f64,
    pub inertia: f64,
}

impl DomainSpec {
    pub fn of(dom: &crate::geometry::Domain) -> Self {
        DomainSpec { d: dom.dim(), volume: dom.volume(), inertia: dom.moment_of_inertia() }
    }
}

/// Li–Yau lower bound on Σ_{j≤k} λ_j for the Dirichlet Laplacian.
pub fn li_yau_laplacian_bound(d: usize, volume: f64, k: usize) -> f64 {
    let df = d as f64;
    let c_d = 4.0 * PI * gamma(1.0 + df / 2.0).powf(2.0 / df);
    df / (df + 2.0) * c_d * volume.powf(-2.0 / df) * (k as f64).powf(1.0 + 2.0 / df)
}

/// Melas' improvement of the Li–Yau bound. The dimensional constant `m_d` is
/// supplied by the caller; zero reproduces the Li–Yau bound.
pub fn melas_laplacian_bound(spec: DomainSpec, k: usize, m_d: f64) -> Result<f64> {
    if !(m_d >= 0.0 && m_d.is_finite()) {
        return Err(Error::InvalidArgument(format!("Melas constant must be non-negative, got {m_d}")));
    }
    Ok(li_yau_laplacian_bound(spec.d, spec.volume, k) + m_d * k as f64 * spec.volume / spec.inertia)
}

/// Σ_{j≤k} β_j ≥ d/(d+1) · C̃_d · |Ω|^{-1/d} · k^{1+1/d}.
pub fn kg_berezin_li_yau_bound(d: usize, volume: f64, k: usize) -> f64 {
    let df = d as f64;
    df / (df + 1.0) * tilde_c_d(d) * volume.powf(-1.0 / df) * (k as f64).powf(1.0 + 1.0 / df)
}

/// Leading Weyl asymptotics β_k ≈ C̃_d |Ω|^{-1/d} k^{1/d}.
pub fn weyl_estimate(d: usize, volume: f64, k: usize) -> f64 {
    let df = d as f64;
    tilde_c_d(d) * volume.powf(-1.0 / df) * (k as f64).powf(1.0 / df)
}

/// m = 2 (2π)^{-d} √(|Ω| I(Ω)), the bound on |∇F| for the Fourier density.
pub fn slope_bound_m(spec: DomainSpec) -> f64 {
    2.0 * (2.0 * PI).powi(-(spec.d as i32)) * (spec.volume * spec.inertia).sqrt()
}

/// (2π)^{-d} ω_d^{-1/d} |Ω|^{(d+1)/d}: the value m takes for a ball of the same
/// volume, and hence a lower bound on m.
pub fn slope_bound_floor(d: usize, volume: f64) -> f64 {
    let df = d as f64;
    (2.0 * PI).powi(-(d as i32)) * omega_d(d).powf(-1.0 / df) * volume.powf((df + 1.0) / df)
}

/// C = min{1/6, m²(d−1)k^{2/d}(2π)^{d+2} / ((2d+1) ω_d^{2/d} |Ω|^{1+2/d})}.
pub fn improved_constant_c(spec: DomainSpec, k: usize) -> Result<f64> {
    if spec.d < 2 {
        return Err(Error::DimensionUnsupported { operation: "improved constant C", dim: spec.d });
    }
    let df = spec.d as f64;
    let m = slope_bound_m(spec);
    let second = m * m * (df - 1.0) * (k as f64).powf(2.0 / df) * (2.0 * PI).powi(spec.d as i32 + 2)
        / ((2.0 * df + 1.0) * omega_d(spec.d).powf(2.0 / df) * spec.volume.powf(1.0 + 2.0 / df));
    Ok(second.min(1.0 / 6.0))
}

/// M̃_d = C d / (8 √π (d² − 1) Γ(1 + d/2)^{1/d}).
pub fn improved_constant_m(d: usize, c: f64) -> f64 {
    let df = d as f64;
    c * df / (8.0 * PI.sqrt() * (df * df - 1.0) * gamma(1.0 + df / 2.0).powf(1.0 / df))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Applicability {
    Full,
    LeadingOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub omega_d: f64,
    pub tilde_c_d: f64,
    pub m: Option<f64>,
    pub c: Option<f64>,
    pub tilde_m_d: Option<f64>,
}

/// One bound evaluation split into its terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub k: usize,
    pub d: usize,
    pub leading_term: f64,
    pub correction_term: f64,
    pub total: f64,
    pub constants: BoundConstants,
    pub applicability: Applicability,
}

/// The improved lower bound on Σ_{j≤k} β_j. In one dimension the correction
/// is undefined (d² − 1 = 0) and only the leading term is returned, flagged.
pub fn improved_kg_bound(spec: DomainSpec, k: usize) -> BoundBreakdown {
    let d = spec.d;
    let leading_term = kg_berezin_li_yau_bound(d, spec.volume, k);
    let mut constants = BoundConstants {
        omega_d: omega_d(d),
        tilde_c_d: tilde_c_d(d),
        m: Some(slope_bound_m(spec)),
        c: None,
        tilde_m_d: None,
    };
    let (correction_term, applicability) = match improved_constant_c(spec, k) {
        Ok(c) => {
            let df = d as f64;
            let m_tilde = improved_constant_m(d, c);
            constants.c = Some(c);
            constants.tilde_m_d = Some(m_tilde);
            let corr = m_tilde * spec.volume.powf(1.0 + 1.0 / df) / spec.inertia * (k as f64).powf(1.0 - 1.0 / df);
            (corr, Applicability::Full)
        }
        Err(_) => (0.0, Applicability::LeadingOnly),
    };
    BoundBreakdown {
        k,
        d,
        leading_term,
        correction_term,
        total: leading_term + correction_term,
        constants,
        applicability,
    }
}

/// Riesz mean R_σ(z) = Σ_j (z − λ_j)₊^σ. For σ = 0 this counts the values
/// strictly below z.
pub fn riesz_mean(spectrum: &[f64], z: f64, sigma: f64) -> f64 {
    spectrum
        .iter()
        .map(|&v| z - v)
        .filter(|&gap| gap > 0.0)
        .map(|gap| if sigma == 0.0 { 1.0 } else { gap.powf(sigma) })
        .sum()
}

/// Validates a spectrum read from outside (ascending, finite).
pub fn check_spectrum(values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("spectrum contains non-finite values".into()));
    }
    if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument(format!(
            "spectrum is not ascending at index {}: {} > {}",
            i + 1,
            values[i],
            values[i + 1]
        )));
    }
    Ok(())
}
