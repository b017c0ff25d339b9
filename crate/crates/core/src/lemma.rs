//! The one-dimensional moment inequality behind the improved bound, with
//! every intermediate step exposed as a separately testable reporter.
//!
//! Functions are piecewise linear, so all moments are evaluated with exact
//! polynomial antiderivatives; a negative gap is a property of the input,
//! not of the arithmetic.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Nonincreasing, piecewise-linear φ on [0, ∞) with |φ'| ≤ m. Constant at its
/// last value beyond the final knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedDecreasingFn {
    knots: Vec<f64>,
    values: Vec<f64>,
    #[serde(rename = "m")]
    slope_bound: f64,
}

const SLOPE_TOL: f64 = 1e-12;

impl TabulatedDecreasingFn {
    pub fn new(knots: Vec<f64>, values: Vec<f64>, slope_bound: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if knots.is_empty() || knots.len() != values.len() {
            return bad(format!("need matching non-empty knots/values, got {} and {}", knots.len(), values.len()));
        }
        if knots[0] != 0.0 {
            return bad("first knot must be 0".into());
        }
        if !(slope_bound > 0.0 && slope_bound.is_finite()) {
            return bad(format!("slope bound must be positive, got {slope_bound}"));
        }
        if !(values[0] > 0.0) || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("values must be finite, non-negative, with φ(0) > 0".into());
        }
        for (i, (kw, vw)) in knots.windows(2).zip(values.windows(2)).enumerate() {
            if !(kw[1] > kw[0]) || !kw[1].is_finite() {
                return bad(format!("knots must be strictly ascending (segment {i})"));
            }
            if vw[1] > vw[0] {
                return bad(format!("values must be nonincreasing (segment {i})"));
            }
            let slope = (vw[0] - vw[1]) / (kw[1] - kw[0]);
            // knot differences lose precision when knots are close together
            let rel = SLOPE_TOL + 4.0 * f64::EPSILON * kw[1].abs() / (kw[1] - kw[0]);
            if slope > slope_bound * (1.0 + rel) {
                return bad(format!("segment {i} has slope {slope} above the bound {slope_bound}"));
            }
        }
        Ok(TabulatedDecreasingFn { knots, values, slope_bound })
    }

    /// Knot/value JSON as used on the command line: `{"knots":[..],"values":[..],"m":..}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: TabulatedDecreasingFn =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("malformed function JSON: {e}")))?;
        Self::new(raw.knots, raw.values, raw.slope_bound)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slope_bound(&self) -> f64 {
        self.slope_bound
    }

    pub fn at_zero(&self) -> f64 {
        self.values[0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.values[0];
        }
        match self.knots.iter().position(|&k| k >= x) {
            None => *self.values.last().unwrap(),
            Some(i) => {
                let (x0, x1) = (self.knots[i - 1], self.knots[i]);
                let (v0, v1) = (self.values[i - 1], self.values[i]);
                v0 + (v1 - v0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Largest segment slope −Δφ/Δx.
    pub fn max_slope(&self) -> f64 {
        self.segments().map(|(_, w, v0, v1)| (v0 - v1) / w).fold(0.0, f64::max)
    }

    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(k, v)| (k[0], k[1] - k[0], v[0], v[1]))
    }

    fn require_compact_support(&self) -> Result<()> {
        if *self.values.last().unwrap() > 0.0 {
            Err(Error::DivergentIntegral)
        } else {
            Ok(())
        }
    }

    /// ∫₀^∞ x^p φ(x) dx.
    pub fn power_moment(&self, p: u32) -> Result<f64> {
        self.require_compact_support()?;
        Ok(self.segments().map(|(a, w, v0, v1)| segment_moment(a, w, v0, (v1 - v0) / w, p)).sum())
    }

    /// ∫₀^∞ x^q (−φ'(x)) dx; φ' is piecewise constant.
    pub fn derivative_moment(&self, q: u32) -> f64 {
        self.segments()
            .map(|(a, w, v0, v1)| (v0 - v1) / w * pow_diff(a, a + w, q + 1) / (q as f64 + 1.0))
            .sum()
    }
}

/// b^n − a^n for 0 ≤ a ≤ b without cancellation.
fn pow_diff(a: f64, b: f64, n: u32) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        acc += b.powi(i as i32) * a.powi((n - 1 - i) as i32);
    }
    (b - a) * acc
}

/// ∫_a^{a+w} x^p (v0 + s (x − a)) dx by binomial expansion around a; every
/// term is non-negative when v0 + s·w ≥ 0.
fn segment_moment(a: f64, w: f64, v0: f64, s: f64, p: u32) -> f64 {
    let mut binom = 1.0;
    let mut total = 0.0;
    for i in 0..=p {
        let fi = i as f64;
        let inner = w.powi(i as i32 + 1) * (v0 / (fi + 1.0) + s * w / (fi + 2.0));
        total += binom * a.powi((p - i) as i32) * inner;
        binom = binom * (p - i) as f64 / (fi + 1.0);
    }
    total
}

fn require_d(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::DimensionUnsupported { operation: "lemma", dim: d })
    } else {
        Ok(())
    }
}

/// η(x) = φ(0)^{-1} φ(φ(0) x / m): η(0) = 1 and slope bound 1.
pub fn normalize_eta(phi: &TabulatedDecreasingFn) -> TabulatedDecreasingFn {
    let p0 = phi.at_zero();
    let stretch = phi.slope_bound / p0;
    TabulatedDecreasingFn {
        knots: phi.knots.iter().map(|k| k * stretch).collect(),
        values: phi.values.iter().map(|v| v / p0).collect(),
        slope_bound: 1.0,
    }
}

/// A = ∫x^{d−1}φ and B = ∫x^dφ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub a: f64,
    pub b: f64,
    pub d: usize,
}

pub fn moments(phi: &TabulatedDecreasingFn, d: usize) -> Result<MomentPair> {
    require_d(d)?;
    Ok(MomentPair { a: phi.power_moment(d as u32 - 1)?, b: phi.power_moment(d as u32)?, d })
}

/// Both terms of the lower bound on ∫x^dφ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaTerms {
    pub first: f64,
    pub second: f64,
}

pub fn lemma_terms(phi: &TabulatedDecreasingFn, d: usize) -> Result<LemmaTerms> {
    let mp = moments(phi, d)?;
    let df = d as f64;
    let da = df * mp.a;
    let p0 = phi.at_zero();
    let m = phi.slope_bound;
    Ok(LemmaTerms {
        first: da.powf(1.0 + 1.0 / df) * p0.powf(-1.0 / df) / (df + 1.0),
        second: p0.powf(2.0 + 1.0 / df) / (6.0 * m * m * (df * df - 1.0)) * da.powf(1.0 - 1.0 / df),
    })
}

pub fn lemma_rhs(phi: &TabulatedDecreasingFn, d: usize) -> Result<f64> {
    let t = lemma_terms(phi, d)?;
    Ok(t.first + t.second)
}

/// ∫x^dφ − rhs; negative values are counterexamples.
pub fn lemma_gap(phi: &TabulatedDecreasingFn, d: usize) -> Result<f64> {
    Ok(moments(phi, d)?.b - lemma_rhs(phi, d)?)
}

/// ∫x^dφ minus the first (rearrangement) term only.
pub fn first_term_gap(phi: &TabulatedDecreasingFn, d: usize) -> Result<f64> {
    Ok(moments(phi, d)?.b - lemma_terms(phi, d)?.first)
}

/// The α ≥ 0 with ∫_α^{α+1} x^{d−1} dx = (Ad)^{1−1/d}, or `None` when the
/// target is below 1/d.
pub fn find_alpha(ad: f64, d: usize) -> Result<Option<f64>> {
    require_d(d)?;
    if !(ad > 0.0 && ad.is_finite()) {
        return Err(Error::InvalidArgument(format!("Ad must be positive, got {ad}")));
    }
    let df = d as f64;
    let target = ad.powf(1.0 - 1.0 / df);
    let window = |a: f64| ((a + 1.0).powi(d as i32) - a.powi(d as i32)) / df;
    if target < 1.0 / df {
        return Ok(None);
    }
    if target == 1.0 / df {
        return Ok(Some(0.0));
    }
    // window(α) ≥ α^{d−1}
    let (mut lo, mut hi) = (0.0_f64, target.powf(1.0 / (df - 1.0)).max(1.0));
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if window(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Outcome of the interval-selection step: ∫_α^{α+1} x^{d+1} vs (d+1)B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step12Report {
    pub alpha: Option<f64>,
    /// ∫x^d f with f = −η'.
    pub ad: f64,
    /// d·A from η directly; equals `ad` by integration by parts.
    pub ad_by_parts: f64,
    pub lhs: f64,
    pub middle: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn step12_check(eta: &TabulatedDecreasingFn, d: usize) -> Result<Step12Report> {
    require_d(d)?;
    if (eta.at_zero() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("expected a normalized η with η(0) = 1, got {}", eta.at_zero())));
    }
    let mp = moments(eta, d)?;
    let df = d as f64;
    let ad = eta.derivative_moment(d as u32);
    let middle = eta.derivative_moment(d as u32 + 1);
    let rhs = (df + 1.0) * mp.b;
    let alpha = find_alpha(ad, d)?;
    let (lhs, holds) = match alpha {
        Some(a) => {
            let lhs = pow_diff(a, a + 1.0, d as u32 + 2) / (df + 2.0);
            (lhs, lhs <= rhs + 1e-12)
        }
        // no admissible α: the step is vacuous
        None => (f64::NAN, true),
    };
    Ok(Step12Report { alpha, ad, ad_by_parts: df * mp.a, lhs, middle, rhs, holds })
}

/// g(τ) = (d−1)τ^{d+1} − (d+1)τ^{d−1} − 2τ² + 4τ.
pub fn g_poly(tau: f64, d: usize) -> f64 {
    let df = d as f64;
    (df - 1.0) * tau.powi(d as i32 + 1) - (df + 1.0) * tau.powi(d as i32 - 1) - 2.0 * tau * tau + 4.0 * tau
}

/// (τ−1)² τ (Σ_{k=0}^{d−3} (2k+4) τ^k + (d−1) τ^{d−2}).
pub fn g_poly_factored(tau: f64, d: usize) -> f64 {
    let sum: f64 = (0..d.saturating_sub(2)).map(|k| (2 * k + 4) as f64 * tau.powi(k as i32)).sum();
    let inner = sum + (d as f64 - 1.0) * tau.powi(d as i32 - 2);
    (tau - 1.0).powi(2) * tau * inner
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub min_gap: f64,
    pub mean_gap: f64,
    pub min_relative_gap: f64,
    pub violations: usize,
    pub min_first_term_gap: f64,
    pub argmin_trial: usize,
    pub argmin_fn: TabulatedDecreasingFn,
}

struct Trial {
    gap: f64,
    relative: f64,
    first: f64,
    phi: TabulatedDecreasingFn,
}

/// Draws one admissible compactly supported φ from the trial's own stream.
pub fn random_decreasing_fn(seed: u64, trial: u64) -> TabulatedDecreasingFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let n = rng.gen_range(2..=20usize);
    let m = 10f64.powf(rng.gen_range(-1.0..1.0));
    let p0 = 10f64.powf(rng.gen_range(-1.0..0.7));
    let mut knots = vec![0.0];
    let mut values = vec![p0];
    for i in 1..n {
        let last = i == n - 1;
        let v = *values.last().unwrap();
        // extremal segments (maximal slope) with probability 0.3
        let u: f64 = if rng.gen_bool(0.3) { 1.0 } else { rng.gen_range(0.0..1.0) };
        let (dx, next) = if last {
            (v / (m * u.max(1e-3)), 0.0)
        } else {
            let dx = 10f64.powf(rng.gen_range(-2.0..0.5));
            (dx, (v - u * m * dx).max(0.0))
        };
        knots.push(knots.last().unwrap() + dx.max(1e-9));
        values.push(next);
    }
    // clamp rounding so each segment respects the bound
    for i in 1..values.len() {
        let w = knots[i] - knots[i - 1];
        values[i] = values[i].max(values[i - 1] - m * w).max(0.0);
    }
    *values.last_mut().unwrap() = 0.0;
    let w = knots[n - 1] - knots[n - 2];
    if values[n - 2] > m * w {
        knots[n - 1] = knots[n - 2] + values[n - 2] / m;
    }
    TabulatedDecreasingFn::new(knots, values, m).expect("generator yields admissible functions")
}

/// Seeded property test of the moment inequality over random admissible φ.
/// The report depends only on (d, trials, seed).
pub fn fuzz_lemma(d: usize, trials: usize, seed: u64) -> Result<FuzzReport> {
    require_d(d)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let results: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let phi = random_decreasing_fn(seed, t);
            let mp = moments(&phi, d).expect("compact support");
            let terms = lemma_terms(&phi, d).expect("compact support");
            let gap = mp.b - terms.first - terms.second;
            Trial { gap, relative: gap / mp.b, first: mp.b - terms.first, phi }
        })
        .collect();
    let mut best = 0;
    let (mut sum, mut violations) = (0.0, 0);
    let mut min_rel = f64::INFINITY;
    let mut min_first = f64::INFINITY;
    for (i, r) in results.iter().enumerate() {
        sum += r.gap;
        if r.relative < -1e-12 {
            violations += 1;
        }
        min_rel = min_rel.min(r.relative);
        min_first = min_first.min(r.first);
        if r.gap < results[best].gap {
            best = i;
        }
    }
    Ok(FuzzReport {
        d,
        trials,
        seed,
        min_gap: results[best].gap,
        mean_gap: sum / trials as f64,
        min_relative_gap: min_rel,
        violations,
        min_first_term_gap: min_first,
        argmin_trial: best,
        argmin_fn: results[best].phi.clone(),
    })
}
