//! The Fourier density F(ξ) = Σ_j |û_j(ξ)|² of computed Ritz modes and the
//! conditions the sum bound places on it.

use crate::bounds::{improved_constant_c, omega_d, slope_bound_m, DomainSpec};
use crate::geometry::Domain;
use crate::quadrature::{graded_breaks, PanelRule};
use crate::spectral::{Axis, SpectrumResult};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct FourierDensity {
    source: SpectrumResult,
    k: usize,
    axes: Vec<Axis>,
}

/// Per-point transforms of every basis function along each axis.
struct AxisValues {
    f: Vec<Complex64>,
    df: Vec<Complex64>,
}

impl FourierDensity {
    /// Density of the first `k` modes of `source` (k = 0 gives F ≡ 0).
    pub fn new(source: &SpectrumResult, k: usize) -> Result<Self> {
        if k > source.coefficients.len() {
            return Err(Error::InvalidArgument(format!("k = {k} exceeds the {} retained modes", source.coefficients.len())));
        }
        Ok(FourierDensity { source: source.clone(), k, axes: source.basis.axes() })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn source(&self) -> &SpectrumResult {
        &self.source
    }

    pub fn sum_beta(&self) -> f64 {
        self.source.eigenvalues[..self.k].iter().sum()
    }

    fn axis_values(&self, xi: &[f64], with_grad: bool) -> Vec<AxisValues> {
        self.axes
            .iter()
            .zip(xi)
            .map(|(ax, &t)| AxisValues {
                f: (0..ax.count()).map(|a| ax.ft(a, t)).collect(),
                df: if with_grad { (0..ax.count()).map(|a| ax.ft_dt(a, t)).collect() } else { Vec::new() },
            })
            .collect()
    }

    /// û_j(ξ) in coordinates centered on the domain (|û_j| is unaffected).
    pub fn mode_transform(&self, j: usize, xi: &[f64]) -> Complex64 {
        let vals = self.axis_values(xi, false);
        self.mode_parts(j, &vals).0
    }

    // (û_j, ∂_1 û_j, ∂_2 û_j)
    fn mode_parts(&self, j: usize, vals: &[AxisValues]) -> (Complex64, [Complex64; 2]) {
        let c = &self.source.coefficients[j];
        let zero = Complex64::new(0.0, 0.0);
        match vals {
            [v] => {
                let mut u = zero;
                let mut du = zero;
                for (a, &ca) in c.iter().enumerate() {
                    u += v.f[a] * ca;
                    if !v.df.is_empty() {
                        du += v.df[a] * ca;
                    }
                }
                (u, [du, zero])
            }
            [v1, v2] => {
                let n2 = v2.f.len();
                let (mut u, mut d1, mut d2) = (zero, zero, zero);
                for (a1, row) in c.chunks(n2).enumerate() {
                    let mut inner = zero;
                    let mut inner_d = zero;
                    for (a2, &ca) in row.iter().enumerate() {
                        inner += v2.f[a2] * ca;
                        if !v2.df.is_empty() {
                            inner_d += v2.df[a2] * ca;
                        }
                    }
                    u += v1.f[a1] * inner;
                    if !v1.df.is_empty() {
                        d1 += v1.df[a1] * inner;
                        d2 += v1.f[a1] * inner_d;
                    }
                }
                (u, [d1, d2])
            }
            _ => unreachable!("bases are limited to d ≤ 2"),
        }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let vals = self.axis_values(xi, false);
        (0..self.k).map(|j| self.mode_parts(j, &vals).0.norm_sqr()).sum()
    }

    /// F(ξ) and ∇F(ξ) = 2 Re Σ_j conj(û_j) ∇û_j.
    pub fn eval_with_gradient(&self, xi: &[f64]) -> (f64, Vec<f64>) {
        let vals = self.axis_values(xi, true);
        let d = self.dim();
        let mut f = 0.0;
        let mut g = vec![0.0; d];
        for j in 0..self.k {
            let (u, du) = self.mode_parts(j, &vals);
            f += u.norm_sqr();
            for (gi, dui) in g.iter_mut().zip(du) {
                *gi += 2.0 * (u.conj() * dui).re;
            }
        }
        (f, g)
    }

    pub fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        self.eval_with_gradient(xi).1
    }
}

pub fn eval_f(fd: &FourierDensity, xi: &[f64]) -> f64 {
    fd.eval(xi)
}

// ---------------------------------------------------------------------------
// Integrals of F and |ξ|F

/// Default quadrature cutoff for density integrals, in units of the largest basis frequency.
pub const DENSITY_CUTOFF_FACTOR: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityIntegrals {
    pub cutoff: f64,
    /// ∫F over the cutoff box plus the analytic tail.
    pub mass: f64,
    /// ∫|ξ|F likewise.
    pub first_moment: f64,
    pub tail_mass: f64,
    pub tail_first: f64,
}

fn density_rule(axis: &Axis, xi: f64) -> PanelRule {
    let width = (4.0 * PI / axis.oscillation_rate()).min(xi / 8.0);
    let mut breaks = graded_breaks(width, 6);
    let steps = ((xi - width) / width).ceil().max(1.0) as usize;
    let step = (xi - width) / steps as f64;
    for i in 1..=steps {
        breaks.push(if i == steps { xi } else { width + i as f64 * step });
    }
    let panels: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
    PanelRule::from_panels(&panels)
}

/// Analytic contributions of |ξ| > Ξ (per axis) to ∫F and ∫|ξ|F.
fn density_tails(fd: &FourierDensity, xi: f64) -> (f64, f64) {
    let tails: Vec<_> = fd.axes.iter().map(|ax| ax.pair_tails(xi)).collect();
    let mut mass = 0.0;
    let mut first = 0.0;
    for c in &fd.source.coefficients[..fd.k] {
        match fd.axes.as_slice() {
            [ax] => {
                for (a, &ca) in c.iter().enumerate() {
                    for (b, &cb) in c.iter().enumerate() {
                        if let Some(p) = ax.pair_index(a, b) {
                            mass += 2.0 * ca * cb * tails[0][p].zeroth;
                            first += 2.0 * ca * cb * tails[0][p].first;
                        }
                    }
                }
            }
            [ax1, ax2] => {
                let n2 = ax2.count();
                for (i, &ci) in c.iter().enumerate() {
                    for (j, &cj) in c.iter().enumerate() {
                        let (a1, a2, b1, b2) = (i / n2, i % n2, j / n2, j % n2);
                        if let (Some(p), Some(q)) = (ax1.pair_index(a1, b1), ax2.pair_index(a2, b2)) {
                            let (t1, t2) = (&tails[0][p], &tails[1][q]);
                            let (m1, m2) = (ax1.mass(a1, b1), ax2.mass(a2, b2));
                            let w = ci * cj;
                            mass += w * (2.0 * t1.zeroth * m2 + 2.0 * t2.zeroth * m1 - 4.0 * t1.zeroth * t2.zeroth);
                            first += w * (2.0 * t1.first * m2 + 2.0 * t2.first * m1);
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    (mass, first)
}

/// ∫F and ∫|ξ|F over ℝ^d, using F(−ξ) = F(ξ) to halve the first axis.
pub fn integrate_density(fd: &FourierDensity, cutoff: Option<f64>) -> Result<DensityIntegrals> {
    let max_freq = fd.axes.iter().map(Axis::max_frequency).fold(0.0, f64::max);
    let xi = cutoff.unwrap_or(DENSITY_CUTOFF_FACTOR * max_freq);
    if !(xi > max_freq) {
        return Err(Error::CutoffTooSmall { ratio: xi / max_freq });
    }
    if fd.k == 0 {
        return Ok(DensityIntegrals { cutoff: xi, mass: 0.0, first_moment: 0.0, tail_mass: 0.0, tail_first: 0.0 });
    }
    let (mut mass, mut first) = match fd.axes.as_slice() {
        [ax] => {
            let rule = density_rule(ax, xi);
            let (mut m, mut f) = (0.0, 0.0);
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let v = fd.eval(&[t]);
                m += 2.0 * w * v;
                f += 2.0 * w * t * v;
            }
            (m, f)
        }
        [ax1, ax2] => integrate_2d(fd, ax1, ax2, xi),
        _ => unreachable!(),
    };
    let (tm, tf) = density_tails(fd, xi);
    mass += tm;
    first += tf;
    Ok(DensityIntegrals { cutoff: xi, mass, first_moment: first, tail_mass: tm, tail_first: tf })
}

fn transform_table(ax: &Axis, nodes: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(nodes.len(), ax.count(), |q, a| ax.ft(a, nodes[q]))
}

fn integrate_2d(fd: &FourierDensity, ax1: &Axis, ax2: &Axis, xi: f64) -> (f64, f64) {
    let r1 = density_rule(ax1, xi);
    let half = density_rule(ax2, xi);
    // second axis over [−Ξ, Ξ]
    let nodes2: Vec<f64> = half.nodes.iter().map(|t| -t).chain(half.nodes.iter().copied()).collect();
    let weights2: Vec<f64> = half.weights.iter().chain(half.weights.iter()).copied().collect();
    let phi1 = transform_table(ax1, &r1.nodes);
    let phi2t = transform_table(ax2, &nodes2).transpose();
    let n2 = ax2.count();
    let left: Vec<DMatrix<Complex64>> = fd.source.coefficients[..fd.k]
        .iter()
        .map(|c| {
            let cm = DMatrix::from_fn(ax1.count(), n2, |a1, a2| Complex64::new(c[a1 * n2 + a2], 0.0));
            &phi1 * cm
        })
        .collect();
    const BLOCK: usize = 256;
    let blocks: Vec<(usize, usize)> = (0..nodes2.len()).step_by(BLOCK).map(|lo| (lo, (lo + BLOCK).min(nodes2.len()))).collect();
    let parts: Vec<(f64, f64)> = blocks
        .par_iter()
        .map(|&(lo, hi)| {
            let cols = phi2t.columns(lo, hi - lo);
            let mut dens = DMatrix::<f64>::zeros(r1.len(), hi - lo);
            for a in &left {
                let u = a * cols;
                dens.zip_apply(&u, |d, z| *d += z.norm_sqr());
            }
            let (mut m, mut f) = (0.0, 0.0);
            for c in 0..hi - lo {
                let (t2, w2) = (nodes2[lo + c], weights2[lo + c]);
                for q in 0..r1.len() {
                    let w = 2.0 * r1.weights[q] * w2 * dens[(q, c)];
                    m += w;
                    f += w * r1.nodes[q].hypot(t2);
                }
            }
            (m, f)
        })
        .collect();
    parts.iter().fold((0.0, 0.0), |(m, f), p| (m + p.0, f + p.1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationCheck {
    pub integral: f64,
    pub k: usize,
    pub rel_err: f64,
    pub holds: bool,
}

pub const IDENTITY_TOL: f64 = 5e-3;

pub fn check_normalization(fd: &FourierDensity) -> Result<NormalizationCheck> {
    normalization_from(fd, &integrate_density(fd, None)?)
}

pub fn normalization_from(fd: &FourierDensity, ints: &DensityIntegrals) -> Result<NormalizationCheck> {
    let k = fd.k;
    let rel_err = if k == 0 { ints.mass.abs() } else { (ints.mass - k as f64).abs() / k as f64 };
    Ok(NormalizationCheck { integral: ints.mass, k, rel_err, holds: rel_err <= IDENTITY_TOL })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumIdentityCheck {
    pub integral: f64,
    pub sum_beta: f64,
    pub rel_err: f64,
    pub holds: bool,
}

pub fn check_sum_identity(fd: &FourierDensity) -> Result<SumIdentityCheck> {
    sum_identity_from(fd, &integrate_density(fd, None)?)
}

pub fn sum_identity_from(fd: &FourierDensity, ints: &DensityIntegrals) -> Result<SumIdentityCheck> {
    let sum_beta = fd.sum_beta();
    let rel_err = if fd.k == 0 { ints.first_moment.abs() } else { (ints.first_moment - sum_beta).abs() / sum_beta };
    Ok(SumIdentityCheck { integral: ints.first_moment, sum_beta, rel_err, holds: rel_err <= IDENTITY_TOL })
}

// ---------------------------------------------------------------------------
// Pointwise bounds

/// `count` points: the origin, then uniform random points in [−radius, radius]^d.
pub fn sample_points(d: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if count > 0 {
        out.push(vec![0.0; d]);
    }
    while out.len() < count {
        out.push((0..d).map(|_| rng.gen_range(-radius..=radius)).collect());
    }
    out
}

/// Radius containing most of the density: a few multiples of β_k.
pub fn natural_radius(fd: &FourierDensity) -> f64 {
    let top = fd.source.eigenvalues.get(fd.k.max(1) - 1).copied().unwrap_or(1.0);
    4.0 * top.max(fd.source.eigenvalues[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselCheck {
    pub max_f: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn check_bessel_bound(fd: &FourierDensity, dom: &Domain, grid: &[Vec<f64>]) -> BesselCheck {
    let bound = dom.volume() * (2.0 * PI).powi(-(dom.dim() as i32));
    let max_f = grid.par_iter().map(|x| fd.eval(x)).reduce(|| 0.0, f64::max);
    BesselCheck { max_f, bound, holds: max_f <= bound * (1.0 + 1e-6) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientCheck {
    pub max_grad: f64,
    pub m: f64,
    pub holds: bool,
    /// Worst relative disagreement of the analytic gradient with central differences.
    pub fd_deviation: f64,
    pub fd_agrees: bool,
}

pub const FD_STEP: f64 = 1e-6;
pub const FD_TOL: f64 = 1e-5;

/// Largest |∇F − ∇_h F| / max(|∇F|, 10⁻³·m) over `points`.
pub fn gradient_fd_deviation(fd: &FourierDensity, points: &[Vec<f64>], m: f64) -> f64 {
    points
        .par_iter()
        .map(|x| {
            let g = fd.gradient(x);
            let mut diff = 0.0_f64;
            for i in 0..x.len() {
                let (mut p, mut q) = (x.clone(), x.clone());
                p[i] += FD_STEP;
                q[i] -= FD_STEP;
                let approx = (fd.eval(&p) - fd.eval(&q)) / (2.0 * FD_STEP);
                diff = diff.hypot(approx - g[i]);
            }
            let norm = g.iter().fold(0.0_f64, |s, v| s.hypot(*v));
            diff / norm.max(1e-3 * m)
        })
        .reduce(|| 0.0, f64::max)
}

pub fn check_gradient_bound(fd: &FourierDensity, dom: &Domain, grid: &[Vec<f64>]) -> GradientCheck {
    let m = slope_bound_m(DomainSpec::of(dom));
    let max_grad = grid
        .par_iter()
        .map(|x| fd.gradient(x).iter().fold(0.0_f64, |s, v| s.hypot(*v)))
        .reduce(|| 0.0, f64::max);
    let fd_deviation = gradient_fd_deviation(fd, grid, m);
    GradientCheck { max_grad, m, holds: max_grad <= m * (1.0 + 1e-6), fd_deviation, fd_agrees: fd_deviation <= FD_TOL }
}

// ---------------------------------------------------------------------------
// Rearrangement

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    /// Half-width of the sampled cube; only points with |ξ| ≤ cutoff are kept.
    pub cutoff: f64,
    pub per_axis: usize,
    pub radii: usize,
}

impl Sampling {
    pub fn default_for(fd: &FourierDensity) -> Self {
        let top = fd.source.eigenvalues.get(fd.k.max(1) - 1).copied().unwrap_or(1.0);
        match fd.dim() {
            1 => Sampling { cutoff: 40.0 * top, per_axis: 16385, radii: 4096 },
            _ => Sampling { cutoff: 24.0 * top, per_axis: 513, radii: 1024 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangedProfile {
    pub d: usize,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub m_bound: f64,
    pub cutoff: f64,
    /// Σ F·cell volume over the sampled ball.
    pub sampled_mass: f64,
    /// Largest sample on the cutoff sphere shell, relative to max F.
    pub boundary_ratio: f64,
    /// Lattice spacing of the samples; 0 when exact.
    #[serde(default)]
    pub sample_step: f64,
}

impl RearrangedProfile {
    pub fn phi0(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

pub const BOUNDARY_RATIO_MAX: f64 = 1e-3;

/// Rearranges samples of `f` taken on a uniform grid of [−cutoff, cutoff]^d.
pub fn rearrange_fn<F>(f: F, d: usize, sampling: Sampling, m_bound: f64) -> Result<RearrangedProfile>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if sampling.per_axis < 64 {
        return Err(Error::InvalidArgument(format!("need at least 64 samples per axis, got {}", sampling.per_axis)));
    }
    if !(1..=3).contains(&d) {
        return Err(Error::DimensionUnsupported { operation: "rearrange", dim: d });
    }
    if sampling.radii < 2 || !(sampling.cutoff > 0.0) {
        return Err(Error::InvalidArgument("rearrangement needs a positive cutoff and ≥ 2 radii".into()));
    }
    let n = sampling.per_axis;
    let r = sampling.cutoff;
    let step = 2.0 * r / (n - 1) as f64;
    let cell = step.powi(d as i32);
    let coord = |i: usize| -r + i as f64 * step;
    let total = n.pow(d as u32);
    let shell = r - 2.0 * step;
    let samples: Vec<(f64, f64)> = (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut x = [0.0; 3];
            for slot in x.iter_mut().take(d) {
                *slot = coord(idx % n);
                idx /= n;
            }
            let rad = x[..d].iter().fold(0.0_f64, |s, v| s.hypot(*v));
            (rad <= r).then(|| (f(&x[..d]), rad))
        })
        .collect();
    let max_f = samples.iter().fold(0.0_f64, |m, s| m.max(s.0));
    let edge = samples.iter().filter(|s| s.1 >= shell).fold(0.0_f64, |m, s| m.max(s.0));
    let boundary_ratio = if max_f > 0.0 { edge / max_f } else { 0.0 };
    if boundary_ratio > BOUNDARY_RATIO_MAX {
        return Err(Error::CutoffTooSmall { ratio: boundary_ratio });
    }
    let mut values: Vec<f64> = samples.into_iter().map(|s| s.0).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let sampled_mass = values.iter().sum::<f64>() * cell;
    let mut profile = profile_from_sorted(&values, cell, d, r, sampling.radii, m_bound, sampled_mass, boundary_ratio);
    profile.sample_step = step;
    Ok(profile)
}

/// φ on a uniform radial grid, read off the sorted samples at fractional rank ω_d x^d / cell − ½.
#[allow(clippy::too_many_arguments)]
fn profile_from_sorted(
    sorted: &[f64],
    cell: f64,
    d: usize,
    cutoff: f64,
    n_radii: usize,
    m_bound: f64,
    sampled_mass: f64,
    boundary_ratio: f64,
) -> RearrangedProfile {
    let w = omega_d(d);
    let x_max = (sorted.len() as f64 * cell / w).powf(1.0 / d as f64);
    let radii: Vec<f64> = (0..n_radii).map(|i| x_max * i as f64 / (n_radii - 1) as f64).collect();
    let at_rank = |rank: f64| -> f64 {
        let rank = rank.max(0.0);
        let i = rank.floor() as usize;
        if i + 1 >= sorted.len() {
            return *sorted.last().unwrap_or(&0.0);
        }
        let frac = rank - i as f64;
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    };
    let values: Vec<f64> = radii.iter().map(|&x| at_rank(w * x.powi(d as i32) / cell - 0.5)).collect();
    RearrangedProfile { d, radii, values, m_bound, cutoff, sampled_mass, boundary_ratio, sample_step: 0.0 }
}

pub fn rearrange(fd: &FourierDensity, dom: &Domain, sampling: Sampling) -> Result<RearrangedProfile> {
    let m = slope_bound_m(DomainSpec::of(dom));
    rearrange_fn(|x| fd.eval(x), fd.dim(), sampling, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeCheck {
    pub max_slope: f64,
    pub m: f64,
    pub holds: bool,
}

pub const SLOPE_SLACK: f64 = 0.05;

pub fn check_slope_condition(profile: &RearrangedProfile) -> Result<SlopeCheck> {
    if profile.radii.len() < 2 {
        return Err(Error::InvalidArgument("profile needs at least two radii".into()));
    }
    // In d ≥ 2 the lattice-point count in a ball fluctuates on the scale of one
    // step, so differences are taken over at least four steps.
    let dx = profile.radii[1] - profile.radii[0];
    let lag = if profile.d >= 2 && profile.sample_step > 0.0 {
        ((4.0 * profile.sample_step / dx).ceil() as usize).clamp(1, profile.radii.len() - 1)
    } else {
        1
    };
    let n = profile.radii.len();
    let max_slope = (0..n - lag)
        .map(|i| -(profile.values[i + lag] - profile.values[i]) / (profile.radii[i + lag] - profile.radii[i]))
        .fold(0.0_f64, f64::max);
    Ok(SlopeCheck { max_slope, m: profile.m_bound, holds: max_slope <= profile.m_bound * (1.0 + SLOPE_SLACK) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentsBridge {
    pub k_recovered: f64,
    pub sum_recovered: f64,
}

/// d ω_d ∫x^{d−1}φ and d ω_d ∫x^d φ by the trapezoid rule on the profile grid.
pub fn moments_bridge(profile: &RearrangedProfile, d: usize) -> MomentsBridge {
    let c = d as f64 * omega_d(d);
    let trap = |p: i32| -> f64 {
        profile
            .radii
            .windows(2)
            .zip(profile.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (x[0].powi(p) * v[0] + x[1].powi(p) * v[1]))
            .sum()
    };
    MomentsBridge { k_recovered: c * trap(d as i32 - 1), sum_recovered: c * trap(d as i32) }
}

// ---------------------------------------------------------------------------
// The function h and the chain through φ(0)

/// h(t) = (d/(d+1)) ω^{−1/d} k^{1+1/d} t^{−1/d} + (C d/(m²(d²−1))) ω^{1/d} k^{1−1/d} t^{2+1/d}.
pub fn h_function(t: f64, d: usize, k: usize, c: f64, m: f64) -> f64 {
    let (df, kf) = (d as f64, k as f64);
    let w = omega_d(d);
    df / (df + 1.0) * w.powf(-1.0 / df) * kf.powf(1.0 + 1.0 / df) * t.powf(-1.0 / df)
        + c * df / (m * m * (df * df - 1.0)) * w.powf(1.0 / df) * kf.powf(1.0 - 1.0 / df) * t.powf(2.0 + 1.0 / df)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HMonotonicity {
    pub c: f64,
    pub m: f64,
    pub t_max: f64,
    /// Point where h′ vanishes; h decreases on (0, turning_point].
    pub turning_point: f64,
    pub points: usize,
    pub holds: bool,
}

pub fn check_h_monotone(spec: DomainSpec, k: usize) -> Result<HMonotonicity> {
    let c = improved_constant_c(spec, k)?;
    let m = slope_bound_m(spec);
    let (d, kf) = (spec.d as f64, k as f64);
    let w = omega_d(spec.d);
    let t_max = (2.0 * PI).powf(-d) * spec.volume;
    const POINTS: usize = 100;
    let grid: Vec<f64> = (1..=POINTS).map(|i| t_max * i as f64 / POINTS as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&t| h_function(t, spec.d, k, c, m)).collect();
    let holds = vals.windows(2).all(|v| v[1] <= v[0]);
    let turning_point = (m * m * (d - 1.0) * kf.powf(2.0 / d) / (c * (2.0 * d + 1.0) * w.powf(2.0 / d))).powf(d / (2.0 * d + 2.0));
    Ok(HMonotonicity { c, m, t_max, turning_point, points: POINTS, holds })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub sum_beta: f64,
    pub phi0: f64,
    pub first_term: f64,
    pub second_term: f64,
    /// Σβ ≥ first term − 1%.
    pub first_holds: bool,
    /// Σβ ≥ first + second term (reported only).
    pub full_holds: bool,
}

pub fn check_chain(sum_beta: f64, phi0: f64, d: usize, k: usize, m: f64) -> ChainCheck {
    let (df, kf) = (d as f64, k as f64);
    let w = omega_d(d);
    let first_term = df / (df + 1.0) * w.powf(-1.0 / df) * phi0.powf(-1.0 / df) * kf.powf(1.0 + 1.0 / df);
    let second_term = df / (6.0 * m * m * (df * df - 1.0)) * w.powf(1.0 / df) * phi0.powf(2.0 + 1.0 / df) * kf.powf(1.0 - 1.0 / df);
    ChainCheck {
        sum_beta,
        phi0,
        first_term,
        second_term,
        first_holds: sum_beta >= first_term * (1.0 - 0.01),
        full_holds: sum_beta >= first_term + second_term,
    }
}
