use super::axis::{Axis, Family, PairTail};
use super::BasisDescriptor;
use crate::quadrature::{adaptive_panels, graded_breaks, PanelRule};
use crate::{Error, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Form matrix S, exact mass matrix and the bound on the neglected tail.
#[derive(Debug, Clone)]
pub struct FormMatrices {
    pub basis: BasisDescriptor,
    pub s: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    /// Largest tail residual relative to sqrt(S_aa S_bb).
    pub tail_bound: f64,
    /// Quadrature nodes per axis.
    pub nodes: Vec<usize>,
}

const CHUNK: usize = 2048;

/// Panels on [0, Ξ]: geometric grading at the origin, two oscillation periods
/// per panel elsewhere, then refined until every probe integral converges.
fn axis_rule(axis: &Axis, xi: f64, tol: f64, with_mass_probes: bool) -> Result<PanelRule> {
    let width = (4.0 * PI / axis.oscillation_rate()).min(xi / 8.0);
    let mut breaks = graded_breaks(width, 6);
    let steps = ((xi - width) / width).ceil() as usize;
    let step = (xi - width) / steps.max(1) as f64;
    for i in 1..=steps {
        breaks.push(if i == steps { xi } else { width + i as f64 * step });
    }

    let probes = match axis.family {
        Family::Sine if !with_mass_probes => axis.count(),
        _ => axis.n_pairs() * if with_mass_probes { 2 } else { 1 },
    };
    let np = axis.n_pairs();
    let panels = adaptive_panels(&breaks, probes, tol, |t, out| {
        let mut scratch = Vec::new();
        match (axis.family, with_mass_probes) {
            (Family::Sine, false) => {
                axis.sine_profiles(t, out);
                for g in out.iter_mut() {
                    *g = t * *g * *g;
                }
            }
            _ => {
                axis.pair_values(t, &mut out[..np], &mut scratch);
                if with_mass_probes {
                    let (head, rest) = out.split_at_mut(np);
                    for (r, h) in rest.iter_mut().zip(head.iter()) {
                        *r = t * h;
                    }
                } else {
                    for r in out.iter_mut() {
                        *r *= t;
                    }
                }
            }
        }
    })?;
    Ok(PanelRule::from_panels(&panels))
}

pub fn assemble_form_matrix(basis: &BasisDescriptor) -> Result<FormMatrices> {
    basis.validate()?;
    let axes = basis.axes();
    let xi = basis.xi_cutoff;
    let tol = (basis.quad_tol * 1e-3).max(1e-12);
    match axes.len() {
        1 => assemble_1d(basis, &axes[0], xi, tol),
        2 => assemble_2d(basis, &axes[0], &axes[1], xi, tol),
        d => Err(Error::DimensionUnsupported { operation: "spectral assembly", dim: d }),
    }
}

fn mass_matrix(axes: &[Axis]) -> DMatrix<f64> {
    let counts: Vec<usize> = axes.iter().map(Axis::count).collect();
    let n: usize = counts.iter().product();
    let split = |mut i: usize| -> Vec<usize> {
        let mut out = vec![0; counts.len()];
        for (slot, c) in out.iter_mut().zip(&counts).rev() {
            *slot = i % c;
            i /= c;
        }
        out
    };
    DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (split(i), split(j));
        axes.iter().zip(a.iter().zip(&b)).map(|(ax, (&x, &y))| ax.mass(x, y)).product()
    })
}

fn symmetrize(s: &mut DMatrix<f64>) {
    let n = s.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (s[(i, j)] + s[(j, i)]);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
}

fn tail_ratio(s: &DMatrix<f64>, residual: impl Fn(usize, usize) -> f64) -> f64 {
    let n = s.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let scale = (s[(i, i)] * s[(j, j)]).abs().sqrt();
            if scale > 0.0 {
                worst = worst.max(residual(i, j) / scale);
            }
        }
    }
    worst
}

fn assemble_1d(basis: &BasisDescriptor, axis: &Axis, xi: f64, tol: f64) -> Result<FormMatrices> {
    let rule = axis_rule(axis, xi, tol, false)?;
    let tails = axis.pair_tails(xi);
    let n = axis.count();
    let mut s = DMatrix::zeros(n, n);
    match axis.family {
        Family::Sine => {
            // S = Σ_q 2 w_q t_q g(t_q) g(t_q)ᵀ, chunked over nodes
            let chunks: Vec<(usize, usize)> =
                (0..rule.len()).step_by(CHUNK).map(|lo| (lo, (lo + CHUNK).min(rule.len()))).collect();
            let parts: Vec<DMatrix<f64>> = chunks
                .par_iter()
                .map(|&(lo, hi)| {
                    let mut g = DMatrix::zeros(n, hi - lo);
                    let mut col = vec![0.0; n];
                    for q in lo..hi {
                        let t = rule.nodes[q];
                        axis.sine_profiles(t, &mut col);
                        let w = (2.0 * rule.weights[q] * t).sqrt();
                        for (a, v) in col.iter().enumerate() {
                            g[(a, q - lo)] = w * v;
                        }
                    }
                    &g * g.transpose()
                })
                .collect();
            for p in parts {
                s += p;
            }
            for a in 0..n {
                for b in 0..n {
                    s[(a, b)] = match axis.pair_index(a, b) {
                        Some(p) => s[(a, b)] + 2.0 * tails[p].first,
                        None => 0.0,
                    };
                }
            }
        }
        Family::Hat => {
            // Toeplitz: one integral per offset
            let np = axis.n_pairs();
            let chunks: Vec<(usize, usize)> =
                (0..rule.len()).step_by(CHUNK).map(|lo| (lo, (lo + CHUNK).min(rule.len()))).collect();
            let parts: Vec<Vec<f64>> = chunks
                .par_iter()
                .map(|&(lo, hi)| {
                    let mut acc = vec![0.0; np];
                    let mut vals = vec![0.0; np];
                    let mut scratch = Vec::new();
                    for q in lo..hi {
                        let t = rule.nodes[q];
                        axis.pair_values(t, &mut vals, &mut scratch);
                        let w = 2.0 * rule.weights[q] * t;
                        for (a, v) in acc.iter_mut().zip(&vals) {
                            *a += w * v;
                        }
                    }
                    acc
                })
                .collect();
            let mut offsets = vec![0.0; np];
            for part in parts {
                for (o, v) in offsets.iter_mut().zip(part) {
                    *o += v;
                }
            }
            for (o, tail) in offsets.iter_mut().zip(&tails) {
                *o += 2.0 * tail.first;
            }
            for a in 0..n {
                for b in 0..n {
                    s[(a, b)] = offsets[a.abs_diff(b)];
                }
            }
        }
    }
    symmetrize(&mut s);
    let tail_bound = tail_ratio(&s, |i, j| axis.pair_index(i, j).map_or(0.0, |p| 2.0 * tails[p].residual));
    check_tail(tail_bound, basis.quad_tol)?;
    Ok(FormMatrices { basis: basis.clone(), s, mass: mass_matrix(std::slice::from_ref(axis)), tail_bound, nodes: vec![rule.len()] })
}

fn check_tail(bound: f64, allowed: f64) -> Result<()> {
    if bound > allowed || !bound.is_finite() {
        return Err(Error::TailBoundExceeded { bound, allowed });
    }
    Ok(())
}

/// ∫|ξ|² |FT_a|² over ℝ for one axis (the H¹ seminorm squared).
fn gradient_energy(axis: &Axis, a: usize) -> f64 {
    match axis.family {
        Family::Sine => ((a + 1) as f64 * PI / axis.length).powi(2),
        Family::Hat => 2.0 / axis.cell(),
    }
}

fn pair_table(axis: &Axis, rule: &PanelRule) -> DMatrix<f64> {
    let np = axis.n_pairs();
    let mut table = DMatrix::zeros(np, rule.len());
    let mut vals = vec![0.0; np];
    let mut scratch = Vec::new();
    for (q, &t) in rule.nodes.iter().enumerate() {
        axis.pair_values(t, &mut vals, &mut scratch);
        table.column_mut(q).copy_from_slice(&vals);
    }
    table
}

fn assemble_2d(basis: &BasisDescriptor, ax1: &Axis, ax2: &Axis, xi: f64, tol: f64) -> Result<FormMatrices> {
    let r1 = axis_rule(ax1, xi, tol, true)?;
    let r2 = if ax2 == ax1 || (ax2.family == ax1.family && ax2.resolution == ax1.resolution && ax2.length == ax1.length) {
        r1.clone()
    } else {
        axis_rule(ax2, xi, tol, true)?
    };
    let (t1, t2) = (pair_table(ax1, &r1), pair_table(ax2, &r2));
    let (p1, p2) = (ax1.n_pairs(), ax2.n_pairs());

    // V = 4 · R1 · W · R2ᵀ with W[q, r] = w_q w_r sqrt(t_q² + t_r²), built by column blocks
    let blocks: Vec<(usize, usize)> = (0..r2.len()).step_by(CHUNK / 4).map(|lo| (lo, (lo + CHUNK / 4).min(r2.len()))).collect();
    let parts: Vec<DMatrix<f64>> = blocks
        .par_iter()
        .map(|&(lo, hi)| {
            let w = DMatrix::from_fn(r1.len(), hi - lo, |q, c| {
                let r = lo + c;
                let (tq, tr) = (r1.nodes[q], r2.nodes[r]);
                r1.weights[q] * r2.weights[r] * tq.hypot(tr)
            });
            let tw = &t1 * w;
            tw * t2.columns(lo, hi - lo).transpose()
        })
        .collect();
    let mut v = DMatrix::zeros(p1, p2);
    for part in parts {
        v += part;
    }
    v *= 4.0;

    let (tails1, tails2) = (ax1.pair_tails(xi), ax2.pair_tails(xi));
    let (mem1, mem2) = (ax1.pair_members(), ax2.pair_members());
    let mass1: Vec<f64> = mem1.iter().map(|&(a, b)| ax1.mass(a, b)).collect();
    let mass2: Vec<f64> = mem2.iter().map(|&(a, b)| ax2.mass(a, b)).collect();
    let residual = |tl1: &PairTail, tl2: &PairTail, m1: f64, m2: f64, a: (usize, usize), b: (usize, usize)| {
        let d1 = (gradient_energy(ax1, a.0) * gradient_energy(ax1, b.0)).sqrt();
        let d2 = (gradient_energy(ax2, a.1) * gradient_energy(ax2, b.1)).sqrt();
        4.0 * (0.5 * tl1.residual * m2.abs()
            + 0.5 * tl2.residual * m1.abs()
            + tl1.envelope / (8.0 * xi.powi(4)) * 0.5 * d2
            + tl2.envelope / (8.0 * xi.powi(4)) * 0.5 * d1
            + tl1.envelope * tl2.envelope / (3.0 * xi.powi(5)))
    };
    for i in 0..p1 {
        for j in 0..p2 {
            v[(i, j)] += 2.0 * (tails1[i].first * mass2[j] + tails2[j].first * mass1[i]);
        }
    }

    let (n1, n2) = (ax1.count(), ax2.count());
    let n = n1 * n2;
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        let (a1, a2) = (i / n2, i % n2);
        for j in 0..n {
            let (b1, b2) = (j / n2, j % n2);
            if let (Some(p), Some(q)) = (ax1.pair_index(a1, b1), ax2.pair_index(a2, b2)) {
                s[(i, j)] = v[(p, q)];
            }
        }
    }
    symmetrize(&mut s);
    let tail_bound = tail_ratio(&s, |i, j| {
        let (a1, a2, b1, b2) = (i / n2, i % n2, j / n2, j % n2);
        match (ax1.pair_index(a1, b1), ax2.pair_index(a2, b2)) {
            (Some(p), Some(q)) => residual(&tails1[p], &tails2[q], mass1[p], mass2[q], (a1, a2), (b1, b2)),
            _ => 0.0,
        }
    });
    check_tail(tail_bound, basis.quad_tol)?;
    Ok(FormMatrices {
        basis: basis.clone(),
        s,
        mass: mass_matrix(&[ax1.clone(), ax2.clone()]),
        tail_bound,
        nodes: vec![r1.len(), r2.len()],
    })
}
