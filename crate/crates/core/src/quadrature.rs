//! Adaptive Gauss–Kronrod (10/21) quadrature.
//!
//! Two entry points: [`integrate`] for scalar integrands with global
//! bisection, and [`adaptive_panels`] which refines a shared panel partition
//! against a vector of probe integrands so that many related integrals can
//! later be evaluated on the same nodes (see [`PanelRule`]).

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kronrod abscissae on [-1, 1] (non-negative half, descending).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_734_304,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Nodes per panel of the Kronrod rule.
pub const NODES_PER_PANEL: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Maps the 21 Kronrod nodes of [-1, 1] onto [a, b].
fn kronrod_nodes(a: f64, b: f64) -> [f64; NODES_PER_PANEL] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [0.0; NODES_PER_PANEL];
    for i in 0..10 {
        out[2 * i] = c - h * XGK[i];
        out[2 * i + 1] = c + h * XGK[i];
    }
    out[20] = c;
    out
}

fn kronrod_weight(i: usize) -> f64 {
    if i == 20 {
        WGK[10]
    } else {
        WGK[i / 2]
    }
}

fn gauss_weight(i: usize) -> f64 {
    let k = i / 2;
    if i < 20 && k % 2 == 1 {
        WG[k / 2]
    } else {
        0.0
    }
}

/// QUADPACK-style error scaling of |K - G|.
fn scaled_error(kg_diff: f64, resabs: f64) -> f64 {
    let mut err = kg_diff.abs();
    if resabs > 0.0 && err > 0.0 {
        err = resabs * (200.0 * err / resabs).powf(1.5).min(1.0);
    }
    err.max(50.0 * f64::EPSILON * resabs)
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (Estimate, f64) {
    let h = 0.5 * (b - a);
    let (mut k, mut g, mut abs) = (0.0, 0.0, 0.0);
    for (i, x) in kronrod_nodes(a, b).iter().enumerate() {
        let v = f(*x);
        k += kronrod_weight(i) * v;
        g += gauss_weight(i) * v;
        abs += kronrod_weight(i) * v.abs();
    }
    let resabs = abs * h.abs();
    (
        Estimate {
            value: k * h,
            error: scaled_error((k - g) * h, resabs),
        },
        resabs,
    )
}

struct Segment {
    a: f64,
    b: f64,
    est: Estimate,
    resabs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Adaptive integration of `f` over [a, b] to max(rel_tol·|I|, abs_tol).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Estimate> {
    integrate_with_breaks(f, &[a, b], rel_tol, abs_tol)
}

/// As [`integrate`], with the initial partition given by `breaks` (ascending).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Estimate> {
    const MAX_SEGMENTS: usize = 20_000;
    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (0.0, 0.0);
    for w in breaks.windows(2) {
        let (est, resabs) = gk21(&f, w[0], w[1]);
        total += est.value;
        err += est.error;
        heap.push(Segment { a: w[0], b: w[1], est, resabs });
    }
    while err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureNonConvergence { error: err });
        }
        let worst = heap.pop().expect("non-empty partition");
        if worst.est.error <= 50.0 * f64::EPSILON * worst.resabs {
            // every segment sits at its roundoff floor
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNonConvergence { error: err });
        }
        let (l, la) = gk21(&f, worst.a, mid);
        let (r, ra) = gk21(&f, mid, worst.b);
        total += l.value + r.value - worst.est.value;
        err += l.error + r.error - worst.est.error;
        heap.push(Segment { a: worst.a, b: mid, est: l, resabs: la });
        heap.push(Segment { a: mid, b: worst.b, est: r, resabs: ra });
    }
    // re-sum to shed the drift from incremental updates
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.est.value, e + s.est.error));
    Ok(Estimate { value, error })
}

/// Shared Kronrod nodes and weights over a panel partition.
#[derive(Debug, Clone)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PanelRule {
    pub fn from_panels(panels: &[(f64, f64)]) -> Self {
        let mut nodes = Vec::with_capacity(panels.len() * NODES_PER_PANEL);
        let mut weights = Vec::with_capacity(panels.len() * NODES_PER_PANEL);
        for &(a, b) in panels {
            let h = 0.5 * (b - a);
            for (i, x) in kronrod_nodes(a, b).iter().enumerate() {
                nodes.push(*x);
                weights.push(kronrod_weight(i) * h);
            }
        }
        PanelRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Refines the partition `breaks` until every probe integral has an
/// estimated error below `tol` relative to the probe's ∫|f|.
///
/// `probe(t, out)` writes `out.len() == n_probes` integrand values at `t`.
pub fn adaptive_panels<F>(breaks: &[f64], n_probes: usize, tol: f64, probe: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64, &mut [f64]),
{
    const MAX_PANELS: usize = 400_000;
    let eval = |a: f64, b: f64, buf: &mut [f64]| -> (Vec<f64>, Vec<f64>) {
        let h = 0.5 * (b - a);
        let mut k = vec![0.0; n_probes];
        let mut g = vec![0.0; n_probes];
        let mut abs = vec![0.0; n_probes];
        for (i, x) in kronrod_nodes(a, b).iter().enumerate() {
            probe(*x, buf);
            let (wk, wg) = (kronrod_weight(i), gauss_weight(i));
            for p in 0..n_probes {
                k[p] += wk * buf[p];
                g[p] += wg * buf[p];
                abs[p] += wk * buf[p].abs();
            }
        }
        let errs = (0..n_probes)
            .map(|p| scaled_error((k[p] - g[p]) * h, abs[p] * h.abs()))
            .collect();
        let abss = abs.iter().map(|v| v * h.abs()).collect();
        (errs, abss)
    };

    let mut buf = vec![0.0; n_probes];
    let mut panels: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
    let mut stats: Vec<(Vec<f64>, Vec<f64>)> = panels.iter().map(|&(a, b)| eval(a, b, &mut buf)).collect();
    loop {
        let mut scale = vec![0.0; n_probes];
        let mut total = vec![0.0; n_probes];
        for (errs, abss) in &stats {
            for p in 0..n_probes {
                total[p] += errs[p];
                scale[p] += abss[p];
            }
        }
        let worst = (0..n_probes)
            .map(|p| if scale[p] > 0.0 { total[p] / scale[p] } else { 0.0 })
            .fold(0.0, f64::max);
        if worst <= tol {
            return Ok(panels);
        }
        // split every panel carrying more than its share of the budget
        let share = tol / panels.len() as f64;
        let mut next_panels = Vec::with_capacity(panels.len() * 2);
        let mut next_stats = Vec::with_capacity(panels.len() * 2);
        for (&(a, b), st) in panels.iter().zip(stats) {
            let heavy = (0..n_probes).any(|p| scale[p] > 0.0 && st.0[p] / scale[p] > share);
            if heavy {
                let m = 0.5 * (a + b);
                next_stats.push(eval(a, m, &mut buf));
                next_stats.push(eval(m, b, &mut buf));
                next_panels.push((a, m));
                next_panels.push((m, b));
            } else {
                next_panels.push((a, b));
                next_stats.push(st);
            }
        }
        if next_panels.len() == panels.len() || next_panels.len() > MAX_PANELS {
            return Err(Error::QuadratureNonConvergence { error: worst });
        }
        panels = next_panels;
        stats = next_stats;
    }
}

/// Breakpoints 0, first·2^{-levels}, ..., first/2, first: geometric grading
/// toward the origin.
pub fn graded_breaks(first: f64, levels: u32) -> Vec<f64> {
    let mut out = vec![0.0];
    for j in (0..levels).rev() {
        out.push(first * 0.5_f64.powi(j as i32 + 1));
    }
    out.push(first);
    out
}
