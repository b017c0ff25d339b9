//! One-dimensional trial families and their Fourier transforms.
//!
//! Transforms are taken with respect to the axis midpoint; the phase
//! e^{-iξ·center} is common to every function on an axis and cancels in all
//! products, so the form matrix never needs it.
//!
//! Entries of the form matrix are integrals of "pair functions"
//! R_ab(t) = Re(FT_a(t) conj FT_b(t)), which are even in t.

use crate::special::{cos_power_tail, sinc, sinc_prime};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// √(2/L) sin(nπx/L), n = 1..N.
    Sine,
    /// Piecewise-linear hats on a uniform grid of M cells (M − 1 interior nodes).
    Hat,
}

impl std::str::FromStr for Family {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "sine" => Ok(Family::Sine),
            "hat" => Ok(Family::Hat),
            other => Err(crate::Error::Parse { token: other.to_string(), reason: "expected `sine` or `hat`".into() }),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Sine => "sine",
            Family::Hat => "hat",
        })
    }
}

/// Tail data of a pair function beyond the cutoff Ξ.
#[derive(Debug, Clone, Copy, Default)]
pub struct PairTail {
    /// ∫_Ξ^∞ t R(t) dt
    pub first: f64,
    /// ∫_Ξ^∞ R(t) dt
    pub zeroth: f64,
    /// Bound on the error of `first` and `zeroth` (leading asymptotics only).
    pub residual: f64,
    /// E with |R(t)| ≤ E / t⁴ for t ≥ Ξ.
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub family: Family,
    /// N for sine, M (cells) for hat.
    pub resolution: usize,
    pub length: f64,
    /// Lower end of the axis in physical coordinates.
    pub start: f64,
}

impl Axis {
    pub fn new(family: Family, resolution: usize, length: f64, start: f64) -> Self {
        Axis { family, resolution, length, start }
    }

    /// Number of one-dimensional trial functions.
    pub fn count(&self) -> usize {
        match self.family {
            Family::Sine => self.resolution,
            Family::Hat => self.resolution - 1,
        }
    }

    pub fn center(&self) -> f64 {
        self.start + 0.5 * self.length
    }

    pub fn cell(&self) -> f64 {
        self.length / self.resolution as f64
    }

    /// Largest characteristic frequency of the family: Nπ/L or π/h.
    pub fn max_frequency(&self) -> f64 {
        match self.family {
            Family::Sine => self.resolution as f64 * PI / self.length,
            Family::Hat => PI / self.cell(),
        }
    }

    /// Highest oscillation rate in t of any pair function.
    pub fn oscillation_rate(&self) -> f64 {
        self.length
    }

    fn sine_norm(&self) -> f64 {
        (2.0 * PI).powf(-0.5) * (2.0 / self.length).sqrt()
    }

    /// Node of hat `a` relative to the axis center.
    fn hat_node(&self, a: usize) -> f64 {
        -0.5 * self.length + (a + 1) as f64 * self.cell()
    }

    /// Centered transform of trial function `a` (0-based) at frequency t.
    pub fn ft(&self, a: usize, t: f64) -> Complex64 {
        match self.family {
            Family::Sine => {
                let n = a + 1;
                let g = self.sine_profile(n, t);
                if n % 2 == 1 {
                    Complex64::new(g, 0.0)
                } else {
                    Complex64::new(0.0, -g)
                }
            }
            Family::Hat => {
                let h = self.cell();
                let s = sinc(0.5 * t * h);
                let amp = (2.0 * PI).powf(-0.5) * h * s * s;
                Complex64::from_polar(amp, -t * self.hat_node(a))
            }
        }
    }

    /// d/dt of [`Axis::ft`].
    pub fn ft_dt(&self, a: usize, t: f64) -> Complex64 {
        match self.family {
            Family::Sine => {
                let n = a + 1;
                let g = self.sine_profile_dt(n, t);
                if n % 2 == 1 {
                    Complex64::new(g, 0.0)
                } else {
                    Complex64::new(0.0, -g)
                }
            }
            Family::Hat => {
                let h = self.cell();
                let u = 0.5 * t * h;
                let (s, ds) = (sinc(u), sinc_prime(u));
                let norm = (2.0 * PI).powf(-0.5) * h;
                let y = self.hat_node(a);
                let phase = Complex64::from_polar(1.0, -t * y);
                phase * Complex64::new(norm * h * s * ds, -norm * s * s * y)
            }
        }
    }

    /// Real profile g_n with FT_n = g_n (n odd) or −i g_n (n even).
    fn sine_profile(&self, n: usize, t: f64) -> f64 {
        let c = 0.5 * self.length;
        let theta = n as f64 * PI / 2.0;
        let (um, up) = (theta - t * c, theta + t * c);
        let sign = sine_sign(n);
        let body = if n % 2 == 1 { sinc(um) + sinc(up) } else { sinc(um) - sinc(up) };
        self.sine_norm() * sign * c * body
    }

    fn sine_profile_dt(&self, n: usize, t: f64) -> f64 {
        let c = 0.5 * self.length;
        let theta = n as f64 * PI / 2.0;
        let (um, up) = (theta - t * c, theta + t * c);
        let sign = sine_sign(n);
        let body = if n % 2 == 1 {
            -sinc_prime(um) + sinc_prime(up)
        } else {
            -sinc_prime(um) - sinc_prime(up)
        };
        self.sine_norm() * sign * c * c * body
    }

    /// All sine profiles g_1..g_N at t, using sin(nπ/2 ± x) from one sin/cos pair.
    pub fn sine_profiles(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(self.family, Family::Sine);
        let c = 0.5 * self.length;
        let x = t * c;
        let (sx, cx) = x.sin_cos();
        let norm = self.sine_norm() * c;
        for (i, g) in out.iter_mut().enumerate() {
            let n = i + 1;
            let theta = n as f64 * PI / 2.0;
            let (um, up) = (theta - x, theta + x);
            // sin(nπ/2 − x), sin(nπ/2 + x) by n mod 4
            let (s_m, s_p) = match n % 4 {
                0 => (-sx, sx),
                1 => (cx, cx),
                2 => (sx, -sx),
                _ => (-cx, -cx),
            };
            let sc = |s: f64, u: f64| if u.abs() < 1e-4 { sinc(u) } else { s / u };
            let body = if n % 2 == 1 { sc(s_m, um) + sc(s_p, up) } else { sc(s_m, um) - sc(s_p, up) };
            *g = norm * sine_sign(n) * body;
        }
    }

    /// Number of distinct pair functions.
    pub fn n_pairs(&self) -> usize {
        match self.family {
            Family::Sine => {
                let n = self.resolution;
                let (odd, even) = ((n + 1) / 2, n / 2);
                odd * (odd + 1) / 2 + even * (even + 1) / 2
            }
            Family::Hat => self.resolution - 1,
        }
    }

    /// Pair index of (a, b), or `None` when Re(FT_a conj FT_b) ≡ 0.
    pub fn pair_index(&self, a: usize, b: usize) -> Option<usize> {
        match self.family {
            Family::Sine => {
                if (a + b) % 2 == 1 {
                    return None;
                }
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                // same-parity class: positions lo/2, hi/2 within the class
                let (i, j) = (lo / 2, hi / 2);
                let base = if lo % 2 == 0 { 0 } else { let odd = (self.resolution + 1) / 2; odd * (odd + 1) / 2 };
                Some(base + j * (j + 1) / 2 + i)
            }
            Family::Hat => Some(a.abs_diff(b)),
        }
    }

    /// Representative (a, b) for every pair index, in index order.
    pub fn pair_members(&self) -> Vec<(usize, usize)> {
        let mut out = vec![(0, 0); self.n_pairs()];
        match self.family {
            Family::Sine => {
                for b in 0..self.resolution {
                    for a in (b % 2..=b).step_by(2) {
                        out[self.pair_index(a, b).unwrap()] = (a, b);
                    }
                }
            }
            Family::Hat => {
                for (o, slot) in out.iter_mut().enumerate() {
                    *slot = (0, o);
                }
            }
        }
        out
    }

    /// Writes R_p(t) for every pair p into `out`.
    pub fn pair_values(&self, t: f64, out: &mut [f64], scratch: &mut Vec<f64>) {
        match self.family {
            Family::Sine => {
                scratch.resize(self.resolution, 0.0);
                self.sine_profiles(t, scratch);
                for b in 0..self.resolution {
                    for a in (b % 2..=b).step_by(2) {
                        out[self.pair_index(a, b).unwrap()] = scratch[a] * scratch[b];
                    }
                }
            }
            Family::Hat => {
                let h = self.cell();
                let s = sinc(0.5 * t * h);
                let amp = h * h / (2.0 * PI) * s * s * s * s;
                // cos(o·ht) by the Chebyshev recurrence
                let c1 = (t * h).cos();
                let (mut prev, mut cur) = (c1, 1.0);
                for (o, slot) in out.iter_mut().enumerate() {
                    *slot = amp * cur;
                    let next = if o == 0 { c1 } else { 2.0 * c1 * cur - prev };
                    prev = cur;
                    cur = next;
                }
            }
        }
    }

    /// Analytic tails of all pair functions beyond `xi`.
    pub fn pair_tails(&self, xi: f64) -> Vec<PairTail> {
        match self.family {
            Family::Sine => {
                let l = self.length;
                let (i3_0, i3_l) = (cos_power_tail(0.0, xi, 3.0), cos_power_tail(l, xi, 3.0));
                let (i4_0, i4_l) = (cos_power_tail(0.0, xi, 4.0), cos_power_tail(l, xi, 4.0));
                self.pair_members()
                    .into_iter()
                    .map(|(a, b)| {
                        let (ka, kb) = ((a + 1) as f64 * PI / l, (b + 1) as f64 * PI / l);
                        let s = if a % 2 == 0 { -1.0 } else { 1.0 }; // (−1)^n with n = a + 1
                        let amp = 2.0 * ka * kb / (PI * l);
                        let delta = 1.0 / ((1.0 - (ka / xi).powi(2)) * (1.0 - (kb / xi).powi(2))) - 1.0;
                        PairTail {
                            first: amp * (i3_0 - s * i3_l),
                            zeroth: amp * (i4_0 - s * i4_l),
                            residual: amp * 2.0 * delta * i3_0,
                            envelope: amp * 2.0 * (1.0 + delta),
                        }
                    })
                    .collect()
            }
            Family::Hat => {
                let h = self.cell();
                let amp = 1.0 / (PI * h * h);
                let terms = [(0i64, 3.0), (1, -2.0), (-1, -2.0), (2, 0.5), (-2, 0.5)];
                let mut cache = std::collections::HashMap::new();
                let mut tail = |j: i64, p: u8| -> f64 {
                    *cache
                        .entry((j.unsigned_abs(), p))
                        .or_insert_with(|| cos_power_tail(j.unsigned_abs() as f64 * h, xi, p as f64))
                };
                (0..self.n_pairs() as i64)
                    .map(|o| {
                        let mut first = 0.0;
                        let mut zeroth = 0.0;
                        for &(j, c) in &terms {
                            first += c * tail(o + j, 3);
                            zeroth += c * tail(o + j, 4);
                        }
                        PairTail { first: amp * first, zeroth: amp * zeroth, residual: 0.0, envelope: amp * 8.0 }
                    })
                    .collect()
            }
        }
    }

    /// Exact L² inner product of trial functions a and b.
    pub fn mass(&self, a: usize, b: usize) -> f64 {
        match self.family {
            Family::Sine => {
                if a == b {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Hat => match a.abs_diff(b) {
                0 => 2.0 * self.cell() / 3.0,
                1 => self.cell() / 6.0,
                _ => 0.0,
            },
        }
    }

    /// Trial function `a` at physical coordinate x (zero outside the axis).
    pub fn eval(&self, a: usize, x: f64) -> f64 {
        let u = x - self.start;
        if !(0.0..=self.length).contains(&u) {
            return 0.0;
        }
        match self.family {
            Family::Sine => (2.0 / self.length).sqrt() * ((a + 1) as f64 * PI * u / self.length).sin(),
            Family::Hat => {
                let h = self.cell();
                (1.0 - ((u - (a + 1) as f64 * h) / h).abs()).max(0.0)
            }
        }
    }
}

fn sine_sign(n: usize) -> f64 {
    // sin(nπ/2) for odd n, cos(nπ/2) for even n
    if (n / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
