//! Bounded domains and the geometric quantities every bound consumes.

use crate::bounds::omega_d;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Interval { length: f64 },
    Box { sides: Vec<f64> },
    Ball { dim: usize, radius: f64 },
}

/// A bounded domain in ℝ^d. The anchor is the lower corner for intervals and
/// boxes and the center for balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    shape: Shape,
    anchor: Vec<f64>,
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("{what} must be positive and finite, got {v}")))
    }
}

impl Domain {
    pub fn interval(length: f64) -> Result<Self> {
        check_positive("interval length", length)?;
        Ok(Domain { shape: Shape::Interval { length }, anchor: vec![0.0] })
    }

    pub fn cuboid(sides: &[f64]) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::InvalidDomain("box needs at least one side".into()));
        }
        for &s in sides {
            check_positive("box side", s)?;
        }
        Ok(Domain { shape: Shape::Box { sides: sides.to_vec() }, anchor: vec![0.0; sides.len()] })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDomain("ball dimension must be at least 1".into()));
        }
        check_positive("ball radius", radius)?;
        Ok(Domain { shape: Shape::Ball { dim, radius }, anchor: vec![0.0; dim] })
    }

    pub fn with_anchor(mut self, anchor: &[f64]) -> Result<Self> {
        if anchor.len() != self.dim() {
            return Err(Error::InvalidDomain(format!(
                "anchor has {} coordinates, domain has dimension {}",
                anchor.len(),
                self.dim()
            )));
        }
        self.anchor = anchor.to_vec();
        Ok(self)
    }

    /// Scales every length (and the anchor) by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        check_positive("scale factor", s)?;
        let shape = match &self.shape {
            Shape::Interval { length } => Shape::Interval { length: length * s },
            Shape::Box { sides } => Shape::Box { sides: sides.iter().map(|l| l * s).collect() },
            Shape::Ball { dim, radius } => Shape::Ball { dim: *dim, radius: radius * s },
        };
        Ok(Domain { shape, anchor: self.anchor.iter().map(|a| a * s).collect() })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Interval { .. } => 1,
            Shape::Box { sides } => sides.len(),
            Shape::Ball { dim, .. } => *dim,
        }
    }

    /// Per-axis side lengths for intervals and boxes; `None` for balls.
    pub fn sides(&self) -> Option<Vec<f64>> {
        match &self.shape {
            Shape::Interval { length } => Some(vec![*length]),
            Shape::Box { sides } => Some(sides.clone()),
            Shape::Ball { .. } => None,
        }
    }

    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Interval { length } => *length,
            Shape::Box { sides } => sides.iter().product(),
            Shape::Ball { dim, radius } => omega_d(*dim) * radius.powi(*dim as i32),
        }
    }

    /// Center of mass, the minimizer of u ↦ ∫_Ω |x − u|² dx.
    pub fn centroid(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Interval { length } => vec![self.anchor[0] + 0.5 * length],
            Shape::Box { sides } => self.anchor.iter().zip(sides).map(|(a, l)| a + 0.5 * l).collect(),
            Shape::Ball { .. } => self.anchor.clone(),
        }
    }

    /// I(Ω) = ∫_Ω |x − centroid|² dx in closed form.
    pub fn moment_of_inertia(&self) -> f64 {
        match &self.shape {
            Shape::Interval { length } => length.powi(3) / 12.0,
            Shape::Box { sides } => {
                let v: f64 = sides.iter().product();
                v * sides.iter().map(|l| l * l / 12.0).sum::<f64>()
            }
            Shape::Ball { dim, radius } => {
                let d = *dim as f64;
                d * omega_d(*dim) * radius.powi(*dim as i32 + 2) / (d + 2.0)
            }
        }
    }

    /// Axis-aligned bounding box as (lower, upper) corners.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Interval { length } => (self.anchor.clone(), vec![self.anchor[0] + length]),
            Shape::Box { sides } => (
                self.anchor.clone(),
                self.anchor.iter().zip(sides).map(|(a, l)| a + l).collect(),
            ),
            Shape::Ball { radius, .. } => (
                self.anchor.iter().map(|c| c - radius).collect(),
                self.anchor.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.shape {
            Shape::Ball { radius, .. } => {
                let r2: f64 = x.iter().zip(&self.anchor).map(|(a, c)| (a - c) * (a - c)).sum();
                r2 <= radius * radius
            }
            _ => {
                let (lo, hi) = self.bounding_box();
                x.iter().zip(lo.iter().zip(&hi)).all(|(v, (l, h))| *v >= *l && *v <= *h)
            }
        }
    }
}

/// Monte Carlo estimate of ∫_Ω |x − centroid|² dx by rejection sampling in the
/// bounding box. Returns (estimate, standard error).
pub fn monte_carlo_inertia(dom: &Domain, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let (lo, hi) = dom.bounding_box();
    let box_volume: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    let center = dom.centroid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; dom.dim()];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        for (xi, (l, h)) in x.iter_mut().zip(lo.iter().zip(&hi)) {
            *xi = rng.gen_range(*l..*h);
        }
        // integrand is |x − c|² inside Ω and 0 outside
        let v = if dom.contains(&x) {
            x.iter().zip(&center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>()
        } else {
            0.0
        };
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok((box_volume * mean, box_volume * (var / n).sqrt()))
}

impl FromStr for Domain {
    type Err = Error;

    /// `interval:<L>` | `box:<L1>x<L2>[x<L3>...]` | `ball:<d>,<R>`
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| Error::Parse {
            token: s.to_string(),
            reason: "expected `<kind>:<parameters>`".into(),
        })?;
        let number = |tok: &str| -> Result<f64> {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                token: tok.to_string(),
                reason: "not a decimal number".into(),
            })?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parse { token: tok.to_string(), reason: "must be positive".into() });
            }
            Ok(v)
        };
        match kind {
            "interval" => Domain::interval(number(rest)?),
            "box" => {
                let sides = rest.split('x').map(number).collect::<Result<Vec<_>>>()?;
                Domain::cuboid(&sides)
            }
            "ball" => {
                let (d, r) = rest.split_once(',').ok_or_else(|| Error::Parse {
                    token: rest.to_string(),
                    reason: "expected `<d>,<R>`".into(),
                })?;
                let dim: usize = d.parse().map_err(|_| Error::Parse {
                    token: d.to_string(),
                    reason: "dimension must be a positive integer".into(),
                })?;
                if dim == 0 {
                    return Err(Error::Parse { token: d.to_string(), reason: "dimension must be at least 1".into() });
                }
                Domain::ball(dim, number(r)?)
            }
            other => Err(Error::Parse {
                token: other.to_string(),
                reason: "unknown domain kind (expected interval, box or ball)".into(),
            }),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Interval { length } => write!(f, "interval:{length}"),
            Shape::Box { sides } => {
                let parts: Vec<String> = sides.iter().map(|s| s.to_string()).collect();
                write!(f, "box:{}", parts.join("x"))
            }
            Shape::Ball { dim, radius } => write!(f, "ball:{dim},{radius}"),
        }
    }
}
