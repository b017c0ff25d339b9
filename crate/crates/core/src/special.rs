//! Special functions shared by the bound evaluators and the Fourier-space
//! assembly.

use crate::quadrature;

/// Γ(x) for positive arguments (Lanczos approximation).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// d/dx sinc(x) = (x cos x - sin x)/x².
pub fn sinc_prime(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x * (-1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0)
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

/// ∫_a^∞ cos(ω t) t^{-p} dt for a > 0 and p > 1.
///
/// Uses the asymptotic integration-by-parts series once ω·a is large and
/// adaptive quadrature to bridge the gap otherwise.
pub fn cos_power_tail(omega: f64, a: f64, p: f64) -> f64 {
    debug_assert!(a > 0.0 && p > 1.0);
    let omega = omega.abs();
    if omega == 0.0 {
        return a.powf(1.0 - p) / (p - 1.0);
    }
    const SWITCH: f64 = 40.0;
    if omega * a >= SWITCH {
        return oscillatory_tail_series(omega, a, p);
    }
    let b = SWITCH / omega;
    let head = quadrature::integrate(|t| (omega * t).cos() * t.powf(-p), a, b, 1e-13, 1e-300)
        .map(|r| r.value)
        .unwrap_or(f64::NAN);
    head + oscillatory_tail_series(omega, b, p)
}

// Re ∫_a^∞ e^{iωt} t^{-p} dt = Re[(i/ω) e^{iωa} a^{-p} Σ_n (p)_n (-i/(ωa))^n]
fn oscillatory_tail_series(omega: f64, a: f64, p: f64) -> f64 {
    let x = omega * a;
    // term_n = (p)_n (-i/x)^n, accumulated as a complex number
    let (mut tr, mut ti) = (1.0_f64, 0.0_f64);
    let (mut sr, mut si) = (0.0_f64, 0.0_f64);
    let mut n = 0.0;
    loop {
        sr += tr;
        si += ti;
        // multiply by (p + n) * (-i / x)
        let f = (p + n) / x;
        let (nr, ni) = (ti * f, -tr * f);
        if nr.hypot(ni) < 1e-17 * sr.hypot(si) || n > x {
            break;
        }
        tr = nr;
        ti = ni;
        n += 1.0;
    }
    // (i/ω) e^{iωa} a^{-p} (sr + i si)
    let (c, s) = (x.cos(), x.sin());
    // real part of i·e^{ix}·(sr + i si)
    let ei = c * si + s * sr;
    -ei * a.powf(-p) / omega
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gamma_half_integers_match_sqrt_pi_recurrence() {
        let mut exact = PI.sqrt(); // Γ(1/2)
        for n in 0..14 {
            let x = 0.5 + n as f64;
            assert!((gamma(x) - exact).abs() <= 1e-13 * exact, "x = {x}");
            exact *= x;
        }
        let mut fact = 1.0;
        for n in 1..9 {
            assert!((gamma(n as f64) - fact).abs() <= 1e-13 * fact);
            fact *= n as f64;
        }
    }

    #[test]
    fn sinc_series_matches_closed_form_near_switch() {
        for &x in &[9.9e-5, 1.01e-4, 9.9e-4, 1.01e-3] {
            assert!((sinc(x) - x.sin() / x).abs() < 1e-15);
            let fd = (sinc(x + 1e-6) - sinc(x - 1e-6)) / 2e-6;
            assert!((sinc_prime(x) - fd).abs() < 1e-8);
        }
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinc_prime(0.0), 0.0);
    }

    #[test]
    fn cos_power_tail_against_brute_force() {
        for &(omega, a, p) in &[(0.0, 3.0, 3.0), (2.0, 25.0, 3.0), (0.7, 4.0, 3.0), (3.0, 50.0, 4.0), (0.1, 2.0, 4.0)] {
            let got = cos_power_tail(omega, a, p);
            // brute force: integrate to a large bound, then close with the
            // first-order remainder
            let b = 4000.0_f64;
            let head = quadrature::integrate(|t| (omega * t).cos() * t.powf(-p), a, b, 1e-14, 0.0)
                .unwrap()
                .value;
            let rest = if omega == 0.0 {
                b.powf(1.0 - p) / (p - 1.0)
            } else {
                -(omega * b).sin() * b.powf(-p) / omega
            };
            let want = head + rest;
            assert!((got - want).abs() < 1e-12 * want.abs().max(a.powf(1.0 - p)), "{omega} {a} {p}: {got} vs {want}");
        }
    }
}
