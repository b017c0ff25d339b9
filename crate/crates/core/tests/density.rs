use kgspec_core::bounds::{slope_bound_m, DomainSpec};
use kgspec_core::density::*;
use kgspec_core::spectral::*;
use kgspec_core::Domain;
use std::f64::consts::PI;

fn dom(s: &str) -> Domain {
    s.parse().unwrap()
}

fn spectrum(d: &str, family: Family, res: usize, k: usize) -> SpectrumResult {
    compute_spectrum(&dom(d), family, res, k).unwrap()
}

#[test]
fn empty_density() {
    let r = spectrum("interval:2", Family::Sine, 16, 3);
    let fd = FourierDensity::new(&r, 0).unwrap();
    assert_eq!(fd.eval(&[0.3]), 0.0);
    assert_eq!(fd.sum_beta(), 0.0);
    let n = check_normalization(&fd).unwrap();
    assert_eq!(n.integral, 0.0);
    assert!(n.holds);
    let s = check_sum_identity(&fd).unwrap();
    assert_eq!(s.integral, 0.0);
    assert!(s.holds);
    let b = check_bessel_bound(&fd, &dom("interval:2"), &sample_points(1, 50, 10.0, 1));
    assert_eq!(b.max_f, 0.0);
    assert!(b.holds);
    assert!(FourierDensity::new(&r, 4).is_err());
    let p = RearrangedProfile { d: 1, radii: vec![0.0, 1.0], values: vec![0.0, 0.0], m_bound: 1.0, cutoff: 1.0, sampled_mass: 0.0, boundary_ratio: 0.0, sample_step: 0.0 };
    assert_eq!(moments_bridge(&p, 1), MomentsBridge { k_recovered: 0.0, sum_recovered: 0.0 });
}

#[test]
fn single_mode_value_at_origin() {
    let r = spectrum("interval:3.141592653589793", Family::Sine, 1, 1);
    let fd = FourierDensity::new(&r, 1).unwrap();
    let ft = basis_fourier_transform(&r.basis, &[0], &[0.0]).unwrap();
    assert!((fd.eval(&[0.0]) - ft.norm_sqr()).abs() < 1e-15);
    assert!((fd.eval(&[0.0]) - 4.0 / (PI * PI)).abs() < 1e-14);
}

#[test]
fn density_matches_direct_sum_and_is_even() {
    let r = spectrum("box:1x2", Family::Sine, 4, 3);
    let fd = FourierDensity::new(&r, 3).unwrap();
    for x in sample_points(2, 20, 15.0, 5) {
        let mut direct = 0.0;
        for j in 0..3 {
            let mut u = num_complex::Complex64::new(0.0, 0.0);
            for (i, c) in r.coefficients[j].iter().enumerate() {
                u += c * basis_fourier_transform(&r.basis, &r.basis.multi_index(i), &x).unwrap();
            }
            direct += u.norm_sqr();
        }
        let f = fd.eval(&x);
        assert!((f - direct).abs() < 1e-13, "{x:?}");
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((f - fd.eval(&neg)).abs() < 1e-15);
    }
}

#[test]
fn plancherel_normalization() {
    for (d, fam, res) in [("interval:2", Family::Sine, 32), ("interval:2", Family::Hat, 64), ("box:1x1", Family::Sine, 6)] {
        let r = spectrum(d, fam, res, 5);
        for k in [1, 5] {
            let c = check_normalization(&FourierDensity::new(&r, k).unwrap()).unwrap();
            assert!(c.holds && c.rel_err < IDENTITY_TOL, "{d} {fam} k={k}: {}", c.integral);
        }
    }
}

#[test]
fn first_moment_recovers_ritz_values() {
    for (d, fam, res) in [("interval:2", Family::Sine, 32), ("interval:2", Family::Hat, 64), ("box:1x2", Family::Sine, 6)] {
        let r = spectrum(d, fam, res, 3);
        for k in [1, 3] {
            let fd = FourierDensity::new(&r, k).unwrap();
            let c = check_sum_identity(&fd).unwrap();
            let want: f64 = r.eigenvalues[..k].iter().sum();
            assert!((c.sum_beta - want).abs() < 1e-12 * want);
            assert!(c.holds, "{d} {fam} k={k}: {} vs {}", c.integral, want);
        }
    }
}

#[test]
fn bessel_bounds() {
    let sq = dom("box:1x1");
    let r = spectrum("box:1x1", Family::Sine, 6, 6);
    let fd = FourierDensity::new(&r, 6).unwrap();
    let b = check_bessel_bound(&fd, &sq, &sample_points(2, 1000, natural_radius(&fd), 11));
    assert!((b.bound - 1.0 / (4.0 * PI * PI)).abs() < 1e-15);
    assert!(b.holds, "{} > {}", b.max_f, b.bound);

    let l2 = dom("interval:2");
    let r = spectrum("interval:2", Family::Hat, 64, 10);
    let fd = FourierDensity::new(&r, 10).unwrap();
    let b = check_bessel_bound(&fd, &l2, &sample_points(1, 1000, natural_radius(&fd), 12));
    assert!((b.bound - 1.0 / PI).abs() < 1e-15);
    assert!(b.holds);
}

#[test]
fn gradient_bound_and_finite_differences() {
    let sq = dom("box:1x1");
    let r = spectrum("box:1x1", Family::Sine, 6, 4);
    let fd = FourierDensity::new(&r, 4).unwrap();
    let g = check_gradient_bound(&fd, &sq, &sample_points(2, 1000, natural_radius(&fd), 3));
    assert!((g.m - slope_bound_m(DomainSpec::of(&sq))).abs() < 1e-16);
    assert!(g.holds, "{} > {}", g.max_grad, g.m);
    assert!(g.fd_agrees, "{}", g.fd_deviation);

    let r = spectrum("interval:2", Family::Hat, 32, 3);
    let fd = FourierDensity::new(&r, 3).unwrap();
    let pts = sample_points(1, 20, natural_radius(&fd), 4);
    assert!(gradient_fd_deviation(&fd, &pts, 0.3) <= FD_TOL);
}

#[test]
fn gradient_vanishes_at_origin() {
    let r = spectrum("box:1x1", Family::Sine, 4, 1);
    let fd = FourierDensity::new(&r, 1).unwrap();
    let (f, g) = fd.eval_with_gradient(&[0.0, 0.0]);
    assert!(f > 0.0);
    assert!(g.iter().all(|v| v.abs() < 1e-15), "{g:?}");
}

fn gaussian_profile(d: usize) -> RearrangedProfile {
    let f = |x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>()).exp();
    let s = if d == 1 { Sampling { cutoff: 5.0, per_axis: 4001, radii: 400 } } else { Sampling { cutoff: 5.0, per_axis: 401, radii: 400 } };
    rearrange_fn(f, d, s, 1.0).unwrap()
}

#[test]
fn radial_decreasing_function_is_fixed() {
    for d in [1, 2] {
        let p = gaussian_profile(d);
        let (mut err, mut norm) = (0.0, 0.0);
        for w in p.radii.windows(2).zip(p.values.windows(2)) {
            let (x, v) = w;
            let dx = x[1] - x[0];
            err += dx * 0.5 * ((v[0] - (-x[0] * x[0]).exp()).abs() + (v[1] - (-x[1] * x[1]).exp()).abs());
            norm += dx * 0.5 * ((-x[0] * x[0]).exp() + (-x[1] * x[1]).exp());
        }
        assert!(err / norm < 0.01, "d={d}: {}", err / norm);
        // slope of e^{-x²} peaks at √2 e^{-1/2} ≈ 0.858
        let s = check_slope_condition(&p).unwrap();
        assert!(s.holds && (s.max_slope - (2.0f64).sqrt() * (-0.5f64).exp()).abs() < 0.03, "d={d}: {}", s.max_slope);
    }
}

#[test]
fn equimeasurability() {
    // |{F > s}| = |{φ(|ξ|) > s}| at 20 thresholds
    let f = |x: &[f64]| {
        let (a, b) = (x[0], x[1]);
        (-(a * a + 4.0 * b * b)).exp() * (1.0 + 0.3 * (3.0 * a).cos()) / 1.3
    };
    let p = rearrange_fn(f, 2, Sampling { cutoff: 6.0, per_axis: 401, radii: 2000 }, 10.0).unwrap();
    let n = 1201;
    let step = 12.0 / (n - 1) as f64;
    for i in 1..=20 {
        let s = i as f64 / 21.0;
        let mut level = 0.0;
        for a in 0..n {
            for b in 0..n {
                if f(&[-6.0 + a as f64 * step, -6.0 + b as f64 * step]) > s {
                    level += step * step;
                }
            }
        }
        let idx = p.values.iter().position(|v| *v <= s).unwrap_or(p.values.len() - 1);
        let r = p.radii[idx];
        let rearranged = PI * r * r;
        assert!((rearranged - level).abs() <= 0.02 * level + 2.0 * PI * r * (p.radii[1] - p.radii[0]), "s={s}: {rearranged} vs {level}");
    }
}

#[test]
fn step_function_rearranges_to_step() {
    // constant 2 on the unit disc
    let f = |x: &[f64]| if x[0] * x[0] + x[1] * x[1] <= 1.0 { 2.0 } else { 0.0 };
    let p = rearrange_fn(f, 2, Sampling { cutoff: 2.0, per_axis: 801, radii: 801 }, 1.0).unwrap();
    assert_eq!(p.phi0(), 2.0);
    assert!((p.sampled_mass - 2.0 * PI).abs() < 0.01 * 2.0 * PI);
    let b = moments_bridge(&p, 2);
    assert!((b.k_recovered - 2.0 * PI).abs() < 0.01 * 2.0 * PI);
    let jump = p.values.iter().position(|v| *v < 1.0).unwrap();
    assert!((p.radii[jump] - 1.0).abs() < 0.01);
}

#[test]
fn constant_profile_has_zero_slope() {
    let p = RearrangedProfile { d: 1, radii: vec![0.0, 1.0], values: vec![0.5, 0.5], m_bound: 1.0, cutoff: 1.0, sampled_mass: 0.5, boundary_ratio: 0.0, sample_step: 0.0 };
    let s = check_slope_condition(&p).unwrap();
    assert_eq!(s.max_slope, 0.0);
    assert!(s.holds);
}

#[test]
fn small_cutoff_is_reported() {
    let f = |x: &[f64]| (-x[0] * x[0]).exp();
    let r = rearrange_fn(f, 1, Sampling { cutoff: 1.0, per_axis: 101, radii: 10 }, 1.0);
    assert!(matches!(r, Err(kgspec_core::Error::CutoffTooSmall { .. })));
}

#[test]
fn interval_pipeline() {
    let d2 = dom("interval:2");
    let r = spectrum("interval:2", Family::Sine, 64, 3);
    let fd = FourierDensity::new(&r, 3).unwrap();
    let p = rearrange(&fd, &d2, Sampling::default_for(&fd)).unwrap();
    assert!(check_slope_condition(&p).unwrap().holds);
    assert!(p.phi0() <= 1.0 / PI * (1.0 + 1e-6));
    let b = moments_bridge(&p, 1);
    assert!((b.k_recovered - 3.0).abs() < 0.03, "{}", b.k_recovered);
    let sum = fd.sum_beta();
    // rearrangement can only lower the first moment
    assert!(b.sum_recovered <= sum * 1.01 && b.sum_recovered >= 0.97 * sum, "{} vs {sum}", b.sum_recovered);
}

#[test]
fn square_pipeline() {
    let sq = dom("box:1x1");
    let r = spectrum("box:1x1", Family::Sine, 8, 3);
    let fd = FourierDensity::new(&r, 3).unwrap();
    let p = rearrange(&fd, &sq, Sampling::default_for(&fd)).unwrap();
    let s = check_slope_condition(&p).unwrap();
    assert!(s.holds, "{} vs {}", s.max_slope, s.m);
    assert!(p.phi0() <= (2.0 * PI).powi(-2) * (1.0 + 1e-6));
    let b = moments_bridge(&p, 2);
    assert!((b.k_recovered - 3.0).abs() < 0.03, "{}", b.k_recovered);
    assert!(b.sum_recovered <= fd.sum_beta() * 1.01);
    let chain = check_chain(fd.sum_beta(), p.phi0(), 2, 3, s.m);
    assert!(chain.first_holds, "{chain:?}");
}

#[test]
fn h_decreases_up_to_bessel_level() {
    for (d, k) in [("box:1x1", 1), ("box:1x1", 6), ("box:1x2", 6), ("box:2x3", 20)] {
        let h = check_h_monotone(DomainSpec::of(&dom(d)), k).unwrap();
        assert!(h.holds, "{d} k={k}");
        assert!((h.t_max - dom(d).volume() / (4.0 * PI * PI)).abs() < 1e-15);
    }
}
