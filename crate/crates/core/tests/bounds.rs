use kgspec_core::bounds::*;
use kgspec_core::Domain;
use proptest::prelude::*;
use std::f64::consts::PI;

// High-precision evaluations of the closed forms (40-digit arithmetic).
const M_UNIT_SQUARE: f64 = 0.020_682_100_004_879_758;
const C_UNIT_SQUARE: f64 = 0.042_441_318_157_838_75;
const TILDE_M2: f64 = 0.001_995_412_468_057_406;
const CORRECTION_K1: f64 = 0.011_972_474_808_344_437;
const LEADING_K1: f64 = 2.363_271_801_207_354_7;
const TOTAL_K1: f64 = 2.375_244_276_015_699_1;
const CORRECTION_K2_6: [f64; 5] = [0.033_863_3, 0.062_210_8, 0.094_031_6, 0.105_130_5, 0.115_164_7];
const LEADING_K2_6: [f64; 5] = [6.684_342_1, 12.279_920_5, 18.906_174_4, 26.422_182_0, 34.732_860_2];
const M_INTERVAL_2: f64 = 0.367_552_596_947_861_37;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn unit_square() -> DomainSpec {
    DomainSpec::of(&"box:1x1".parse::<Domain>().unwrap())
}

#[test]
fn dimensional_constants() {
    assert!((tilde_c_d(1) - PI).abs() < 1e-12);
    assert!((omega_d(2) - PI).abs() < 1e-12);
    assert!((tilde_c_d(2) - 2.0 * PI.sqrt()).abs() < 1e-12);
    assert!((omega_d(1) - 2.0).abs() < 1e-14);
}

#[test]
fn unit_square_constant_chain() {
    let spec = unit_square();
    assert!(rel(slope_bound_m(spec), M_UNIT_SQUARE) < 1e-12);
    assert!(rel(slope_bound_m(spec), 1.0 / (2.0 * PI * PI * 6f64.sqrt())) < 1e-12);
    let c = improved_constant_c(spec, 1).unwrap();
    assert!(rel(c, C_UNIT_SQUARE) < 1e-12);
    assert!(rel(improved_constant_m(2, c), TILDE_M2) < 1e-12);
    let b = improved_kg_bound(spec, 1);
    assert!(rel(b.correction_term, CORRECTION_K1) < 1e-12);
    assert!(rel(b.leading_term, LEADING_K1) < 1e-12);
    assert!(rel(b.total, TOTAL_K1) < 1e-12);
    assert!(rel(b.leading_term, 4.0 * PI.sqrt() / 3.0) < 1e-14);
    assert_eq!(b.applicability, Applicability::Full);
}

#[test]
fn unit_square_higher_k() {
    let spec = unit_square();
    for (i, k) in (2..=6).enumerate() {
        let b = improved_kg_bound(spec, k);
        assert!(rel(b.correction_term, CORRECTION_K2_6[i]) < 1e-6, "k={k}");
        assert!(rel(b.leading_term, LEADING_K2_6[i]) < 1e-7, "k={k}");
    }
    // C saturates at 1/6 once k ≥ 4
    assert!(rel(improved_constant_c(spec, 4).unwrap(), 1.0 / 6.0) < 1e-15);
    assert!(improved_constant_c(spec, 3).unwrap() < 1.0 / 6.0);
}

#[test]
fn interval_bounds() {
    let spec = DomainSpec::of(&"interval:2".parse::<Domain>().unwrap());
    assert!(rel(slope_bound_m(spec), M_INTERVAL_2) < 1e-12);
    for k in 1..=20 {
        assert!(rel(kg_berezin_li_yau_bound(1, 2.0, k), PI * (k * k) as f64 / 4.0) < 1e-14);
    }
    let b = improved_kg_bound(spec, 3);
    assert_eq!(b.applicability, Applicability::LeadingOnly);
    assert_eq!(b.correction_term, 0.0);
    assert!(improved_constant_c(spec, 1).is_err());
    // |Ω| = π: leading term 1/2 at k = 1
    assert!(rel(kg_berezin_li_yau_bound(1, PI, 1), 0.5) < 1e-14);
    assert!(rel(kg_berezin_li_yau_bound(2, PI, 1), 4.0 / 3.0) < 1e-14);
}

#[test]
fn weyl_and_laplacian_comparators() {
    assert!(rel(weyl_estimate(1, 2.0, 10), 5.0 * PI) < 1e-14);
    let spec = unit_square();
    // Li–Yau for the unit square at k = 1: (d/(d+2)) 4π Γ(2) = 2π
    assert!(rel(li_yau_laplacian_bound(2, 1.0, 1), 2.0 * PI) < 1e-14);
    assert_eq!(melas_laplacian_bound(spec, 3, 0.0).unwrap(), li_yau_laplacian_bound(2, 1.0, 3));
    let with = melas_laplacian_bound(spec, 3, 0.1).unwrap();
    assert!(rel(with - li_yau_laplacian_bound(2, 1.0, 3), 0.1 * 3.0 * 6.0) < 1e-12);
    assert!(melas_laplacian_bound(spec, 3, -0.1).is_err());
}

#[test]
fn riesz_means() {
    let s = [1.0, 2.0, 3.0];
    assert_eq!(riesz_mean(&s, 2.5, 1.0), 2.0);
    assert_eq!(riesz_mean(&s, 2.5, 0.0), 2.0);
    assert_eq!(riesz_mean(&s, 0.5, 1.0), 0.0);
    assert!(check_spectrum(&[1.0, 3.0, 2.0]).is_err());
    assert!(check_spectrum(&[1.0, f64::NAN]).is_err());
}

proptest! {
    #[test]
    fn slope_bound_is_at_least_its_floor(a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let spec = DomainSpec::of(&Domain::cuboid(&[a, b]).unwrap());
        prop_assert!(slope_bound_m(spec) >= slope_bound_floor(2, spec.volume) * (1.0 - 1e-12));
    }

    #[test]
    fn improved_bound_exceeds_leading_term(a in 0.1f64..10.0, b in 0.1f64..10.0, k in 1usize..200) {
        let spec = DomainSpec::of(&Domain::cuboid(&[a, b]).unwrap());
        let bd = improved_kg_bound(spec, k);
        prop_assert!(bd.correction_term > 0.0);
        prop_assert!(bd.total >= bd.leading_term);
        let c = bd.constants.c.unwrap();
        prop_assert!(c > 0.0 && c <= 1.0 / 6.0);
    }

    #[test]
    fn bound_scaling(l in 0.1f64..10.0, s in 0.1f64..10.0, k in 1usize..50) {
        // |p| is homogeneous of degree 1: sums scale like 1/length
        let a = kg_berezin_li_yau_bound(2, l * l, k);
        let b = kg_berezin_li_yau_bound(2, (s * l).powi(2), k);
        prop_assert!((a / s - b).abs() <= 1e-12 * a / s);
    }

    #[test]
    fn riesz_mean_is_monotone_in_z(z in 0.0f64..10.0, dz in 0.0f64..5.0, sigma in 0.0f64..3.0) {
        let s = [0.5, 1.0, 2.5, 4.0, 7.0];
        prop_assert!(riesz_mean(&s, z + dz, sigma) >= riesz_mean(&s, z, sigma));
    }
}
