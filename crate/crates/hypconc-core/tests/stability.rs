use core::f64::consts::PI;

use hypconc_core::asymptotics::{deficit_factor, SharpnessFamily};
use hypconc_core::bergman::{kernel, BergmanFunction};
use hypconc_core::hyperbolic::pseudo_disc;
use hypconc_core::quadrature::QuadratureGrid;
use hypconc_core::specfun::basis_norm_c;
use hypconc_core::stability::*;
use hypconc_core::{AlphaParam, Complex64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn alpha(a: f64) -> AlphaParam {
    AlphaParam::new(a).unwrap()
}

fn random_function(rng: &mut ChaCha8Rng, a: AlphaParam, deg: usize) -> BergmanFunction {
    let c = (0..=deg).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    BergmanFunction::new(a, c).unwrap().normalized().unwrap().0
}

#[test]
fn kernel_overlaps_itself() {
    let a = alpha(0.5);
    let w = Complex64::new(0.3, 0.0);
    let k = kernel(a, w).unwrap().function;
    let (a0, at) = extremal_overlap(&k).unwrap();
    assert!((a0 - 1.0).abs() < 1e-10, "{a0}");
    assert!((at - w).norm() < 1e-6, "{at}");
    assert!(distance_to_extremals(&k).unwrap() < 1e-4);
}

#[test]
fn sharpness_family_overlap_and_distance() {
    for eps in [0.05, 0.01] {
        let f = SharpnessFamily::new(alpha(0.0), eps).unwrap().function();
        let (a0, at) = extremal_overlap(&f).unwrap();
        assert!((a0 - 1.0 / (1.0 + eps * eps)).abs() < 1e-12, "{a0}");
        assert!(at.norm() < 1e-6);
        let d = distance_to_extremals(&f).unwrap();
        let want = (2.0 * (1.0 - (1.0 + eps * eps).powf(-0.5))).sqrt();
        assert!((d - want).abs() < 1e-8, "{d} {want}");
    }
}

#[test]
fn pure_mode_overlap_matches_one_dimensional_maximum() {
    for a in [-0.5, 0.0, 3.0] {
        let al = alpha(a);
        let f = BergmanFunction::from_real(al, &[0.0, 0.0, 1.0]).unwrap();
        let (a0, _) = extremal_overlap(&f).unwrap();
        // t^2 (1-t)^{a+2} peaks at t = 2/(a+4)
        let t = 2.0 / (a + 4.0);
        let want = PI / (a + 1.0) * t * t * (1.0 - t).powf(a + 2.0) / basis_norm_c(2, al);
        assert!((a0 - want).abs() < 1e-11, "{a0} {want}");
    }
}

#[test]
fn closed_form_distance_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..4 {
        let a = alpha(rng.gen_range(-0.5..2.0));
        let deg = rng.gen_range(1..=4);
        let f = random_function(&mut rng, a, deg);
        let d = distance_to_extremals(&f).unwrap();
        let (b, _) = distance_brute_force(&f).unwrap();
        assert!((d - b).abs() < 1e-8, "{d} {b}");
    }
}

#[test]
fn rkhs_extremal_and_zero_cases() {
    let a = alpha(1.0);
    let x = Complex64::new(0.2, -0.4);
    let k = kernel(a, x).unwrap().function;
    let r = rkhs_delta(&k, x).unwrap();
    assert!(r.delta < 1e-12 && r.distance < 1e-6);
    // z vanishes at the origin
    let f = BergmanFunction::from_real(a, &[0.0, 2.0]).unwrap();
    let r = rkhs_delta(&f, Complex64::new(0.0, 0.0)).unwrap();
    assert_eq!(r.delta, 1.0);
    assert!((r.distance * r.distance - 2.0 * 4.0).abs() < 1e-12);
    assert!(r.holds);
}

#[test]
fn m_alpha_limits_and_scale() {
    assert!((m_alpha_s(alpha(0.0), PI, 1.0).unwrap() - 3.0).abs() < 1e-14);
    let near = AlphaParam::from_plus_one(1e-10).unwrap();
    assert!((m_alpha_s(near, PI, 1.0).unwrap() - (1.0 + 2f64.ln())).abs() < 1e-8);
    let big = alpha(100.0);
    let ln_oracle = (102.0f64 / 101.0).ln() + 101.0 * 2f64.ln();
    let m = m_alpha_s(big, PI, 1.0).unwrap();
    assert!((m.ln() - ln_oracle).abs() < 1e-12);
}

#[test]
fn k_bound_term_by_term() {
    let (a, s, c) = (0.0, PI, 1.0);
    let m = 3.0;
    let th = 0.5;
    let oracle = c / s * (PI * th / m + 2f64.powi(5) / 2.0) + 2.0 * m.sqrt() * (1.0 + 2.0 * c) / (2.0 * c) * 4.0;
    let k = k_s_alpha(alpha(a), s, c).unwrap();
    assert!((k - oracle).abs() < 1e-12 * oracle, "{k} {oracle}");
}

#[test]
fn k_bound_limit_and_small_s() {
    for (s, c) in [(PI, 1.0), (0.5, 3.0), (20.0, 0.2)] {
        let near = AlphaParam::from_plus_one(1e-10).unwrap();
        let k = k_s_alpha(near, s, c).unwrap();
        let l = k_limit(s, c).unwrap();
        assert!((k - l).abs() < 1e-6 * l, "{k} {l}");
    }
    let a = alpha(0.3);
    let k1 = k_s_alpha(a, 1e-6, 1.0).unwrap();
    let k2 = k_s_alpha(a, 1e-7, 1.0).unwrap();
    assert!((k2 / k1 - 10.0).abs() < 1e-3);
}

#[test]
fn superlevel_bound_saturates_for_extremal() {
    let a = alpha(0.0);
    let grid = QuadratureGrid::default_for(a, 16, 64).unwrap();
    let rep = check_superlevel_bound(&BergmanFunction::constant(a), 0.7, 1.0, &grid, 64, 16).unwrap();
    assert!(rep.hypothesis_met);
    for (_, rho, bound) in &rep.samples {
        assert!((rho / bound - 1.0).abs() < 1e-9, "{rho} {bound}");
    }
}

#[test]
fn superlevel_bound_holds_near_extremal() {
    let a = alpha(0.0);
    let grid = QuadratureGrid::default_for(a, 16, 64).unwrap();
    let f = SharpnessFamily::new(a, 0.02).unwrap().function();
    let rep = check_superlevel_bound(&f, 0.7, 400.0, &grid, 64, 24).unwrap();
    assert!(rep.max_ratio.unwrap() <= 1.0, "{:?}", rep.max_ratio);
}

#[test]
fn superlevel_bound_rejects_small_c0() {
    let a = alpha(0.0);
    let grid = QuadratureGrid::default_for(a, 16, 64).unwrap();
    assert!(check_superlevel_bound(&BergmanFunction::constant(a), 0.6, 1.0, &grid, 64, 8).is_err());
}

#[test]
fn rearrangement_gap_vanishes_for_extremal() {
    let a = alpha(1.0);
    let grid = QuadratureGrid::default_for(a, 16, 64).unwrap();
    let g = rearrangement_gap(&BergmanFunction::constant(a), &grid, 64).unwrap();
    assert!(g.gap.abs() < 1e-9, "{g:?}");
}

#[test]
fn rearrangement_gap_scales_with_overlap_defect() {
    for a in [-0.9, 0.0, 1.0, 10.0] {
        let al = alpha(a);
        let grid = QuadratureGrid::default_for(al, 16, 64).unwrap();
        let f = SharpnessFamily::new(al, 1e-2).unwrap().function();
        let g = rearrangement_gap(&f, &grid, 64).unwrap();
        assert!(g.crossing_found);
        let scaled = g.gap / (1.0 - g.a0_sq) * (a + 2.0) / (a + 1.0);
        assert!(scaled > 0.0, "alpha {a}: {g:?}");
    }
}

#[test]
fn enclosure_of_exact_extremal_is_the_level_disc() {
    let a = alpha(0.0);
    let grid = QuadratureGrid::default_for(a, 16, 64).unwrap();
    let rep = enclosure_radii(&BergmanFunction::constant(a), PI, &grid, 64).unwrap();
    assert!(rep.epsilon < 1e-12);
    let r = (0.5f64).sqrt();
    assert!((rep.r_minus - r).abs() < 1e-6 && (rep.r_plus - r).abs() < 1e-6);
}

#[test]
fn enclosure_inclusions_for_sharpness_family() {
    for a in [0.0, 2.0] {
        let al = alpha(a);
        let grid = QuadratureGrid::default_for(al, 16, 64).unwrap();
        let f = SharpnessFamily::new(al, 1e-3).unwrap().function();
        let rep = enclosure_radii(&f, PI, &grid, 64).unwrap();
        assert_eq!(rep.inclusion_ok, [true, true, true]);
        assert!(rep.r_plus.powi(2) - rep.r_minus.powi(2) <= rep.width_bound);
    }
}

#[test]
fn stability_report_for_extremal_and_family() {
    let a = alpha(0.0);
    let set = pseudo_disc(Complex64::new(0.0, 0.0), PI).unwrap();
    let rep = check_stability_function(&BergmanFunction::constant(a), &set, 1.0).unwrap();
    assert!(rep.distance < 1e-6 && rep.deficit.abs() < 1e-12);
    let eps = 1e-3;
    let f = SharpnessFamily::new(a, eps).unwrap().function();
    let rep = check_stability_function(&f, &set, 1.0).unwrap();
    let want = deficit_factor(a, PI).unwrap().powf(-0.5);
    assert!((rep.lhs_over_sqrt_deficit / want - 1.0).abs() < 1e-3);
    assert!(rep.distance * rep.distance <= 2.0 * (1.0 - rep.a0_sq) + 1e-15);
}

#[test]
fn stability_set_for_disc_pair() {
    let a = alpha(0.0);
    let set = pseudo_disc(Complex64::new(0.2, 0.1), 2.0).unwrap();
    let k = kernel(a, Complex64::new(0.2, 0.1)).unwrap().function;
    let rep = check_stability_set(&k, &set).unwrap();
    assert!(rep.asymmetry < 1e-8, "{rep:?}");
    assert!(!rep.equality_violation);
}

#[test]
fn default_audit_passes() {
    let rows = audit_proof_inequalities(&AuditSweep::default()).unwrap();
    let (n, bad) = audit_summary(&rows);
    assert!(n > 0);
    assert_eq!(bad, 0, "{:?}", rows.iter().find(|r| !r.pass));
}

#[test]
fn audit_b_example_row() {
    let sweep = AuditSweep { alpha_plus_one: vec![1.0], a0_sq: vec![0.99], c0: vec![1.0], c: vec![10.0], slack: 1e-9 };
    let rows = audit_proof_inequalities(&sweep).unwrap();
    assert!(rows.iter().filter(|r| r.check == AuditCheck::B).all(|r| r.margin >= 0.0));
    assert!(rows.iter().filter(|r| r.check == AuditCheck::A).all(|r| r.margin > 0.0));
}

#[test]
fn family_constant_routes_agree() {
    let a = alpha(0.0);
    let grid = QuadratureGrid::default_for(a, 24, 128).unwrap();
    let lim = family_constant_limit(a, PI).unwrap();
    let num = family_constant_numeric(a, PI, 1e-2, &grid, 128).unwrap().unwrap();
    assert!((num / lim - 1.0).abs() < 0.05, "{num} {lim}");
    // theta/|W_2|/M = (1/2)/(3/16)/3
    assert!((lim - 8.0 / 9.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distance_identity(seed in 0u64..1000, a in -0.8f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_function(&mut rng, alpha(a), 3);
        let (a0, _) = extremal_overlap(&f).unwrap();
        let d = distance_to_extremals(&f).unwrap();
        prop_assert!((d * d + 2.0 * a0.sqrt() - 2.0).abs() < 1e-12);
        prop_assert!((0.0..=2f64.sqrt()).contains(&d));
        prop_assert!(d * d <= 2.0 * (1.0 - a0) + 1e-14);
    }

    #[test]
    fn rkhs_inequality(seed in 0u64..10000, a in -0.9f64..8.0, r in 0.0f64..0.95, th in 0.0f64..6.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_function(&mut rng, alpha(a), 5);
        let rep = rkhs_delta(&f, Complex64::from_polar(r, th)).unwrap();
        prop_assert!(rep.holds, "{:?}", rep);
        prop_assert!((0.0..=1.0).contains(&rep.delta));
    }
}
