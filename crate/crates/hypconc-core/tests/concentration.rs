use core::f64::consts::{PI, TAU};
use std::sync::Arc;

use hypconc_core::asymptotics::{sharpness_deficit_closed, SharpnessFamily};
use hypconc_core::bergman::{kernel, BergmanFunction};
use hypconc_core::concentration::*;
use hypconc_core::hyperbolic::{centered_radius_sq, pseudo_disc, GridMask, HyperbolicSet, PseudoDisc};
use hypconc_core::quadrature::{QuadratureGrid, Weight};
use hypconc_core::specfun::{reg_inc_beta, AlphaParam};
use hypconc_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn alpha(a: f64) -> AlphaParam {
    AlphaParam::new(a).unwrap()
}

fn basis(a: AlphaParam, k: usize) -> BergmanFunction {
    let mut v = vec![c(0.0, 0.0); k + 1];
    v[k] = c(1.0, 0.0);
    BergmanFunction::new(a, v).unwrap()
}

/// Grid aligned with the centered disc of measure `s`.
fn aligned_grid(s: f64, n_angles: usize) -> Arc<QuadratureGrid> {
    let t = centered_radius_sq(s);
    Arc::new(QuadratureGrid::from_breaks(vec![1.0, 1.0 - t, 0.5 * (1.0 - t), 1e-4], 24, n_angles).unwrap())
}

fn centered_mask(s: f64, n_angles: usize) -> HyperbolicSet {
    let t = centered_radius_sq(s);
    HyperbolicSet::Mask(GridMask::from_fn(aligned_grid(s, n_angles), |z| z.norm_sqr() < t))
}

#[test]
fn theta_examples() {
    assert!((theta(alpha(0.0), PI) - 0.5).abs() < 1e-16);
    assert_eq!(theta(alpha(3.0), 0.0), 0.0);
    let a = AlphaParam::from_plus_one(1e-10).unwrap();
    assert!((theta(a, PI) / a.plus_one() / 2f64.ln() - 1.0).abs() < 1e-9);
    // theta / (alpha+1) = ln(1+q) - b ln(1+q)^2/2 + ..., with b = alpha+1
    let b = 1e-12;
    let a = AlphaParam::from_plus_one(b).unwrap();
    for s in [0.1, PI, 50.0] {
        let l = (s / PI).ln_1p();
        let series = l - 0.5 * b * l * l;
        assert!((theta_over_plus_one(a, s) / series - 1.0).abs() < 1e-12);
        assert!((theta(a, s) / b / series - 1.0).abs() < 1e-12);
    }
}

#[test]
fn constant_on_its_disc_attains_theta() {
    for a in [-0.5, 0.0, 4.0] {
        let a = alpha(a);
        for s in [PI / 4.0, PI, 4.0 * PI] {
            let f = BergmanFunction::constant(a);
            let disc = pseudo_disc(c(0.0, 0.0), s).unwrap();
            assert!((concentration_integral(&f, &disc).unwrap() - theta(a, s)).abs() < 1e-12);
            let mask = centered_mask(s, 16);
            assert!((concentration_integral(&f, &mask).unwrap() - theta(a, s)).abs() < 1e-12);
        }
    }
}

#[test]
fn empty_set_has_no_concentration() {
    let a = alpha(0.0);
    let grid = Arc::new(QuadratureGrid::build(8, 16, 0.9).unwrap());
    let empty = HyperbolicSet::Mask(GridMask::empty(grid));
    assert_eq!(concentration_integral(&BergmanFunction::constant(a), &empty).unwrap(), 0.0);
    assert!(deficit(&BergmanFunction::constant(a), &empty).is_err());
}

#[test]
fn basis_functions_on_centered_discs() {
    for a in [-0.7, 0.0, 2.5] {
        let a = alpha(a);
        for s in [0.5, PI, 12.0] {
            let t = centered_radius_sq(s);
            let disc = pseudo_disc(c(0.0, 0.0), s).unwrap();
            let mask = centered_mask(s, 32);
            for k in [1, 3, 7] {
                let want = reg_inc_beta(t, k as f64 + 1.0, a.plus_one()).unwrap();
                let f = basis(a, k);
                assert!((concentration_integral(&f, &disc).unwrap() - want).abs() < 1e-10);
                assert!((concentration_integral(&f, &mask).unwrap() - want).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn localization_matrix_of_centered_disc() {
    let a = alpha(0.0);
    let s = PI; // r^2 = 1/2
    for set in [pseudo_disc(c(0.0, 0.0), s).unwrap(), centered_mask(s, 40)] {
        let m = localization_matrix(a, &set, 12).unwrap();
        assert!((m.matrix.get(0, 0).re - 0.5).abs() < 1e-12);
        for i in 0..12 {
            let want = reg_inc_beta(0.5, i as f64 + 1.0, 1.0).unwrap();
            assert!((m.matrix.get(i, i).re - want).abs() < 1e-10);
            for j in 0..12 {
                if i != j {
                    assert!(m.matrix.get(i, j).norm() < 1e-12);
                }
            }
        }
        let (lam, v) = lambda_max(&m).unwrap();
        assert!((lam - theta(a, s)).abs() < 1e-12);
        assert!((v.coeffs()[0].norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn coarse_grid_is_rejected() {
    let grid = Arc::new(QuadratureGrid::build(8, 16, 0.9).unwrap());
    let m = HyperbolicSet::Mask(GridMask::from_fn(grid, |z| z.re > 0.0));
    assert!(localization_matrix(alpha(0.0), &m, 12).is_err());
}

#[test]
fn full_disk_localization_tends_to_one() {
    let a = alpha(1.0);
    let grid = Arc::new(QuadratureGrid::default_for(a, 32, 64).unwrap());
    let all = HyperbolicSet::Mask(GridMask::from_fn(grid, |_| true));
    let m = localization_matrix(a, &all, 16).unwrap();
    let (lam, _) = lambda_max(&m).unwrap();
    assert!((lam - 1.0).abs() < 1e-9);
}

#[test]
fn off_center_non_disc_mask_is_strictly_below_theta() {
    let a = alpha(0.0);
    let grid = Arc::new(QuadratureGrid::build(48, 128, 0.95).unwrap());
    let square = HyperbolicSet::Mask(GridMask::from_fn(grid, |z| z.re.abs() < 0.45 && (z.im - 0.1).abs() < 0.45));
    let s = square.measures().hyperbolic_measure;
    let m = localization_matrix(a, &square, 40).unwrap();
    let (lam, v) = lambda_max(&m).unwrap();
    assert!(lam < theta(a, s) - 1e-4);
    // the eigenvector realises the eigenvalue as a concentration
    assert!((concentration_integral(&v, &square).unwrap() - lam).abs() < 1e-10);
    assert!(deficit(&v, &square).unwrap().deficit > 0.0);
}

#[test]
fn trace_matches_direct_quadrature() {
    let a = alpha(0.5);
    let grid = Arc::new(QuadratureGrid::build(32, 64, 0.9).unwrap());
    let mask = GridMask::from_fn(grid.clone(), |z| z.re > -0.2 && z.norm_sqr() < 0.6);
    let dim = 10;
    let m = localization_matrix(a, &HyperbolicSet::Mask(mask.clone()), dim).unwrap();
    // sum_k |e_k|^2 integrated over the mask, with a per-cell Gauss rule in
    // radius and a fine midpoint rule in angle
    let (gx, gw) = hypconc_core::quadrature::gauss_legendre(24);
    let sectors = grid.angular_count();
    let dth = 2.0 * PI / sectors as f64;
    let sub = 64;
    let mut direct = 0.0;
    for k in mask.members() {
        let (i, j) = (k / sectors, k % sectors);
        let (hi, lo) = grid.ring_edges(i);
        let th0 = grid.angle(j) - 0.5 * dth;
        for (x, w) in gx.iter().zip(&gw) {
            let omt = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x;
            let r = (1.0 - omt).sqrt();
            for q in 0..sub {
                let z = Complex64::from_polar(r, th0 + (q as f64 + 0.5) * dth / sub as f64);
                let sum: f64 = (0..dim).map(|n| basis(a, n).eval(z).norm_sqr()).sum();
                // dA = (1/2) d(r^2) dtheta
                direct += 0.25 * (hi - lo) * w * dth / sub as f64 * sum * omt.powf(a.alpha());
            }
        }
    }
    assert!((m.matrix.trace() - direct).abs() < 1e-9, "{} {direct}", m.matrix.trace());
}

#[test]
fn extremal_pairs_have_zero_deficit() {
    for a in [-0.5, 0.0, 2.0] {
        let a = alpha(a);
        for w in [c(0.0, 0.0), c(0.3, 0.0), c(0.0, 0.6)] {
            let k = kernel(a, w).unwrap().function;
            for s in [PI / 4.0, PI, 4.0 * PI] {
                let rep = deficit(&k, &pseudo_disc(w, s).unwrap()).unwrap();
                assert!(rep.deficit.abs() <= 1e-8, "{w} {s}: {}", rep.deficit);
            }
        }
    }
}

#[test]
fn sharpness_family_deficit_matches_closed_form() {
    for (a, s, eps) in [(0.0, PI, 0.05), (-0.6, 2.0, 0.2), (3.0, 10.0, 0.01)] {
        let a = alpha(a);
        let f = SharpnessFamily::new(a, eps).unwrap().function();
        let rep = deficit(&f, &pseudo_disc(c(0.0, 0.0), s).unwrap()).unwrap();
        let closed = sharpness_deficit_closed(a, s, eps).unwrap();
        assert!((rep.deficit - closed).abs() < 1e-8, "{}: {} {closed}", a.alpha(), rep.deficit);
        assert!((rep.f_norm - (1.0 + eps * eps).sqrt()).abs() < 1e-15);
        assert!((rep.deficit - (1.0 - rep.concentration / (rep.f_norm.powi(2) * rep.theta))).abs() < 1e-15);
    }
}

#[test]
fn disc_rule_reproduces_hyperbolic_measure() {
    let d = PseudoDisc::new(c(0.2, -0.5), 3.0).unwrap();
    let rule = DiscRule::for_disc(&d, 8).unwrap();
    assert!((rule.integrate(-2.0, |_| 1.0) / 3.0 - 1.0).abs() < 1e-10);
    assert!(DiscRule::new(c(0.9, 0.0), 0.2, 8, 8).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn deficit_is_nonnegative_on_random_masks(
        bits in prop::collection::vec(any::<bool>(), 16 * 48),
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8),
        a in -0.5f64..5.0,
    ) {
        let a = alpha(a);
        let grid = Arc::new(QuadratureGrid::build(16, 48, 0.9).unwrap());
        let mask = GridMask::new(grid, bits).unwrap();
        prop_assume!(mask.count() > 0);
        let set = HyperbolicSet::Mask(mask);
        let f = BergmanFunction::new(a, coeffs.iter().map(|(x, y)| c(*x, *y)).collect()).unwrap();
        prop_assume!(f.norm() > 1e-3);
        let rep = deficit(&f, &set).unwrap();
        prop_assert!(rep.deficit >= -1e-9);
        prop_assert!(rep.concentration >= -1e-12 && rep.concentration <= f.norm_sq() * (1.0 + 1e-12));
        let m = localization_matrix(a, &set, 16).unwrap();
        let (lam, _) = lambda_max(&m).unwrap();
        prop_assert!(lam <= theta(a, rep.s) + 5e-10);
    }

    #[test]
    fn deficit_is_mobius_invariant(
        r in 0.0f64..0.6, th in 0.0f64..TAU, cr in 0.0f64..0.5, ct in 0.0f64..TAU,
        s in 0.3f64..8.0, eps in 0.0f64..0.5, a in -0.5f64..3.0,
    ) {
        let a = alpha(a);
        let f = BergmanFunction::from_real(a, &[1.0, 0.3, eps]).unwrap();
        let d = PseudoDisc::new(Complex64::from_polar(cr, ct), s).unwrap();
        let shift = Complex64::from_polar(r, th);
        // u of the transport is u o phi_shift, so the set moves by phi_{-shift}
        let g = f.mobius_transport(shift).unwrap();
        let moved = d.mobius_image(-shift).unwrap();
        let lhs = deficit(&f, &HyperbolicSet::Disc(d)).unwrap().deficit;
        let rhs = deficit(&g, &HyperbolicSet::Disc(moved)).unwrap().deficit;
        prop_assert!((lhs - rhs).abs() < 1e-6, "{lhs} {rhs}");
        prop_assert!(lhs >= -1e-9);
    }

    #[test]
    fn disc_and_grid_quadrature_agree(k in 0usize..6, a in -0.3f64..3.0, s in 0.2f64..10.0) {
        let a = alpha(a);
        let f = basis(a, k);
        let t = centered_radius_sq(s);
        let g = QuadratureGrid::from_breaks(vec![1.0, 1.0 - t], 24, 16).unwrap();
        let samples = g.sample(|z| c(f.eval(z).norm_sqr(), 0.0));
        let grid_value = g.integrate(&samples, Weight::Bergman(a)).unwrap().re;
        let disc = pseudo_disc(c(0.0, 0.0), s).unwrap();
        prop_assert!((concentration_integral(&f, &disc).unwrap() - grid_value).abs() < 1e-10);
    }
}
