use core::f64::consts::PI;
use std::sync::Arc;

use hypconc_core::asymptotics::moment_integrals;
use hypconc_core::bergman::BergmanFunction;
use hypconc_core::hyperbolic::{centered_radius_sq, GridMask};
use hypconc_core::quadrature::*;
use hypconc_core::{AlphaParam, Complex64};
use proptest::prelude::*;

fn one(_: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[test]
fn build_rejects_bad_parameters() {
    assert!(QuadratureGrid::build(16, 32, 1.0).is_err());
    assert!(QuadratureGrid::build(16, 32, 0.0).is_err());
    assert!(QuadratureGrid::build(3, 32, 0.5).is_err());
    assert!(QuadratureGrid::build(16, 4, 0.5).is_err());
}

#[test]
fn radial_weights_reproduce_truncated_interval() {
    for r in [0.3, 0.9, 0.999] {
        let g = QuadratureGrid::build(24, 16, r).unwrap();
        let s: f64 = g.radial().iter().map(|n| n.weight).sum();
        assert!((s - r * r).abs() < 1e-14);
    }
    let g = QuadratureGrid::default_for(AlphaParam::new(-0.9).unwrap(), 16, 16).unwrap();
    let s: f64 = g.radial().iter().map(|n| n.weight).sum();
    assert!((s - g.r_max().powi(2)).abs() < 1e-14);
}

#[test]
fn area_and_weighted_mass() {
    let r = 0.8;
    let g = QuadratureGrid::build(32, 16, r).unwrap();
    let area = g.integrate(&g.sample(one), Weight::Plain).unwrap().re;
    assert!((area - PI * r * r).abs() < 1e-13);
    for alpha in [-0.5, 0.0, 2.5, 30.0] {
        let a = AlphaParam::new(alpha).unwrap();
        let got = g.integrate(&g.sample(one), Weight::Bergman(a)).unwrap().re;
        let want = PI * (1.0 - (1.0 - r * r).powf(alpha + 1.0)) / (alpha + 1.0);
        assert!((got / want - 1.0).abs() < 1e-12, "{alpha}: {got} {want}");
    }
}

#[test]
fn second_moment_to_the_rim() {
    let g = QuadratureGrid::build(8, 8, 1.0 - 1e-12).unwrap();
    let got = g.integrate(&g.sample(|z| Complex64::new(z.norm_sqr(), 0.0)), Weight::Plain).unwrap().re;
    assert!((got - PI / 2.0).abs() < 1e-10);
}

#[test]
fn odd_integrands_vanish() {
    let g = QuadratureGrid::build(16, 32, 0.9).unwrap();
    let v = g.integrate(&g.sample(|z| z), Weight::Hyperbolic).unwrap();
    assert!(v.norm() < 1e-14);
}

#[test]
fn angular_exactness() {
    let m = 32;
    let g = QuadratureGrid::build(16, m, 0.9).unwrap();
    for p in 0..m / 2 {
        for q in 0..m / 2 {
            let v = g
                .integrate(&g.sample(|z| z.powu(p as u32) * z.conj().powu(q as u32)), Weight::Plain)
                .unwrap();
            if p == q {
                let want = PI * 0.81f64.powi(p as i32 + 1) / (p as f64 + 1.0);
                assert!((v.re - want).abs() < 1e-14 && v.im.abs() < 1e-14);
            } else {
                assert!(v.norm() < 1e-14, "{p} {q}: {v}");
            }
        }
    }
}

/// Grid Gram matrix of the first `n` orthonormal basis functions.
fn basis_gram(a: AlphaParam, g: &QuadratureGrid, n: usize) -> Vec<Vec<Complex64>> {
    let basis: Vec<Vec<Complex64>> = (0..n)
        .map(|k| {
            let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
            c[k] = Complex64::new(1.0, 0.0);
            let f = BergmanFunction::new(a, c).unwrap();
            g.sample(|z| f.eval(z))
        })
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let prod: Vec<Complex64> = basis[i].iter().zip(&basis[j]).map(|(x, y)| x * y.conj()).collect();
                    g.integrate(&prod, Weight::Bergman(a)).unwrap()
                })
                .collect()
        })
        .collect()
}

#[test]
fn bergman_basis_is_orthonormal_on_default_grid() {
    let n = 64;
    for alpha in [-0.2, 0.0, 3.0, 50.0] {
        let a = AlphaParam::new(alpha).unwrap();
        let g = QuadratureGrid::default_for(a, 32, 2 * n + 2).unwrap();
        let gram = basis_gram(a, &g, n);
        let mut worst: f64 = 0.0;
        for (i, row) in gram.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - want).norm());
            }
        }
        assert!(worst <= 1e-9, "{alpha}: {worst}");
    }
}

#[test]
fn truncated_rim_mass_near_minus_one() {
    // the grid stops at 1 - r^2 = delta; basis function k then misses
    // exactly I_delta(alpha + 1, k + 1) of its mass
    let n = 32;
    for alpha in [-0.9, -0.6] {
        let a = AlphaParam::new(alpha).unwrap();
        let g = QuadratureGrid::default_for(a, 32, 2 * n + 2).unwrap();
        let delta = g.one_minus_tmax();
        let gram = basis_gram(a, &g, n);
        for (k, row) in gram.iter().enumerate() {
            let lost = hypconc_core::specfun::reg_inc_beta(delta, alpha + 1.0, k as f64 + 1.0).unwrap();
            assert!((row[k].re - (1.0 - lost)).abs() <= 1e-9, "{alpha} {k}: {} {lost}", row[k].re);
            for (j, v) in row.iter().enumerate() {
                if j != k {
                    assert!(v.norm() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn hyperbolic_mass_of_centered_disc_mask() {
    for s in [0.5, PI, 20.0] {
        let t = centered_radius_sq(s);
        let grid = Arc::new(QuadratureGrid::from_breaks(vec![1.0, 1.0 - t, 1e-3], 24, 16).unwrap());
        let mask = GridMask::from_fn(grid.clone(), |z| z.norm_sqr() < t);
        let node_sum: f64 = mask.members().map(|k| grid.cell_weight(k, Weight::Hyperbolic)).sum();
        assert!((node_sum / s - 1.0).abs() < 1e-12, "{s}: {node_sum}");
        assert!((mask.mu() / s - 1.0).abs() < 1e-12);
    }
}

#[test]
fn fourth_moment_on_disc_matches_closed_form() {
    for alpha in [-0.7, 0.0, 4.0] {
        let a = AlphaParam::new(alpha).unwrap();
        for s in [PI / 4.0, PI, 4.0 * PI] {
            let t = centered_radius_sq(s);
            let g = QuadratureGrid::from_breaks(vec![1.0, 1.0 - t], 32, 8).unwrap();
            let v = g.integrate(&g.sample(|z| Complex64::new(z.norm_sqr().powi(2), 0.0)), Weight::Bergman(a)).unwrap();
            let (_, i2) = moment_integrals(a, s).unwrap();
            assert!((v.re / i2 - 1.0).abs() < 1e-12, "{alpha} {s}");
        }
    }
}

#[test]
fn shape_mismatch_is_reported() {
    let g = QuadratureGrid::build(8, 8, 0.5).unwrap();
    assert!(g.integrate(&[Complex64::new(1.0, 0.0); 3], Weight::Plain).is_err());
}

#[test]
fn cell_masses_tile_the_disk() {
    let g = QuadratureGrid::graded(12, 24, 1e-6).unwrap();
    for w in [Weight::Plain, Weight::Hyperbolic, Weight::Bergman(AlphaParam::new(-0.5).unwrap())] {
        let total: f64 = (0..g.len()).map(|k| g.cell_mass(k, w)).sum();
        let want = PI * w.mass(1.0, g.one_minus_tmax());
        assert!((total / want - 1.0).abs() < 1e-12);
    }
    for k in [0, 5, g.len() - 1] {
        let z = g.point(k);
        let i = g.ring_containing(z.norm_sqr()).unwrap();
        assert_eq!(i * g.angular_count() + g.sector_containing(z.arg()), k);
    }
}

#[test]
fn laguerre_rule_integrates_weighted_polynomials() {
    let (x, w) = gauss_laguerre(20, 0.5).unwrap();
    for k in 0..20 {
        let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
        let want = hypconc_core::specfun::ln_gamma(k as f64 + 1.5).unwrap().exp();
        assert!((got / want - 1.0).abs() < 1e-11, "{k}");
    }
    assert!(gauss_laguerre(10, -1.0).is_err());
}

proptest! {
    #[test]
    fn legendre_rule_is_exact_on_polynomials(n in 1usize..60, coeffs in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        let deg = coeffs.len() - 1;
        prop_assume!(2 * n > deg);
        let (x, w) = gauss_legendre(n);
        let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * coeffs.iter().rev().fold(0.0, |a, c| a * xi + c)).sum();
        let want: f64 = coeffs.iter().enumerate().map(|(k, c)| if k % 2 == 0 { 2.0 * c / (k as f64 + 1.0) } else { 0.0 }).sum();
        prop_assert!((got - want).abs() < 1e-13);
    }

    #[test]
    fn integrate_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, p in 0u32..5, q in 0u32..5) {
        let g = QuadratureGrid::build(12, 16, 0.8).unwrap();
        let f1 = g.sample(|z| z.powu(p) * z.conj());
        let f2 = g.sample(|z| z.conj().powu(q) + 1.0);
        let mix: Vec<Complex64> = f1.iter().zip(&f2).map(|(x, y)| a * x + b * y).collect();
        let lhs = g.integrate(&mix, Weight::Hyperbolic).unwrap();
        let rhs = a * g.integrate(&f1, Weight::Hyperbolic).unwrap() + b * g.integrate(&f2, Weight::Hyperbolic).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }
}
