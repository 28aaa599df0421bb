use core::f64::consts::PI;

use hypconc_core::asymptotics::*;
use hypconc_core::concentration::{deficit, theta};
use hypconc_core::hyperbolic::{centered_radius_sq, pseudo_disc};
use hypconc_core::quadrature::{gauss_legendre, QuadratureGrid, Weight};
use hypconc_core::specfun::{basis_norm_c, AlphaParam};
use hypconc_core::stability::distance_to_extremals;
use hypconc_core::Complex64;
use proptest::prelude::*;

fn alpha(a: f64) -> AlphaParam {
    AlphaParam::new(a).unwrap()
}

/// `int_0^x u^p (1-u)^alpha du` by Gauss-Legendre in `u`.
fn beta_integral(a: AlphaParam, x: f64, p: i32) -> f64 {
    let (gx, gw) = gauss_legendre(200);
    gx.iter().zip(&gw).map(|(xi, wi)| {
        let u = 0.5 * x * (xi + 1.0);
        0.5 * x * wi * u.powi(p) * (1.0 - u).powf(a.alpha())
    }).sum()
}

#[test]
fn moment_integral_examples() {
    let (i1, _) = moment_integrals(alpha(0.0), PI).unwrap();
    assert!((i1 - PI / 2.0).abs() < 1e-15);
    let a = alpha(1.3);
    let s = 2.7;
    let (i1, i2) = moment_integrals(a, s).unwrap();
    let g = QuadratureGrid::from_breaks(vec![1.0, 1.0 - centered_radius_sq(s)], 32, 8).unwrap();
    let q1 = g.integrate(&g.sample(|_| Complex64::new(1.0, 0.0)), Weight::Bergman(a)).unwrap().re;
    let q2 = g.integrate(&g.sample(|z| Complex64::new(z.norm_sqr().powi(2), 0.0)), Weight::Bergman(a)).unwrap().re;
    // z^2 conj(z)^0 integrates to zero by symmetry
    let q3 = g.integrate(&g.sample(|z| z * z), Weight::Bergman(a)).unwrap();
    assert!((i1 / q1 - 1.0).abs() < 1e-9 && (i2 / q2 - 1.0).abs() < 1e-9);
    assert!(q3.norm() < 1e-14);
    let x = centered_radius_sq(s);
    assert!((i2 / (PI * beta_integral(a, x, 2)) - 1.0).abs() < 1e-12);
    // small s: I1 ~ s
    let (i1, i2) = moment_integrals(a, 1e-8).unwrap();
    assert!((i1 / 1e-8 - 1.0).abs() < 1e-7);
    assert!(i2 < 1e-20);
    assert!(moment_integrals(a, 0.0).is_err());
}

#[test]
fn sharpness_family_shape() {
    let f = SharpnessFamily::new(alpha(0.0), 0.1).unwrap().function();
    let a = f.coeffs();
    assert_eq!(a.len(), 3);
    assert_eq!(a[1], Complex64::new(0.0, 0.0));
    assert!(a[0].re == 1.0 && a[2].re == 0.1);
    assert!(SharpnessFamily::new(alpha(0.0), -1.0).is_err());
}

#[test]
fn closed_form_deficit_examples() {
    let a = alpha(0.0);
    assert_eq!(sharpness_deficit_closed(a, PI, 0.0).unwrap(), 0.0);
    let eps = 0.05;
    let f = SharpnessFamily::new(a, eps).unwrap().function();
    let q = deficit(&f, &pseudo_disc(Complex64::new(0.0, 0.0), PI).unwrap()).unwrap().deficit;
    assert!((q - sharpness_deficit_closed(a, PI, eps).unwrap()).abs() < 1e-8);
}

#[test]
fn deficit_factor_tends_to_c_limit() {
    for s in [0.3, PI, 20.0] {
        let lim = c_limit(s).unwrap();
        let mut prev = f64::INFINITY;
        for b in [1e-2, 1e-4, 1e-6, 1e-9] {
            let err = (deficit_factor(AlphaParam::from_plus_one(b).unwrap(), s).unwrap() - lim).abs();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-8 * lim, "{s}");
    }
}

#[test]
fn c_limit_examples() {
    // x = 1/2: (1/2)(5/4) / ln 2
    let want = 0.625 / 2f64.ln();
    assert!((c_limit(PI).unwrap() - want).abs() < 1e-15);
    // small s: x ~ s/pi and ln(1+s/pi) ~ s/pi, so c -> 1
    assert!((c_limit(1e-9).unwrap() - 1.0).abs() < 1e-8);
    // large s: x -> 1, so c ~ 3/(2 ln(s/pi))
    let s = 1e12;
    assert!((c_limit(s).unwrap() * (s / PI).ln() / 1.5 - 1.0).abs() < 1e-6);
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        let v = c_limit(1e-3 * 1.5f64.powi(k)).unwrap();
        assert!(v < prev);
        prev = v;
    }
}

#[test]
fn w2_example_and_ordering() {
    let a0 = alpha(0.0);
    assert!((second_variation_w(a0, PI, 2).unwrap() + 3.0 / 16.0).abs() < 1e-15);
    for a in [-0.5, 0.0, 2.0] {
        let a = alpha(a);
        for s in [1.0, PI, 10.0] {
            let w2 = w2_closed(a, s);
            assert!((second_variation_w(a, s, 2).unwrap() / w2 - 1.0).abs() < 1e-13);
            assert!(w2 < 0.0);
            let mut prev = w2;
            for k in 3..=20 {
                let wk = second_variation_w(a, s, k).unwrap();
                assert!(wk < prev, "{} {s} {k}", a.alpha());
                prev = wk;
            }
        }
    }
    assert!(second_variation_w(a0, PI, 1).is_err());
}

#[test]
fn w_terms_recombine() {
    for (a, s, k) in [(0.0, PI, 2), (-0.7, 1.0, 5), (3.0, 10.0, 12)] {
        let a = alpha(a);
        let (first, th, third) = w_terms(a, s, k).unwrap();
        let w = second_variation_w(a, s, k).unwrap();
        assert!((first - th + third - w).abs() < 1e-13);
        // third term recomputed from c_k directly
        let x = centered_radius_sq(s);
        let direct = PI / (a.plus_two() * basis_norm_c(k, a)) * (1.0 - x).powf(a.plus_one()) * x.powi(k as i32);
        assert!((third / direct - 1.0).abs() < 1e-12);
        // first term by quadrature of the incomplete Beta integral
        let first_q = beta_integral(a, x, k as i32) * PI / basis_norm_c(k, a);
        assert!((first / first_q - 1.0).abs() < 1e-9);
    }
}

#[test]
fn negdef_bound_examples() {
    let a = alpha(0.0);
    let nb = negdef_bound(a, PI).unwrap();
    assert_eq!(nb.w2, -3.0 / 16.0);
    assert!((nb.ratio - PI).abs() < 1e-13);
    for al in [-0.5, 2.0, 9.0] {
        let al = alpha(al);
        let nb = negdef_bound(al, 2.0).unwrap();
        assert!((nb.ratio - PI / al.plus_one()).abs() < 1e-12);
    }
    let pure = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    assert_eq!(second_variation(a, PI, &pure).unwrap(), nb.w2);
    assert!(second_variation(a, PI, &[Complex64::new(1.0, 0.0)]).is_err());
}

#[test]
fn sigma_threshold_examples() {
    assert!((sigma_threshold(alpha(0.0)) - 0.5).abs() < 1e-16);
    assert!((sigma_threshold(alpha(-0.5)) - 4.0 / 9.0).abs() < 1e-15);
    assert!(sigma_threshold(alpha(1e6)) > 0.9999);
    let near = AlphaParam::from_plus_one(1e-14).unwrap();
    assert!((sigma_threshold(near) - (-1.0f64).exp()).abs() < 1e-12);
}

#[test]
fn variational_gap_matches_second_variation() {
    // (theta - K)/eps^2 on the optimal set tends to -W_2
    for a in [0.0, 1.5] {
        let a = alpha(a);
        let s = PI;
        let g = QuadratureGrid::default_for(a, 32, 64).unwrap();
        let gap = optimal_set_gap(a, s, 1e-3, &g, 64).unwrap();
        let w2 = w2_closed(a, s);
        assert!((gap / -w2 - 1.0).abs() < 0.05, "{}: {gap} {w2}", a.alpha());
    }
}

#[test]
fn distance_over_root_deficit_approaches_factor() {
    let a = alpha(0.5);
    let s = PI;
    let target = deficit_factor(a, s).unwrap().powf(-0.5);
    let mut prev = f64::INFINITY;
    for eps in [0.1, 0.03, 0.01, 0.003] {
        let f = SharpnessFamily::new(a, eps).unwrap().function();
        let d = distance_to_extremals(&f).unwrap();
        let del = sharpness_deficit_closed(a, s, eps).unwrap();
        // distance is measured for the unit-norm function
        let ratio = d / del.sqrt();
        let err = (ratio / target - 1.0).abs();
        assert!(err < prev);
        prev = err;
    }
    assert!(prev < 1e-4, "{prev}");
}

#[test]
fn w_table_rows() {
    let rows = w_table(alpha(0.0), PI, 40).unwrap();
    assert_eq!(rows.len(), 39);
    assert_eq!(rows[0].0, 2);
    assert!(rows.windows(2).all(|w| w[1].1 < w[0].1));
    // W_k tends to -theta as k grows
    assert!((rows[38].1 + theta(alpha(0.0), PI)).abs() < 1e-6);
}

proptest! {
    #[test]
    fn random_perturbation_is_below_w2(
        tail in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..30), a in -0.9f64..10.0, s in 0.05f64..50.0,
    ) {
        let a = alpha(a);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2];
        coeffs.extend(tail.iter().map(|(x, y)| Complex64::new(*x, *y)));
        let n: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(n > 1e-6);
        for c in coeffs.iter_mut() {
            *c /= n;
        }
        let v = second_variation(a, s, &coeffs).unwrap();
        prop_assert!(v <= w2_closed(a, s) * (1.0 - 1e-12));
    }

    #[test]
    fn closed_deficit_is_between_zero_and_factor(eps in 0.0f64..10.0, a in -0.99f64..20.0, s in 0.01f64..100.0) {
        let a = alpha(a);
        let d = sharpness_deficit_closed(a, s, eps).unwrap();
        let f = deficit_factor(a, s).unwrap();
        prop_assert!(d >= 0.0 && d <= f);
        prop_assert!(f > 0.0 && f < 1.0 + 1e-12);
    }
}
