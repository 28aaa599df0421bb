//! Batch experiments behind the CLI. Rows are computed on the rayon pool
//! and collected in index order, so reports are reproducible byte for byte.

use std::f64::consts::PI;

use hypconc_core::asymptotics::{c_limit, deficit_factor, second_variation_w, sharpness_deficit_closed, SharpnessFamily};
use hypconc_core::bergman::BergmanFunction;
use hypconc_core::concentration::{deficit, lambda_max, localization_matrix, theta, LocalizationMatrix};
use hypconc_core::hyperbolic::{centered_radius_sq, pseudo_disc, HyperbolicSet};
use hypconc_core::limits::{
    fock_limit_experiment, gaps_decreasing, hardy_deficit, hardy_limit_experiment, FockFunction, HardyFunction, PlaneSet,
};
use hypconc_core::quadrature::{QuadratureGrid, Weight};
use hypconc_core::specfun::{basis_norm_c, reg_inc_beta};
use hypconc_core::stability::{
    audit_proof_inequalities, check_stability_function, check_stability_set, distance_to_extremals, extremal_overlap,
    family_constant_limit, k_s_alpha, AuditSweep,
};
use hypconc_core::transforms::{
    bergman_transform, halfplane_ball, t_alpha_function, wavelet_deficit, BridgeResolution, HalfPlaneSignal,
    SPECTRAL_NODES,
};
use hypconc_core::{AlphaParam, Complex64};
use rand::Rng;
use rayon::prelude::*;

use crate::families::{random_function, random_mask, stream_rng};
use crate::format::{GridSpec, Report, Result};

/// Hard tolerance on negative deficits.
pub const DEFICIT_FLOOR: f64 = -1e-9;

fn b(v: bool) -> f64 {
    if v {
        1.0
    } else {
        0.0
    }
}

fn alpha_param(a: AlphaParam) -> f64 {
    a.alpha()
}

/// Random grid masks of budget `s`, each with `functions` random functions.
/// Violations: a deficit below `DEFICIT_FLOOR` or `lambda > theta + 1e-8`.
pub fn faberkrahn(alpha: AlphaParam, s: f64, sets: usize, functions: usize, grid: GridSpec, n: usize, seed: u64) -> Result<Report> {
    let g = grid.build()?;
    let blocks: Vec<Vec<Vec<f64>>> = (0..sets)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let set = HyperbolicSet::Mask(random_mask(&mut rng, &g, s));
            let (lam, _) = lambda_max(&localization_matrix(alpha, &set, n)?)?;
            (0..functions)
                .map(|j| {
                    let f = random_function(&mut rng, alpha);
                    let d = deficit(&f, &set)?;
                    Ok(vec![i as f64, j as f64, d.s, lam, d.theta, d.deficit])
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut rep = Report::new("faberkrahn", &["set_id", "function_id", "mu", "lambda", "theta", "deficit"])
        .param("alpha", alpha_param(alpha))
        .param("s", s)
        .param("sets", sets)
        .param("functions", functions)
        .param("grid", grid)
        .param("N", n)
        .param("seed", seed);
    for row in blocks.into_iter().flatten() {
        let k = rep.rows.len();
        if row[5] < DEFICIT_FLOOR {
            rep.flag(k, format!("deficit {:e} below {DEFICIT_FLOOR:e}", row[5]));
        }
        if row[3] > row[4] + 1e-8 {
            rep.flag(k, format!("lambda {} exceeds theta {}", row[3], row[4]));
        }
        rep.push(row);
    }
    Ok(rep)
}

/// Localization matrix of the centered disc of measure `s`: one row per
/// basis index with the diagonal, its closed form `I_{r^2}(k+1, alpha+1)`,
/// the largest off-diagonal modulus in that row and the `k`-th eigenvalue.
pub fn operator(alpha: AlphaParam, s: f64, n: usize) -> Result<(Report, LocalizationMatrix)> {
    let set = pseudo_disc(Complex64::new(0.0, 0.0), s)?;
    let t = localization_matrix(alpha, &set, n)?;
    let (lam, _) = lambda_max(&t)?;
    let th = theta(alpha, s);
    let x = centered_radius_sq(s);
    let eig = hypconc_core::linalg::eigh(&t.matrix)?;
    let mut rep = Report::new("operator", &["k", "diag", "diag_closed", "offdiag_max", "eigenvalue"])
        .param("alpha", alpha_param(alpha))
        .param("s", s)
        .param("N", n)
        .param("lambda_max", lam)
        .param("theta", th);
    for k in 0..n {
        let diag = t.matrix.get(k, k).re;
        let closed = reg_inc_beta(x, k as f64 + 1.0, alpha.plus_one())?;
        let off = (0..n).filter(|j| *j != k).map(|j| t.matrix.get(k, j).norm()).fold(0.0, f64::max);
        if (diag - closed).abs() > 1e-10 {
            rep.flag(k, format!("diagonal {diag} differs from {closed}"));
        }
        if off > 1e-10 {
            rep.flag(k, format!("off-diagonal entry {off:e}"));
        }
        rep.push(vec![k as f64, diag, closed, off, eig.values[n - 1 - k]]);
    }
    if (lam - th).abs() > 1e-10 {
        rep.flag(0, format!("lambda_max {lam} differs from theta {th}"));
    }
    Ok((rep, t))
}

/// Random unit functions on random pseudo-discs of measure `s` with the
/// distance bound tested at constant `c`. A failed bound is a witness that
/// `c` is too small for this pair.
pub fn stability_fn(alpha: AlphaParam, s: f64, c: f64, samples: usize, seed: u64) -> Result<Report> {
    let rows: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let f = random_function(&mut rng, alpha);
            let center = Complex64::from_polar(0.7 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            let r = check_stability_function(&f, &pseudo_disc(center, s)?, c)?;
            Ok(vec![
                i as f64,
                r.a0_sq,
                r.distance,
                r.deficit,
                r.lhs_over_sqrt_deficit,
                r.m_alpha_s,
                b(r.bound_holds),
                r.empirical_c,
            ])
        })
        .collect::<Result<_>>()?;
    let mut rep = Report::new(
        "stability-fn",
        &["sample", "a0_sq", "distance", "deficit", "ratio", "m_alpha_s", "bound_holds", "empirical_c"],
    )
    .param("alpha", alpha_param(alpha))
    .param("s", s)
    .param("C", c)
    .param("samples", samples)
    .param("seed", seed);
    for row in rows {
        let k = rep.rows.len();
        if row[3] < DEFICIT_FLOOR {
            rep.flag(k, format!("deficit {:e} below {DEFICIT_FLOOR:e}", row[3]));
        }
        if row[6] == 0.0 {
            rep.flag(k, format!("distance {} exceeds sqrt(M deficit) at C = {c}", row[2]));
        }
        rep.push(row);
    }
    Ok(rep)
}

/// Random masks against their own best function (the top eigenvector of
/// the localization matrix). The asymmetry is a heuristic upper bound.
pub fn stability_set(alpha: AlphaParam, s: f64, c: f64, sets: usize, grid: GridSpec, n: usize, seed: u64) -> Result<Report> {
    let g = grid.build()?;
    let rows: Vec<Vec<f64>> = (0..sets)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let set = HyperbolicSet::Mask(random_mask(&mut rng, &g, s));
            let (lam, f) = lambda_max(&localization_matrix(alpha, &set, n)?)?;
            let r = check_stability_set(&f, &set)?;
            let mu = hypconc_core::hyperbolic::mu_measure(&set);
            let k = k_s_alpha(alpha, mu, c)?;
            Ok(vec![i as f64, mu, lam, r.asymmetry, r.deficit, r.bound_ratio, k, b(r.equality_violation)])
        })
        .collect::<Result<_>>()?;
    let mut rep = Report::new(
        "stability-set",
        &["set_id", "mu", "lambda", "asymmetry", "deficit", "ratio", "k_s_alpha", "equality_violation"],
    )
    .param("alpha", alpha_param(alpha))
    .param("s", s)
    .param("C", c)
    .param("sets", sets)
    .param("grid", grid)
    .param("N", n)
    .param("seed", seed);
    for row in rows {
        let k = rep.rows.len();
        if row[7] != 0.0 {
            rep.flag(k, format!("zero deficit with asymmetry {}", row[3]));
        }
        if row[4] < DEFICIT_FLOOR {
            rep.flag(k, format!("deficit {:e} below {DEFICIT_FLOOR:e}", row[4]));
        }
        rep.push(row);
    }
    Ok(rep)
}

/// The two-mode family `(1, 0, eps)` on the centered disc of measure `s`.
/// `ratio = distance / deficit^{1/2}` should approach `target = c^{-1/2}`.
pub fn sharpness(alpha: AlphaParam, s: f64, eps: &[f64]) -> Result<Report> {
    let set = pseudo_disc(Complex64::new(0.0, 0.0), s)?;
    let c = deficit_factor(alpha, s)?;
    let target = c.powf(-0.5);
    let rows: Vec<Vec<f64>> = eps
        .par_iter()
        .map(|&e| {
            let f = SharpnessFamily::new(alpha, e)?.function();
            let dist = distance_to_extremals(&f)?;
            let d = deficit(&f, &set)?.deficit;
            let closed = sharpness_deficit_closed(alpha, s, e)?;
            Ok(vec![e, dist, d, closed, dist / e, d / (e * e), c, dist / d.sqrt(), target])
        })
        .collect::<Result<_>>()?;
    let mut rep = Report::new(
        "sharpness",
        &["eps", "distance", "deficit", "deficit_closed", "distance_over_eps", "deficit_over_eps2", "c_alpha", "ratio", "target"],
    )
    .param("alpha", alpha_param(alpha))
    .param("s", s)
    .param("eps", eps)
    .param("c_limit", c_limit(s)?);
    for row in rows {
        let k = rep.rows.len();
        if row[2] < DEFICIT_FLOOR {
            rep.flag(k, format!("deficit {:e} below {DEFICIT_FLOOR:e}", row[2]));
        }
        rep.push(row);
    }
    Ok(rep)
}

/// Checks `a`-`f` are numbered 0-5 in the `check` column.
pub fn audit(sweep: &AuditSweep) -> Result<Report> {
    let rows = audit_proof_inequalities(sweep)?;
    let mut rep = Report::new(
        "audit",
        &["check", "alpha", "a0_sq", "c0", "c", "margin", "witness", "applicable", "pass"],
    )
    .param("checks", "abcdef")
    .param("slack", sweep.slack)
    .param("alpha_plus_one", &sweep.alpha_plus_one)
    .param("a0_sq", &sweep.a0_sq)
    .param("c0", &sweep.c0)
    .param("c", &sweep.c);
    for (k, r) in rows.iter().enumerate() {
        let id = r.check.id();
        if !r.pass {
            rep.flag(k, format!("check ({id}) margin {:e} at witness {}", r.margin, r.witness));
        }
        rep.push(vec![
            (id as u8 - b'a') as f64,
            r.alpha,
            r.a0_sq,
            r.c0,
            r.c,
            r.margin,
            r.witness,
            b(r.applicable),
            b(r.pass),
        ]);
    }
    Ok(rep)
}

/// Embedded `F = 1` on the rescaled Euclidean disc of the given area.
pub fn fock(area: f64, alphas: &[f64]) -> Result<Report> {
    let set = PlaneSet::disc_of_area(Complex64::new(0.0, 0.0), area)?;
    let rows = fock_limit_experiment(&FockFunction::constant(), &set, alphas)?;
    let mut rep = Report::new("limits-fock", &["alpha", "s_alpha", "value", "target", "gap"])
        .param("area", area)
        .param("alphas", alphas);
    for r in &rows {
        rep.push(vec![r.alpha, r.s_alpha, r.value, r.target, r.gap]);
    }
    if !gaps_decreasing(&rows) {
        let k = rows.windows(2).position(|w| w[1].gap >= w[0].gap).map_or(0, |k| k + 1);
        rep.flag(k, "gap does not decrease");
    }
    Ok(rep)
}

/// `theta/(alpha+1)` and the stability constant against their `alpha -> -1`
/// limits, with the Hardy deficit of `f = 1` on the centered disc.
pub fn hardy(s_grid: &[f64], plus_ones: &[f64]) -> Result<Report> {
    let rows = hardy_limit_experiment(s_grid, plus_ones)?;
    let one = HardyFunction::from_real(&[1.0])?;
    let mut rep = Report::new(
        "limits-hardy",
        &["s", "alpha", "theta_ratio", "log_target", "constant", "constant_target", "hardy_deficit"],
    )
    .param("s", s_grid)
    .param("alpha_plus_one", plus_ones);
    for r in rows {
        let d = hardy_deficit(&one, &pseudo_disc(Complex64::new(0.0, 0.0), r.s)?)?;
        let k = rep.rows.len();
        if d.abs() > 1e-8 {
            rep.flag(k, format!("Hardy deficit of the constant is {d:e}"));
        }
        rep.push(vec![r.s, r.alpha, r.theta_ratio, r.log_target, r.constant, r.constant_target, d]);
    }
    Ok(rep)
}

/// Per `beta`: relative isometry error of the disk transfer on a two-atom
/// combination, then half-plane vs disk deficits on a matched ball and on a
/// displaced disc, with the measure transfer `mu = nu/4`.
pub fn transform_check(betas: &[f64]) -> Result<Report> {
    let rows: Vec<Vec<Vec<f64>>> = betas
        .par_iter()
        .map(|&beta| {
            let alpha = AlphaParam::new(2.0 * beta - 1.0)?;
            let f1 = HalfPlaneSignal::atom_with_rate(beta, Complex64::new(0.0, 1.0), SPECTRAL_NODES, 2.0)?;
            let f2 = HalfPlaneSignal::atom_with_rate(beta, Complex64::new(0.6, 1.2), SPECTRAL_NODES, 2.0)?;
            let mix = f1.combine(Complex64::new(1.0, 0.0), &f2, Complex64::new(-0.4, 0.7))?;
            let g = t_alpha_function(alpha, |z| bergman_transform(&mix, alpha, z).unwrap_or_default(), 96, 0.9)?;
            let iso = (g.norm_sq() / mix.norm_sq() - 1.0).abs();
            let zeta = Complex64::new(0.25, 1.0);
            let f = HalfPlaneSignal::atom(beta, zeta, SPECTRAL_NODES)?;
            let (c, r) = halfplane_ball(Complex64::new(-zeta.re, zeta.im), 4.0 * PI)?;
            [(c, r), (c + 0.3, 0.8 * r)]
                .iter()
                .enumerate()
                .map(|(j, (c, r))| {
                    let d = wavelet_deficit(&f, beta, *c, *r, BridgeResolution::default())?;
                    Ok(vec![
                        beta,
                        j as f64,
                        iso,
                        d.nu,
                        d.mu,
                        (d.mu - d.nu / 4.0).abs() / d.nu,
                        d.half_plane,
                        d.disk,
                        (d.half_plane - d.disk).abs(),
                    ])
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut rep = Report::new(
        "transform-check",
        &["beta", "set", "isometry_err", "nu", "mu", "mu_rel_err", "deficit_half_plane", "deficit_disk", "deficit_err"],
    )
    .param("betas", betas)
    .param("spectral_nodes", SPECTRAL_NODES);
    for row in rows.into_iter().flatten() {
        let k = rep.rows.len();
        if row[2] > 1e-5 {
            rep.flag(k, format!("isometry error {:e}", row[2]));
        }
        if row[5] > 1e-6 {
            rep.flag(k, format!("measure transfer error {:e}", row[5]));
        }
        if row[8] > 1e-5 {
            rep.flag(k, format!("deficit routes differ by {:e}", row[8]));
        }
        rep.push(row);
    }
    Ok(rep)
}

/// `W_k` recomputed from its defining pieces by area quadrature on the
/// centered disc: the `k`-th basis mass, minus `theta` as the constant's
/// mass, plus the boundary term.
pub fn w_quadrature(alpha: AlphaParam, s: f64, k: usize, grid: &QuadratureGrid) -> Result<f64> {
    let w = Weight::Bergman(alpha);
    let mass = |p: i32| -> Result<f64> {
        let v = grid.sample(|z| Complex64::new(z.norm_sqr().powi(p), 0.0));
        Ok(grid.integrate(&v, w)?.re)
    };
    let x = centered_radius_sq(s);
    let first = mass(k as i32)? / basis_norm_c(k, alpha);
    let th = mass(0)? / basis_norm_c(0, alpha);
    let third = PI / (alpha.plus_two() * basis_norm_c(k, alpha)) * (1.0 - x).powf(alpha.plus_one()) * x.powi(k as i32);
    Ok(first - th + third)
}

/// Area rule on the centered disc of measure `s`.
pub fn disc_grid(s: f64, nodes: usize) -> Result<QuadratureGrid> {
    let x = centered_radius_sq(s);
    Ok(QuadratureGrid::from_breaks(vec![1.0, 1.0 - 0.5 * x, 1.0 - x], nodes, 8)?)
}

/// CSV table `(alpha, s, k, W_k, W_k_quadrature, rel_err)` for `k = 2..=k_max`.
pub fn w_table(alpha: AlphaParam, s: f64, k_max: usize) -> Result<Report> {
    let grid = disc_grid(s, 64)?;
    let rows: Vec<Vec<f64>> = (2..=k_max)
        .into_par_iter()
        .map(|k| {
            let w = second_variation_w(alpha, s, k)?;
            let q = w_quadrature(alpha, s, k, &grid)?;
            Ok(vec![alpha.alpha(), s, k as f64, w, q, ((q - w) / w).abs()])
        })
        .collect::<Result<_>>()?;
    let mut rep = Report::new("w-table", &["alpha", "s", "k", "W_k", "W_k_quadrature", "rel_err"])
        .param("alpha", alpha_param(alpha))
        .param("s", s)
        .param("k_max", k_max);
    for row in rows {
        let k = rep.rows.len();
        if !(row[3] < 0.0) {
            rep.flag(k, format!("W_{} = {} is not negative", row[2], row[3]));
        }
        if k > 0 && !(row[3] < rep.rows[k - 1][3]) {
            rep.flag(k, format!("W_{} does not decrease", row[2]));
        }
        rep.push(row);
    }
    Ok(rep)
}

/// Least stability constant demanded by one `(f, Omega)` pair, with
/// `Omega` the pseudo-disc of measure `s` centered at the point where `f`
/// is closest to a normalized kernel.
pub fn probe_constant(f: &BergmanFunction, s: f64) -> Result<f64> {
    let (_, omega) = extremal_overlap(f)?;
    Ok(check_stability_function(f, &pseudo_disc(omega, s)?, 1.0)?.empirical_c)
}

/// Perturbation of the constant by `eta` times a random unit tail without
/// constant or linear term.
pub fn near_extremal<R: Rng>(rng: &mut R, alpha: AlphaParam, eta: f64) -> Result<BergmanFunction> {
    let tail = random_function(rng, alpha);
    let mut c: Vec<Complex64> = tail.coeffs().to_vec();
    c.resize(c.len().max(3), Complex64::new(0.0, 0.0));
    c[0] = Complex64::new(0.0, 0.0);
    c[1] = Complex64::new(0.0, 0.0);
    let n: f64 = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 {
        c[2] = Complex64::new(1.0, 0.0);
    } else {
        c.iter_mut().for_each(|z| *z /= n);
    }
    c.iter_mut().for_each(|z| *z *= eta);
    c[0] = Complex64::new(1.0, 0.0);
    Ok(BergmanFunction::new(alpha, c)?)
}

/// Minimal empirical stability constant per `alpha`: the larger of the
/// two-mode family limit and the worst of `probes` random pairs (half of
/// them random functions, half random perturbations of the constant).
pub fn constant_sweep(s: f64, alphas: &[f64], probes: usize, seed: u64) -> Result<Report> {
    let rows: Vec<Vec<f64>> = alphas
        .par_iter()
        .enumerate()
        .map(|(i, &a)| {
            let alpha = AlphaParam::new(a)?;
            let limit = family_constant_limit(alpha, s)?;
            let mut rng = stream_rng(seed, i as u64);
            let mut worst = 0.0f64;
            for p in 0..probes {
                let f = if p % 2 == 0 {
                    random_function(&mut rng, alpha)
                } else {
                    let eta = 10f64.powf(rng.gen_range(-3.0..-1.0));
                    near_extremal(&mut rng, alpha, eta)?
                };
                worst = worst.max(probe_constant(&f, s)?);
            }
            Ok(vec![a, limit, worst, limit.max(worst)])
        })
        .collect::<Result<_>>()?;
    let mut rep = Report::new("constant-sweep", &["alpha", "family_limit", "probe_max", "empirical_c"])
        .param("s", s)
        .param("alphas", alphas)
        .param("probes", probes)
        .param("seed", seed);
    for row in rows {
        rep.push(row);
    }
    Ok(rep)
}
