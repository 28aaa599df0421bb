//! Quantitative stability: distance of a function to the manifold of
//! normalized reproducing kernels, the constants `M_alpha(s)` and
//! `K(s, alpha)`, the distribution-function estimate near extremals, the
//! rearrangement gap, enclosing balls for near-optimal sets and an audit of
//! the scalar inequalities used along the way.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::asymptotics::{sigma_threshold, w2_closed};
use crate::bergman::{from_w, kernel_function, to_w, v_star, v_star_inverse, BergmanFunction, DensityProfile};
use crate::concentration::{deficit, theta, theta_over_plus_one};
use crate::error::{domain, Error, Result};
use crate::hyperbolic::{asymmetry, HyperbolicSet};
use crate::optimize::{brent_root, nelder_mead};
use crate::quadrature::QuadratureGrid;
use crate::specfun::{pow1p_minus_one_over, AlphaParam};

/// Upper end of the search window for the crossing of `u*` and `v*`.
pub const CROSSING_CAP: f64 = 1e3;

/// Unique root in `(0, 1)` of `(t - t^2/256)^2 - 1 + t/(1 + t^2/256)`,
/// the smallest admissible `c_0` in the distribution-function estimate.
pub fn c0_tilde() -> f64 {
    let g = |t: f64| {
        let q = t * t / 256.0;
        (t - q) * (t - q) - 1.0 + t / (1.0 + q)
    };
    brent_root(g, 0.1, 1.0, 1e-15).expect("sign change on [0.1, 1]")
}

fn unit(f: &BergmanFunction) -> Result<BergmanFunction> {
    Ok(f.normalized()?.0)
}

/// `sup_omega |<f, f_omega>|^2 = pi/(alpha+1) max u` for `f / ||f||`, with the
/// maximizing point. A hyperbolic polar scan seeds simplex refinements.
pub fn extremal_overlap(f: &BergmanFunction) -> Result<(f64, Complex64)> {
    let f = unit(f)?;
    let mut cand: Vec<(f64, Complex64)> = Vec::new();
    let angles = 48;
    for k in 0..=60 {
        let r = (0.08 * k as f64).tanh();
        let n = if k == 0 { 1 } else { angles };
        for j in 0..n {
            let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / angles as f64);
            cand.push((f.u_density(z), z));
        }
    }
    cand.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
    let (mut best, mut arg) = cand[0];
    for (_, z0) in cand.iter().take(4) {
        let res = nelder_mead(|w| -f.u_density(from_w(w)), &to_w(*z0), 0.05, 1e-13, 4000);
        if -res.value > best {
            best = -res.value;
            arg = from_w(&res.x);
        }
    }
    let a0_sq = (PI / f.alpha().plus_one() * best).min(1.0);
    Ok((a0_sq, arg))
}

/// `inf_{|c| = 1, omega} ||f - c f_omega|| / ||f||
///  = sqrt(2 (1 - sqrt(a0^2)))`.
pub fn distance_to_extremals(f: &BergmanFunction) -> Result<f64> {
    let (a0_sq, _) = extremal_overlap(f)?;
    Ok((2.0 * (1.0 - a0_sq.sqrt())).max(0.0).sqrt())
}

/// `||f - e^{i phi} f_omega||^2` for unit `f`, summed over coefficients with
/// the kernel's truncation tail added.
fn coefficient_distance_sq(f: &BergmanFunction, omega: Complex64, phi: f64) -> f64 {
    if !(omega.norm() < 1.0) {
        return 4.0;
    }
    let n = f.len().max(crate::bergman::DEFAULT_TRUNCATION);
    let k = match kernel_function(f.alpha(), omega, n) {
        Ok(k) => k,
        Err(_) => return 4.0,
    };
    let c = Complex64::from_polar(1.0, phi);
    let a = f.coeffs();
    let b = k.function.coeffs();
    let mut acc = k.tail;
    for (i, bi) in b.iter().enumerate().take(n) {
        let ai = a.get(i).copied().unwrap_or_default();
        acc += (ai - c * bi).norm_sqr();
    }
    acc
}

/// Distance to the extremal manifold by direct minimization over the kernel
/// point and the phase, never touching the density `u`. The polar scan keeps
/// the best phase per node; the `REFINED` best nodes that are local minima
/// of the scan are each polished by Nelder-Mead, since the landscape can
/// have several basins.
pub fn distance_brute_force(f: &BergmanFunction) -> Result<(f64, Complex64)> {
    const RINGS: usize = 40;
    const SPOKES: usize = 32;
    const REFINED: usize = 6;
    let f = unit(f)?;
    // scan[k][j]: best (value, phase) at ring k and spoke j; ring 0 is the origin
    let mut scan = vec![[(f64::INFINITY, 0.0); SPOKES]; RINGS + 1];
    for (k, ring) in scan.iter_mut().enumerate() {
        let r = (0.1 * k as f64).tanh();
        for (j, cell) in ring.iter_mut().enumerate() {
            if k == 0 && j > 0 {
                break;
            }
            let omega = Complex64::from_polar(r, 2.0 * PI * j as f64 / SPOKES as f64);
            for p in 0..8 {
                let phi = 2.0 * PI * p as f64 / 8.0;
                let d = coefficient_distance_sq(&f, omega, phi);
                if d < cell.0 {
                    *cell = (d, phi);
                }
            }
        }
    }
    let at = |k: usize, j: usize| if k == 0 { scan[0][0].0 } else { scan[k][j % SPOKES].0 };
    let mut seeds: Vec<(f64, usize, usize)> = Vec::new();
    for k in 0..=RINGS {
        for j in 0..(if k == 0 { 1 } else { SPOKES }) {
            let v = at(k, j);
            let inner = if k == 0 { f64::INFINITY } else { at(k - 1, j) };
            let outer = if k == RINGS { f64::INFINITY } else { at(k + 1, j) };
            let side = if k == 0 { f64::INFINITY } else { at(k, j + 1).min(at(k, j + SPOKES - 1)) };
            if v <= inner && v <= outer && v <= side {
                seeds.push((v, k, j));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let obj = |x: &[f64]| coefficient_distance_sq(&f, from_w(&x[..2]), x[2]);
    let mut best = (f64::INFINITY, vec![0.0; 3]);
    for &(v, k, j) in seeds.iter().take(REFINED) {
        let omega = Complex64::from_polar((0.1 * k as f64).tanh(), 2.0 * PI * j as f64 / SPOKES as f64);
        let w = to_w(omega);
        let mut x = vec![w[0], w[1], scan[k][j].1];
        let mut val = v;
        for step in [0.1, 1e-3] {
            let res = nelder_mead(obj, &x, step, 1e-14, 6000);
            if res.value <= val {
                val = res.value;
                x = res.x;
            }
        }
        if val < best.0 {
            best = (val, x);
        }
    }
    Ok((best.0.max(0.0).sqrt(), from_w(&best.1[..2])))
}

/// Outcome of the reproducing-kernel comparison at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RkhsCheck {
    /// `(||f||^2 - |f(x)|^2 / K(x,x)) / ||f||^2`.
    pub delta: f64,
    /// `||f - c f_x||` with `c = ||f|| f(x)/|f(x)|`.
    pub distance: f64,
    /// `sqrt(2) ||f|| delta^{1/2}`.
    pub bound: f64,
    pub holds: bool,
}

/// Compare `f` with the multiple of the normalized kernel at `x` that shares
/// its phase there.
pub fn rkhs_delta(f: &BergmanFunction, x: Complex64) -> Result<RkhsCheck> {
    if !(x.norm() < 1.0) {
        return Err(domain("RKHS point must lie in the open disk"));
    }
    let norm = f.norm();
    if !(norm > 0.0) {
        return Err(domain("RKHS check needs a nonzero function"));
    }
    let fx = f.eval(x);
    let reduced = PI / f.alpha().plus_one() * f.u_density(x);
    let delta = ((norm * norm - reduced) / (norm * norm)).clamp(0.0, 1.0);
    let c = if fx.norm() > 0.0 { fx / fx.norm() * norm } else { Complex64::new(norm, 0.0) };
    let n = f.len().max(crate::bergman::DEFAULT_TRUNCATION);
    let k = kernel_function(f.alpha(), x, n)?;
    let pairing: Complex64 = f.coeffs().iter().zip(k.function.coeffs()).map(|(a, b)| a * b.conj()).sum();
    let dist_sq = (norm * norm + c.norm_sqr() - 2.0 * (c.conj() * pairing).re).max(0.0);
    let distance = dist_sq.sqrt();
    let bound = core::f64::consts::SQRT_2 * norm * delta.sqrt();
    let holds = distance <= bound + 1e-12 * norm;
    Ok(RkhsCheck { delta, distance, bound, holds })
}

/// `M_alpha(s) = C (1 + (alpha+2)/(alpha+1) [(1+s/pi)^{alpha+1} - 1])`.
pub fn m_alpha_s(alpha: AlphaParam, s: f64, c: f64) -> Result<f64> {
    if !(s > 0.0 && c > 0.0) {
        return Err(domain("M_alpha(s) needs s > 0 and C > 0"));
    }
    Ok(c * (1.0 + alpha.plus_two() * pow1p_minus_one_over(alpha.plus_one(), s / PI)))
}

/// Natural logarithm of `M_alpha(s)`, finite where `M` itself overflows.
pub fn ln_m_alpha_s(alpha: AlphaParam, s: f64, c: f64) -> Result<f64> {
    let m = m_alpha_s(alpha, s, c)?;
    if m.is_finite() {
        return Ok(m.ln());
    }
    // (alpha+2)/(alpha+1) (1+s/pi)^{alpha+1} dominates
    let b = alpha.plus_one();
    Ok(c.ln() + (alpha.plus_two() / b).ln() + b * (s / PI).ln_1p())
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Logarithms of the three terms of `K(s, alpha)`:
/// `C/s * pi theta/((alpha+1) M)`, `C/s * (1+s/pi)^{3 alpha+5}/(alpha+2)` and
/// `2 M^{1/2} (1 + C(alpha+2))/(C(alpha+2)) (1+s/pi)^{alpha+2}`.
pub fn k_terms_ln(alpha: AlphaParam, s: f64, c: f64) -> Result<[f64; 3]> {
    let ln_m = ln_m_alpha_s(alpha, s, c)?;
    let l = (s / PI).ln_1p();
    let p = alpha.plus_two();
    let cs = c.ln() - s.ln();
    let t1 = cs + (PI * theta_over_plus_one(alpha, s)).ln() - ln_m;
    let t2 = cs + (3.0 * alpha.alpha() + 5.0) * l - p.ln();
    let t3 = core::f64::consts::LN_2 + 0.5 * ln_m + ((1.0 + c * p) / (c * p)).ln() + p * l;
    Ok([t1, t2, t3])
}

/// Logarithm of `K(s, alpha)`.
pub fn ln_k_s_alpha(alpha: AlphaParam, s: f64, c: f64) -> Result<f64> {
    Ok(log_sum_exp(&k_terms_ln(alpha, s, c)?))
}

/// The set-stability constant `K(s, alpha)` at absolute constant `C`.
pub fn k_s_alpha(alpha: AlphaParam, s: f64, c: f64) -> Result<f64> {
    Ok(ln_k_s_alpha(alpha, s, c)?.exp())
}

/// `lim_{alpha -> -1} K(s, alpha)
///  = (pi L/(1+L) + C (1+s/pi)^2)/s + 2 (1+C)/C sqrt(C (1+L)) (1+s/pi)`,
/// `L = ln(1+s/pi)`.
pub fn k_limit(s: f64, c: f64) -> Result<f64> {
    if !(s > 0.0 && c > 0.0) {
        return Err(domain("K limit needs s > 0 and C > 0"));
    }
    let l = (s / PI).ln_1p();
    let q = 1.0 + s / PI;
    Ok((PI * l / (1.0 + l) + c * q * q) / s + 2.0 * (1.0 + c) / c * (c * (1.0 + l)).sqrt() * q)
}

/// A unit-norm function moved so that its density peaks at the origin, with
/// `f(0) > 0`.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub function: BergmanFunction,
    /// Original location of the density peak.
    pub peak: Complex64,
    pub a0_sq: f64,
}

/// Möbius shift and phase rotation that leave the density profile intact.
pub fn normalize(f: &BergmanFunction) -> Result<Normalized> {
    let (a0_sq, peak) = extremal_overlap(f)?;
    let g = unit(f)?.mobius_transport(-peak)?;
    let g0 = g.coeffs()[0];
    let g = if g0.norm() > 0.0 { g.scaled(g0.conj() / g0.norm()) } else { g };
    Ok(Normalized { function: g, peak, a0_sq })
}

/// Distribution function against the near-extremal bound.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperLevelAudit {
    pub a0_sq: f64,
    pub k0: f64,
    /// `max_t rho(t) / bound(t)` over the sampled window; `None` when the
    /// hypothesis `a0^2 > c0` fails.
    pub max_ratio: Option<f64>,
    /// `(t, rho, bound)` samples.
    pub samples: Vec<(f64, f64, f64)>,
    pub hypothesis_met: bool,
}

/// Compare `rho(t)` with
/// `pi (1 + K0 (1-a0^2))/a0^2 (((alpha+1) a0^2/(pi t))^{1/(alpha+2)} - 1)`,
/// `K0 = C/c0^3`, on `points` interior levels of `((alpha+1)c0/pi, (alpha+1)a0^2/pi)`.
pub fn check_superlevel_bound(
    f: &BergmanFunction,
    c0: f64,
    c_probe: f64,
    grid: &QuadratureGrid,
    rays: usize,
    points: usize,
) -> Result<SuperLevelAudit> {
    let ct = c0_tilde();
    if !(c0 > ct && c0 < 1.0) {
        return Err(domain(alloc::format!("c0 = {c0} must lie in ({ct:.4}, 1)")));
    }
    if !(c_probe > 0.0) {
        return Err(domain("C probe must be positive"));
    }
    let alpha = f.alpha();
    let norm = normalize(f)?;
    let prof = DensityProfile::new(&norm.function, grid, rays)?;
    let a0_sq = (PI / alpha.plus_one() * prof.max_u()).min(1.0);
    let k0 = c_probe / (c0 * c0 * c0);
    let d0 = 1.0 - a0_sq;
    if !(a0_sq > c0) {
        return Ok(SuperLevelAudit { a0_sq, k0, max_ratio: None, samples: Vec::new(), hypothesis_met: false });
    }
    let b = alpha.plus_one();
    let (lo, hi) = (b * c0 / PI, b * a0_sq / PI);
    let mut samples = Vec::with_capacity(points);
    let mut worst = f64::NEG_INFINITY;
    for i in 1..=points {
        let t = lo + (hi - lo) * i as f64 / (points + 1) as f64;
        let rho = prof.rho(t)?;
        let bound = PI * (1.0 + k0 * d0) / a0_sq * ((hi / t).ln() / alpha.plus_two()).exp_m1();
        worst = worst.max(rho / bound);
        samples.push((t, rho, bound));
    }
    Ok(SuperLevelAudit { a0_sq, k0, max_ratio: Some(worst), samples, hypothesis_met: true })
}

/// `int_0^{s*} (v* - u*) ds` at the first crossing `s*` of the two
/// rearrangements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RearrangementGap {
    pub gap: f64,
    pub s_star: f64,
    /// False when no crossing occurs below [`CROSSING_CAP`].
    pub crossing_found: bool,
    pub a0_sq: f64,
}

/// The integral equals `theta(s*) - int_{u > t*} u dmu` with `t* = u*(s*)`.
pub fn rearrangement_gap(f: &BergmanFunction, grid: &QuadratureGrid, rays: usize) -> Result<RearrangementGap> {
    let alpha = f.alpha();
    let prof = DensityProfile::centered(f, grid, rays)?;
    let top = prof.max_u();
    let a0_sq = (PI / alpha.plus_one() * top).min(1.0);
    let gap_at = |t: f64| -> Result<(f64, f64)> {
        let s = prof.rho(t)?;
        Ok((theta(alpha, s) - prof.level_integral(t)?, s))
    };
    let h = |t: f64| -> Result<f64> { Ok(prof.rho(t)? - v_star_inverse(alpha, t)) };
    let t_floor = v_star(alpha, CROSSING_CAP)?;
    // walk down from the peak; the first sign change brackets t*
    let mut prev = top * (1.0 - 1e-9);
    if h(prev)? >= 0.0 {
        let (gap, s) = gap_at(prev)?;
        return Ok(RearrangementGap { gap, s_star: s, crossing_found: true, a0_sq });
    }
    loop {
        let t = (prev * 0.9).max(t_floor);
        let h_t = h(t)?;
        if h_t >= 0.0 {
            let t_star = brent_root(|x| h(x).unwrap_or(f64::NAN), t, prev, 1e-13 * top)?;
            let (gap, s) = gap_at(t_star)?;
            return Ok(RearrangementGap { gap, s_star: s, crossing_found: true, a0_sq });
        }
        if t <= t_floor {
            let (gap, _) = gap_at(t)?;
            return Ok(RearrangementGap { gap, s_star: CROSSING_CAP, crossing_found: false, a0_sq });
        }
        prev = t;
    }
}

/// Balls `L = {|z| < r_-}` and `E = {|z| < r_+}` sandwiching the optimal set
/// `A = {u > u*(s)}` of a normalized near-extremal function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnclosureReport {
    pub r_minus: f64,
    pub r_plus: f64,
    /// `||f - sqrt((alpha+1)/pi)||` after normalization.
    pub epsilon: f64,
    pub u_star: f64,
    /// `[L in A, A in E, L in E]` checked ray by ray.
    pub inclusion_ok: [bool; 3],
    /// `24 eps/(alpha+2) (1+s/pi)^{alpha+1}`, an upper bound for `r_+^2 - r_-^2`.
    pub width_bound: f64,
}

/// `r_pm^2 = 1 - [pi/(alpha+1) (u*(s) -+ 3 eps (alpha+1)/pi)]^{1/(alpha+2)}`.
pub fn enclosure_radii(f: &BergmanFunction, s: f64, grid: &QuadratureGrid, rays: usize) -> Result<EnclosureReport> {
    if !(s > 0.0) {
        return Err(domain("enclosure needs s > 0"));
    }
    let alpha = f.alpha();
    let g = normalize(f)?.function;
    let epsilon = {
        let a = g.coeffs();
        let mut e = (a[0] - 1.0).norm_sqr();
        for c in &a[1..] {
            e += c.norm_sqr();
        }
        e.sqrt()
    };
    let prof = DensityProfile::new(&g, grid, rays)?;
    let u_star = prof.u_star(s)?;
    let b = alpha.plus_one();
    let radius_sq = |level: f64| -> Result<f64> {
        let x = PI / b * level;
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Regime(alloc::format!(
                "epsilon = {epsilon:e} is too large for the enclosure at s = {s}"
            )));
        }
        Ok(-(x.ln() / alpha.plus_two()).exp_m1())
    };
    let shift = 3.0 * epsilon * b / PI;
    let rm2 = radius_sq(u_star + shift)?;
    let rp2 = radius_sq(u_star - shift)?;
    let tol = 1e-12;
    let (mut l_in_a, mut a_in_e) = (true, true);
    for j in 0..prof.ray_count() {
        let iv = prof.ray_intervals(j, u_star)?;
        match iv.first() {
            Some((a, bnd)) if *a == 0.0 => l_in_a &= *bnd >= rm2 - tol,
            _ => l_in_a &= rm2 <= 0.0,
        }
        a_in_e &= iv.iter().all(|(_, t)| *t <= rp2 + tol);
    }
    let width_bound = 24.0 * epsilon / alpha.plus_two() * (b * (s / PI).ln_1p()).exp();
    Ok(EnclosureReport {
        r_minus: rm2.max(0.0).sqrt(),
        r_plus: rp2.sqrt(),
        epsilon,
        u_star,
        inclusion_ok: [l_in_a, a_in_e, rm2 <= rp2],
        width_bound,
    })
}

/// Function stability at one pair `(f, Omega)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityReport {
    pub s: f64,
    pub a0_sq: f64,
    pub distance: f64,
    pub deficit: f64,
    pub m_alpha_s: f64,
    /// `distance / deficit^{1/2}`, zero for an exact extremal pair.
    pub lhs_over_sqrt_deficit: f64,
    /// `distance <= sqrt(M_alpha(s) deficit)`.
    pub bound_holds: bool,
    /// `(1 - a0^2) / (deficit M_alpha(s)|_{C=1})`, the least `C` this pair demands.
    pub empirical_c: f64,
}

pub fn check_stability_function(f: &BergmanFunction, set: &HyperbolicSet, c: f64) -> Result<StabilityReport> {
    let alpha = f.alpha();
    let (a0_sq, _) = extremal_overlap(f)?;
    let distance = (2.0 * (1.0 - a0_sq.sqrt())).max(0.0).sqrt();
    let rep = deficit(f, set)?;
    let s = rep.s;
    let m = m_alpha_s(alpha, s, c)?;
    let m1 = m_alpha_s(alpha, s, 1.0)?;
    let d = rep.deficit.max(0.0);
    // the distance comes from sqrt(1 - a0), so rounding alone leaves ~sqrt(eps)
    if d == 0.0 && distance > 4.0 * f64::EPSILON.sqrt() {
        return Err(Error::Regime(alloc::format!(
            "zero deficit with distance {distance:e} to the extremals"
        )));
    }
    let lhs_over_sqrt_deficit = if d == 0.0 { 0.0 } else { distance / d.sqrt() };
    let gap = 1.0 - a0_sq;
    let empirical_c = if d == 0.0 { 0.0 } else { gap / (d * m1) };
    Ok(StabilityReport {
        s,
        a0_sq,
        distance,
        deficit: rep.deficit,
        m_alpha_s: m,
        lhs_over_sqrt_deficit,
        bound_holds: distance <= (m * d).sqrt(),
        empirical_c,
    })
}

/// Set stability at one pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SetStabilityReport {
    pub asymmetry: f64,
    pub deficit: f64,
    /// `asymmetry / deficit^{1/2}`, zero when both vanish.
    pub bound_ratio: f64,
    /// Zero deficit with visible asymmetry.
    pub equality_violation: bool,
}

pub fn check_stability_set(f: &BergmanFunction, set: &HyperbolicSet) -> Result<SetStabilityReport> {
    let (asym, _) = asymmetry(set)?;
    let rep = deficit(f, set)?;
    let d = rep.deficit.max(0.0);
    let tol = 1e-6;
    let bound_ratio = if d == 0.0 {
        if asym <= tol {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        asym / d.sqrt()
    };
    Ok(SetStabilityReport { asymmetry: asym, deficit: rep.deficit, bound_ratio, equality_violation: d == 0.0 && asym > tol })
}

/// Least admissible constant for `1 - a0^2 <= C M_alpha(s)|_{C=1} delta`
/// along the two-mode family as `eps -> 0` on its own optimal sets:
/// `theta_alpha(s) / (|W_2(s)| M_alpha(s)|_{C=1})`.
pub fn family_constant_limit(alpha: AlphaParam, s: f64) -> Result<f64> {
    let w2 = w2_closed(alpha, s).abs();
    // theta/|W_2| in a form that survives alpha -> -1
    let b = alpha.plus_one();
    let y = crate::specfun::pow1p_neg(b, s / PI);
    let ratio = theta_over_plus_one(alpha, s) / (0.5 * y * s * (s + 2.0 * PI) / ((s + PI) * (s + PI)));
    debug_assert!(w2 >= 0.0);
    Ok(ratio / m_alpha_s(alpha, s, 1.0)?)
}

/// The same constant measured on `(1, 0, eps)` and its super-level set of
/// measure `s`, with the deficit from the density profile. Returns `None`
/// when the deficit is below what double precision resolves.
pub fn family_constant_numeric(
    alpha: AlphaParam,
    s: f64,
    eps: f64,
    grid: &QuadratureGrid,
    rays: usize,
) -> Result<Option<f64>> {
    let f = crate::asymptotics::SharpnessFamily::new(alpha, eps)?.function();
    let prof = DensityProfile::new(&f, grid, rays)?;
    let (_, mu, k) = prof.optimal_set(s)?;
    let th = theta(alpha, mu);
    let d = 1.0 - k / th;
    if !(d > 1e-10) {
        return Ok(None);
    }
    let gap = eps * eps / (1.0 + eps * eps);
    Ok(Some(gap / (d * m_alpha_s(alpha, mu, 1.0)?)))
}

/// One inequality of the audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AuditCheck {
    /// `r_n = 1 - d y^{1/n}/(y^{1/n} - a0^2)` decreases in `n`.
    A,
    /// The linear minorant `y~(s)` stays below `y(s)`.
    B,
    /// The crossing bound `s~` is dominated by `pi (1 + K0 d)/(K0 a0^2)`.
    C,
    /// The uniform bound stays below `exp(-1/(1+K0)) < 1`.
    D,
    /// The threshold `c*` solves `(alpha+2) c^{alpha+1} = 1` and `0.999 c*` fails.
    E,
    /// The power-series inequality at the crossing radius.
    F,
}

impl AuditCheck {
    pub fn id(self) -> char {
        match self {
            AuditCheck::A => 'a',
            AuditCheck::B => 'b',
            AuditCheck::C => 'c',
            AuditCheck::D => 'd',
            AuditCheck::E => 'e',
            AuditCheck::F => 'f',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditRow {
    pub check: AuditCheck,
    pub alpha: f64,
    pub a0_sq: f64,
    pub c0: f64,
    pub c: f64,
    /// Smallest slack observed; negative means violated.
    pub margin: f64,
    /// Where the smallest slack occurred (`n`, `s` or `t`).
    pub witness: f64,
    pub applicable: bool,
    pub pass: bool,
}

/// Parameter sweep for [`audit_proof_inequalities`].
#[derive(Clone, Debug, PartialEq)]
pub struct AuditSweep {
    pub alpha_plus_one: Vec<f64>,
    pub a0_sq: Vec<f64>,
    pub c0: Vec<f64>,
    pub c: Vec<f64>,
    pub slack: f64,
}

impl Default for AuditSweep {
    fn default() -> Self {
        let (lo, hi) = (0.01f64.ln(), 101f64.ln());
        let alpha_plus_one = (0..25).map(|i| (lo + (hi - lo) * i as f64 / 24.0).exp()).collect();
        Self {
            alpha_plus_one,
            a0_sq: vec![0.97, 0.98, 0.99, 0.995, 0.999, 0.9999],
            c0: vec![0.62, 0.7, 0.8, 0.95],
            c: vec![1.0, 10.0, 100.0],
            slack: 1e-9,
        }
    }
}

fn audit_a(big_a: f64, k0: f64) -> (f64, f64) {
    let d2 = 1.0 - big_a;
    let y = (1.0 + k0 * d2) / big_a;
    let r = |n: f64| {
        let p = (y.ln() / n).exp();
        1.0 - d2 * p / (p - big_a)
    };
    let mut worst = (f64::INFINITY, 0.0);
    for n in 1..40 {
        let m = r(n as f64) - r(n as f64 + 1.0);
        if m < worst.0 {
            worst = (m, n as f64);
        }
    }
    worst
}

fn audit_b(b: f64, big_a: f64, k0: f64) -> (f64, f64) {
    let p = b + 1.0;
    let d2 = 1.0 - big_a;
    let q = big_a / (1.0 + k0 * d2);
    let mut worst = (f64::INFINITY, 0.0);
    let mut visit = |s: f64| {
        let y = b / PI * ((-p * (s / PI).ln_1p()).exp() - big_a * (-p * (q * s / PI).ln_1p()).exp());
        let yt = b / PI * (d2 + p / PI * (big_a * q - 1.0) * s);
        if y - yt < worst.0 {
            worst = (y - yt, s);
        }
    };
    for i in 0..=2000 {
        visit(5.0 * i as f64 / 2000.0);
    }
    for i in 0..2000 {
        visit(10f64.powf(0.7 + 3.3 * i as f64 / 1999.0));
    }
    worst
}

fn audit_c(b: f64, big_a: f64, k0: f64) -> f64 {
    let p = b + 1.0;
    let d2 = 1.0 - big_a;
    let st = PI * (1.0 + k0 * d2) * (-(-big_a.ln() / p).exp_m1()) / ((b / p * big_a.ln()).exp() - 1.0 - k0 * d2);
    let bd = PI * (1.0 + k0 * d2) / (k0 * big_a);
    bd - st
}

fn audit_d(b: f64, big_a: f64, k0: f64) -> f64 {
    let p = b + 1.0;
    let d2 = 1.0 - big_a;
    let kap = (1.0 + d2 * k0) / big_a;
    let lhs = (((big_a.ln() / p).exp() - 1.0 / kap) / (1.0 - 1.0 / kap)).powf(p);
    let lim = (p * (-1.0 / ((1.0 + k0) * p)).ln_1p()).exp();
    (lim - lhs).min((-1.0 / (1.0 + k0)).exp() - lim)
}

/// `(alpha+1)` times the slack of
/// `Sigma(c)^2 (1+s/pi)^{-(alpha+1)} >= (s+pi)^2/(s(s+2pi)) theta/(alpha+1)`.
fn contradiction_slack(b: f64, c: f64, s: f64) -> f64 {
    let x = s / PI;
    let y = (-b * x.ln_1p()).exp();
    let r = (1.0 + c * x) / (1.0 + x);
    let g = (s + PI) * (s + PI) / (s * (s + 2.0 * PI));
    (b + 1.0) * (b * r.ln()).exp() - g + y * (g - 1.0)
}

fn audit_e(b: f64) -> (f64, bool) {
    let alpha = AlphaParam::from_plus_one(b).expect("positive");
    let cs = sigma_threshold(alpha);
    let identity = ((b + 1.0) * (b * cs.ln()).exp() - 1.0).abs();
    let violated = contradiction_slack(b, 0.999 * cs, 1e12) < 0.0;
    (-identity, violated)
}

fn audit_f(b: f64, big_a: f64, c0: f64) -> Result<(f64, f64)> {
    let p = b + 1.0;
    let d2 = 1.0 - big_a;
    let top = b * big_a / PI;
    let lo = b * c0 / PI;
    let mut worst = (f64::INFINITY, 0.0);
    for i in 1..6 {
        let t = lo + (top - lo) * i as f64 / 6.0;
        let g = |x: f64| {
            let w = (-p * (-x).ln_1p()).exp();
            t / top * w - d2 / big_a * (w - 1.0 - p * x) - 1.0
        };
        let (mut l, mut h) = (0.0, 0.5);
        while g(h) < 0.0 {
            l = h;
            h = 0.5 * (h + 1.0);
        }
        let x = brent_root(g, l, h, 1e-16)?;
        let (mut tot, mut term, mut n) = (0.0, 1.0, 0u32);
        loop {
            n += 1;
            term *= (p + n as f64) / (n as f64 + 1.0) * x;
            tot += term * (1.0 / big_a - d2.powi(n as i32));
            if term < 1e-18 && n > 5 {
                break;
            }
        }
        if 1.0 - tot < worst.0 {
            worst = (1.0 - tot, t);
        }
    }
    Ok(worst)
}

/// Evaluate checks (a)-(f) over the sweep. Check (e) depends on `alpha`
/// only and yields one row per `alpha`; check (f) is marked not applicable
/// unless `sqrt(1 - a0^2) < c0/16`.
pub fn audit_proof_inequalities(sweep: &AuditSweep) -> Result<Vec<AuditRow>> {
    let mut rows = Vec::new();
    for &b in &sweep.alpha_plus_one {
        let alpha = b - 1.0;
        let (m, violated) = audit_e(b);
        rows.push(AuditRow {
            check: AuditCheck::E,
            alpha,
            a0_sq: f64::NAN,
            c0: f64::NAN,
            c: f64::NAN,
            margin: m,
            witness: 1e12,
            applicable: true,
            pass: m >= -sweep.slack && violated,
        });
        for &big_a in &sweep.a0_sq {
            for &c0 in &sweep.c0 {
                for &c in &sweep.c {
                    let k0 = c / (c0 * c0 * c0);
                    let row = |check, margin: f64, witness, applicable| AuditRow {
                        check,
                        alpha,
                        a0_sq: big_a,
                        c0,
                        c,
                        margin,
                        witness,
                        applicable,
                        pass: !applicable || margin >= -sweep.slack,
                    };
                    let (ma, na) = audit_a(big_a, k0);
                    rows.push(row(AuditCheck::A, ma, na, true));
                    let (mb, sb) = audit_b(b, big_a, k0);
                    rows.push(row(AuditCheck::B, mb, sb, true));
                    rows.push(row(AuditCheck::C, audit_c(b, big_a, k0), f64::NAN, true));
                    rows.push(row(AuditCheck::D, audit_d(b, big_a, k0), f64::NAN, true));
                    if (1.0 - big_a).sqrt() < c0 / 16.0 {
                        let (mf, tf) = audit_f(b, big_a, c0)?;
                        rows.push(row(AuditCheck::F, mf, tf, true));
                    } else {
                        rows.push(row(AuditCheck::F, f64::NAN, f64::NAN, false));
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Total number of rows and failures in an audit table.
pub fn audit_summary(rows: &[AuditRow]) -> (usize, usize) {
    (rows.len(), rows.iter().filter(|r| !r.pass).count())
}
