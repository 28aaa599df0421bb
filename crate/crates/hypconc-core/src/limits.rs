//! The two endpoint regimes of the weight parameter.
//!
//! As `alpha -> infinity`, Bergman functions on sets shrunk by `sqrt(pi/alpha)`
//! behave like Fock functions with Gaussian weight `e^{-pi |z|^2}`. As
//! `alpha -> -1`, the normalized Bergman norms tend to the Hardy norm and the
//! concentration bound becomes `pi ln(1 + s/pi)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bergman::{from_w, to_w, BergmanFunction};
use crate::concentration::{deficit, mask_gram, theta_over_plus_one, DiscRule};
use crate::error::{domain, Error, Result};
use crate::hyperbolic::{mu_measure, HyperbolicSet};
use crate::optimize::nelder_mead;
use crate::quadrature::gauss_legendre;
use crate::specfun::{gautschi_bounds, ln_gamma, pow1p_minus_one_over, AlphaParam};

/// Relative tail at which the rescaled-measure series is cut.
const SERIES_TOL: f64 = 1e-12;
const SERIES_MAX_TERMS: usize = 200_000;

/// Squared norm of the discarded part of a Hardy kernel expansion above
/// which the expansion is flagged; the dropped coefficients are then below
/// machine precision.
pub const HARDY_TAIL_TOL: f64 = 1e-32;

// ---------------------------------------------------------------- Fock side

/// An entire function `F = sum b_k sqrt(pi^k / k!) z^k`; the basis is
/// orthonormal for `e^{-pi |z|^2} dA`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockFunction {
    coeffs: Vec<Complex64>,
}

impl FockFunction {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(domain("Fock function needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(domain("Fock coefficients must be finite"));
        }
        Ok(Self { coeffs })
    }

    pub fn constant() -> Self {
        Self { coeffs: vec![Complex64::new(1.0, 0.0)] }
    }

    /// `e^{pi conj(z0) z - pi |z0|^2 / 2}`, a unit vector whose density
    /// `|F|^2 e^{-pi|z|^2}` is the Gaussian centred at `z0`; `n` terms.
    pub fn shifted_ground_state(z0: Complex64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("need at least one term"));
        }
        let scale = (-0.5 * PI * z0.norm_sqr()).exp();
        let step = z0.conj() * PI.sqrt();
        let mut b = Complex64::new(scale, 0.0);
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            if k > 0 {
                b *= step / (k as f64).sqrt();
            }
            coeffs.push(b);
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut basis = Complex64::new(1.0, 0.0);
        for (k, b) in self.coeffs.iter().enumerate() {
            if k > 0 {
                basis *= z * (PI / k as f64).sqrt();
            }
            acc += b * basis;
        }
        acc
    }

    /// The Bergman function with the same coefficients in the orthonormal
    /// basis `z^k / sqrt(c_k)`.
    pub fn embed(&self, alpha: AlphaParam) -> BergmanFunction {
        BergmanFunction::new(alpha, self.coeffs.clone()).expect("validated coefficients")
    }
}

/// A cell mask on the Cartesian grid with lower-left corner `origin`, square
/// cells of side `cell`, `nx` columns and `ny` rows (row-major bits).
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneMask {
    origin: Complex64,
    cell: f64,
    nx: usize,
    ny: usize,
    bits: Vec<bool>,
}

impl PlaneMask {
    pub fn new(origin: Complex64, cell: f64, nx: usize, ny: usize, bits: Vec<bool>) -> Result<Self> {
        if !(cell > 0.0 && cell.is_finite()) {
            return Err(domain("cell side must be positive"));
        }
        if bits.len() != nx * ny {
            return Err(Error::Shape { expected: nx * ny, got: bits.len() });
        }
        Ok(Self { origin, cell, nx, ny, bits })
    }

    /// Select the cells whose centres satisfy `keep`.
    pub fn from_fn<F: FnMut(Complex64) -> bool>(
        origin: Complex64,
        cell: f64,
        nx: usize,
        ny: usize,
        mut keep: F,
    ) -> Result<Self> {
        let mut bits = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                bits.push(keep(origin + Complex64::new((ix as f64 + 0.5) * cell, (iy as f64 + 0.5) * cell)));
            }
        }
        Self::new(origin, cell, nx, ny, bits)
    }

    pub fn origin(&self) -> Complex64 {
        self.origin
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    fn corner(&self, ix: usize, iy: usize) -> Complex64 {
        self.origin + Complex64::new(ix as f64 * self.cell, iy as f64 * self.cell)
    }

    fn members(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(move |(i, _)| (i % self.nx, i / self.nx))
    }
}

/// A bounded subset of the plane.
#[derive(Clone, Debug, PartialEq)]
pub enum PlaneSet {
    Disc { center: Complex64, radius: f64 },
    Mask(PlaneMask),
}

/// Tensor Gauss–Legendre order inside each mask cell.
const CELL_ORDER: usize = 6;
const DISC_RADIAL: usize = 64;
const DISC_ANGULAR: usize = 128;

impl PlaneSet {
    /// Centred disc of Euclidean area `area`.
    pub fn disc_of_area(center: Complex64, area: f64) -> Result<Self> {
        if !(area > 0.0 && area.is_finite()) {
            return Err(domain("area must be positive"));
        }
        Ok(PlaneSet::Disc { center, radius: (area / PI).sqrt() })
    }

    pub fn area(&self) -> f64 {
        match self {
            PlaneSet::Disc { radius, .. } => PI * radius * radius,
            PlaneSet::Mask(m) => m.count() as f64 * m.cell * m.cell,
        }
    }

    /// `sup |z|` over the closure.
    pub fn max_abs(&self) -> f64 {
        match self {
            PlaneSet::Disc { center, radius } => center.norm() + radius,
            PlaneSet::Mask(m) => m
                .members()
                .flat_map(|(ix, iy)| {
                    [m.corner(ix, iy), m.corner(ix + 1, iy), m.corner(ix, iy + 1), m.corner(ix + 1, iy + 1)]
                })
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            PlaneSet::Disc { center, radius } => (z - center).norm() < *radius,
            PlaneSet::Mask(m) => {
                let d = (z - m.origin) / m.cell;
                if d.re < 0.0 || d.im < 0.0 {
                    return false;
                }
                let (ix, iy) = (d.re as usize, d.im as usize);
                ix < m.nx && iy < m.ny && m.bits[iy * m.nx + ix]
            }
        }
    }

    /// Nodes and `dA` weights: polar Gauss–Legendre in `|z-c|^2` for discs,
    /// tensor Gauss–Legendre per cell for masks.
    pub fn rule(&self) -> Vec<(Complex64, f64)> {
        match self {
            PlaneSet::Disc { center, radius } => {
                let (x, w) = gauss_legendre(DISC_RADIAL);
                let dphi = 2.0 * PI / DISC_ANGULAR as f64;
                let mut out = Vec::with_capacity(DISC_RADIAL * DISC_ANGULAR);
                for (xi, wi) in x.iter().zip(&w) {
                    let r = radius * (0.5 * (xi + 1.0)).sqrt();
                    let wt = 0.25 * radius * radius * wi * dphi;
                    for j in 0..DISC_ANGULAR {
                        out.push((center + Complex64::from_polar(r, dphi * j as f64), wt));
                    }
                }
                out
            }
            PlaneSet::Mask(m) => {
                let (x, w) = gauss_legendre(CELL_ORDER);
                let h = 0.5 * m.cell;
                let mut out = Vec::with_capacity(m.count() * CELL_ORDER * CELL_ORDER);
                for (ix, iy) in m.members() {
                    let mid = m.corner(ix, iy) + Complex64::new(h, h);
                    for (xa, wa) in x.iter().zip(&w) {
                        for (xb, wb) in x.iter().zip(&w) {
                            out.push((mid + Complex64::new(h * xa, h * xb), h * h * wa * wb));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn integrate<F: FnMut(Complex64) -> f64>(&self, mut g: F) -> f64 {
        self.rule().iter().map(|(z, w)| w * g(*z)).sum()
    }
}

/// `mu(sqrt(pi/alpha) Omega)` by the moment series
/// `sum_k k (pi/alpha)^k int_Omega |z|^{2(k-1)} dA`.
pub fn rescaled_set_measure(set: &PlaneSet, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain("rescaling needs alpha > 0"));
    }
    if !(set.area() > 0.0) {
        return Err(domain("set must have positive area"));
    }
    let q = PI / alpha;
    let reach = q * set.max_abs().powi(2);
    if !(reach < 1.0) {
        return Err(domain(alloc::format!("rescaled set leaves the disk (q R^2 = {reach})")));
    }
    let rule = set.rule();
    let area = set.area();
    let mut pow: Vec<f64> = vec![1.0; rule.len()];
    let mut total = 0.0;
    let mut qk = 1.0;
    for k in 1..=SERIES_MAX_TERMS {
        qk *= q;
        let moment: f64 = rule.iter().zip(&pow).map(|((_, w), p)| w * p).sum();
        total += k as f64 * qk * moment;
        // remaining terms are at most q |Omega| sum_{j>k} j reach^{j-1}
        let kf = k as f64;
        let tail = q * area * (kf + 1.0) * reach.powf(kf) / ((1.0 - reach) * (1.0 - reach));
        if tail < SERIES_TOL * total {
            return Ok(total);
        }
        for ((z, _), p) in rule.iter().zip(pow.iter_mut()) {
            *p *= z.norm_sqr();
        }
    }
    Err(Error::NoConvergence { what: "rescaled measure series".into(), residual: reach })
}

/// `int_Omega |F|^2 e^{-pi |z|^2} dA / ||F||^2`.
pub fn fock_concentration(f: &FockFunction, set: &PlaneSet) -> Result<f64> {
    let n = f.norm_sq();
    if !(n > 0.0) {
        return Err(domain("Fock function must be nonzero"));
    }
    Ok(set.integrate(|z| f.eval(z).norm_sqr() * (-PI * z.norm_sqr()).exp()) / n)
}

/// `1 - int_Omega |F|^2 e^{-pi|z|^2} / ((1 - e^{-|Omega|}) ||F||^2)`.
pub fn fock_deficit(f: &FockFunction, set: &PlaneSet) -> Result<f64> {
    let area = set.area();
    if !(area > 0.0) {
        return Err(domain("set must have positive area"));
    }
    Ok(1.0 - fock_concentration(f, set)? / -(-area).exp_m1())
}

/// Concentration of the embedded Bergman function on `sqrt(pi/alpha) Omega`,
/// evaluated on the rule of `Omega` after the change of variables.
pub fn rescaled_concentration(f: &FockFunction, set: &PlaneSet, alpha: f64) -> Result<f64> {
    let a = AlphaParam::new(alpha)?;
    let q = PI / alpha;
    if !(q * set.max_abs().powi(2) < 1.0) {
        return Err(domain("rescaled set leaves the disk"));
    }
    let g = f.embed(a);
    let root = q.sqrt();
    let val = set.integrate(|z| {
        let w = z * root;
        g.eval(w).norm_sqr() * (alpha * (-w.norm_sqr()).ln_1p()).exp()
    });
    Ok(q * val / g.norm_sq())
}

/// One row of the large-`alpha` convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockLimitRow {
    pub alpha: f64,
    pub s_alpha: f64,
    pub value: f64,
    pub target: f64,
    pub gap: f64,
}

/// Disk concentration of the embedded `F` on each rescaled set against the
/// Fock concentration on `Omega`.
pub fn fock_limit_experiment(f: &FockFunction, set: &PlaneSet, alphas: &[f64]) -> Result<Vec<FockLimitRow>> {
    if alphas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("alpha schedule must be increasing"));
    }
    let target = fock_concentration(f, set)?;
    alphas
        .iter()
        .map(|&alpha| {
            let s_alpha = rescaled_set_measure(set, alpha)?;
            let value = rescaled_concentration(f, set, alpha)?;
            Ok(FockLimitRow { alpha, s_alpha, value, target, gap: (value - target).abs() })
        })
        .collect()
}

/// True when every gap is below its predecessor.
pub fn gaps_decreasing(rows: &[FockLimitRow]) -> bool {
    rows.windows(2).all(|w| w[1].gap < w[0].gap)
}

// --------------------------------------------------------------- Hardy side

/// `f = sum a_k z^k` in the Hardy space of the disk.
#[derive(Clone, Debug, PartialEq)]
pub struct HardyFunction {
    coeffs: Vec<Complex64>,
}

impl HardyFunction {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(domain("Hardy function needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(domain("Hardy coefficients must be finite"));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|c| Complex64::new(*c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn inner(&self, other: &HardyFunction) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum()
    }

    /// The Bergman function with the same coefficients in the orthonormal
    /// basis `z^k / sqrt(c_k)`.
    pub fn embed(&self, alpha: AlphaParam) -> BergmanFunction {
        BergmanFunction::new(alpha, self.coeffs.clone()).expect("validated coefficients")
    }
}

/// `||f||_{H^2}` from the coefficients.
pub fn hardy_norm(f: &HardyFunction) -> f64 {
    f.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Truncated normalized Hardy kernel `(1-|w|^2)^{1/2} / (1 - conj(w) z)` with
/// the squared norm `|w|^{2n}` of the discarded tail.
#[derive(Clone, Debug)]
pub struct HardyKernel {
    pub function: HardyFunction,
    pub tail: f64,
}

impl HardyKernel {
    pub fn warning(&self) -> bool {
        self.tail > HARDY_TAIL_TOL
    }
}

pub fn hardy_kernel_truncated(omega: Complex64, n: usize) -> Result<HardyKernel> {
    if !(omega.norm() < 1.0) {
        return Err(domain("kernel point must lie in the open disk"));
    }
    if n == 0 {
        return Err(domain("kernel expansion needs at least one term"));
    }
    let x = omega.norm_sqr();
    let mut c = Complex64::new((0.5 * (-x).ln_1p()).exp(), 0.0);
    let mut coeffs = Vec::with_capacity(n);
    for _ in 0..n {
        coeffs.push(c);
        c *= omega.conj();
    }
    let tail = x.powi(n as i32);
    Ok(HardyKernel { function: HardyFunction::new(coeffs)?, tail })
}

/// Kernel with the truncation chosen so the tail is below [`HARDY_TAIL_TOL`].
pub fn hardy_kernel(omega: Complex64) -> Result<HardyKernel> {
    let x = omega.norm_sqr();
    let n = if x == 0.0 { 1 } else { (HARDY_TAIL_TOL.ln() / x.ln()).ceil().max(1.0) as usize };
    hardy_kernel_truncated(omega, n.min(1 << 20))
}

/// `sup_omega |<f, g_omega>|^2 / ||f||^2 = sup (1-|w|^2) |f(w)|^2 / ||f||^2`
/// with the maximizing point.
pub fn hardy_overlap(f: &HardyFunction) -> Result<(f64, Complex64)> {
    let n2 = hardy_norm(f).powi(2);
    if !(n2 > 0.0) {
        return Err(domain("Hardy function must be nonzero"));
    }
    let dens = |z: Complex64| (1.0 - z.norm_sqr()) * f.eval(z).norm_sqr() / n2;
    let mut cand: Vec<(f64, Complex64)> = Vec::new();
    let angles = 48;
    for k in 0..=60 {
        let r = (0.08 * k as f64).tanh();
        let m = if k == 0 { 1 } else { angles };
        for j in 0..m {
            let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / angles as f64);
            cand.push((dens(z), z));
        }
    }
    cand.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
    let (mut best, mut arg) = cand[0];
    for (_, z0) in cand.iter().take(4) {
        let res = nelder_mead(|w| -dens(from_w(w)), &to_w(*z0), 0.05, 1e-13, 4000);
        if -res.value > best {
            best = -res.value;
            arg = from_w(&res.x);
        }
    }
    Ok((best.min(1.0), arg))
}

/// `inf_{|c| = ||f||, omega} ||f - c g_omega|| / ||f||`.
pub fn hardy_distance(f: &HardyFunction) -> Result<f64> {
    let (overlap, _) = hardy_overlap(f)?;
    Ok((2.0 * (1.0 - overlap.sqrt())).max(0.0).sqrt())
}

/// `int_Omega |f|^2 (1-|z|^2)^{-1} dA`.
pub fn hardy_concentration_integral(f: &HardyFunction, set: &HyperbolicSet) -> Result<f64> {
    match set {
        HyperbolicSet::Disc(d) => {
            let rule = DiscRule::for_disc(d, f.len())?;
            Ok(rule.integrate(-1.0, |z| f.eval(z).norm_sqr()))
        }
        HyperbolicSet::Mask(m) => {
            if m.count() == 0 {
                return Ok(0.0);
            }
            let dim = f.len();
            let t = mask_gram(m, -1.0, dim, &vec![1.0; dim])?;
            let a = &f.coeffs;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..dim {
                for j in 0..dim {
                    acc += a[i].conj() * t[i * dim + j] * a[j];
                }
            }
            Ok(acc.re)
        }
    }
}

/// `1 - int_Omega |f|^2 (1-|z|^2)^{-1} dA / (pi ln(1+s/pi) ||f||^2)`.
pub fn hardy_deficit(f: &HardyFunction, set: &HyperbolicSet) -> Result<f64> {
    let s = mu_measure(set);
    if !(s > 0.0) {
        return Err(domain("deficit needs a set of positive measure"));
    }
    let n2 = hardy_norm(f).powi(2);
    if !(n2 > 0.0) {
        return Err(domain("deficit needs a nonzero function"));
    }
    let bound = PI * (s / PI).ln_1p();
    Ok(1.0 - hardy_concentration_integral(f, set)? / (bound * n2))
}

/// Bergman deficit of the coefficient embedding of `f` at weight `alpha`;
/// tends to [`hardy_deficit`] as `alpha -> -1`.
pub fn embedded_deficit(f: &HardyFunction, set: &HyperbolicSet, alpha: AlphaParam) -> Result<f64> {
    Ok(deficit(&f.embed(alpha), set)?.deficit)
}

/// `distance / deficit^{1/2}` in the Hardy space.
pub fn hardy_stability_ratio(f: &HardyFunction, set: &HyperbolicSet) -> Result<f64> {
    let d = hardy_deficit(f, set)?;
    if !(d > 0.0) {
        return Err(Error::Regime("ratio needs a positive deficit".into()));
    }
    Ok(hardy_distance(f)? / d.sqrt())
}

/// One row of the `alpha -> -1` table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyLimitRow {
    pub s: f64,
    pub alpha: f64,
    /// `theta_alpha(s) / (alpha+1)` and its limit `ln(1+s/pi)`.
    pub theta_ratio: f64,
    pub log_target: f64,
    /// `1 + (alpha+2)/(alpha+1) ((1+s/pi)^{alpha+1} - 1)` and its limit.
    pub constant: f64,
    pub constant_target: f64,
}

/// Stable evaluation of both convergences on every `(s, alpha+1)` pair.
pub fn hardy_limit_experiment(s_grid: &[f64], plus_ones: &[f64]) -> Result<Vec<HardyLimitRow>> {
    let mut rows = Vec::with_capacity(s_grid.len() * plus_ones.len());
    for &s in s_grid {
        if !(s > 0.0) {
            return Err(domain("s must be positive"));
        }
        let log_target = (s / PI).ln_1p();
        for &b in plus_ones {
            let a = AlphaParam::from_plus_one(b)?;
            rows.push(HardyLimitRow {
                s,
                alpha: a.alpha(),
                theta_ratio: theta_over_plus_one(a, s),
                log_target,
                constant: 1.0 + a.plus_two() * pow1p_minus_one_over(b, s / PI),
                constant_target: 1.0 + log_target,
            });
        }
    }
    Ok(rows)
}

/// `(alpha+1) c_n / pi = Gamma(alpha+2) n! / Gamma(n+alpha+2)` with its
/// Gautschi sandwich, for `n = 0..=n_max`.
pub fn coefficient_embedding(alpha: AlphaParam, n_max: usize) -> Result<Vec<(usize, f64, f64, f64)>> {
    let b = alpha.plus_one();
    let g = ln_gamma(b + 1.0)?;
    (0..=n_max)
        .map(|n| {
            let nf = n as f64;
            let v = (g + ln_gamma(nf + 1.0)? - ln_gamma(nf + b + 1.0)?).exp();
            let (lo, hi) = gautschi_bounds(n, alpha)?;
            Ok((n, v, lo, hi))
        })
        .collect()
}

/// `N(s) = C (s^{-1} (1+s/pi)^2 + ln^{1/2}(1+s/pi) (1+s/pi))`.
pub fn hardy_n_s(s: f64, c: f64) -> Result<f64> {
    if !(s > 0.0 && c > 0.0) {
        return Err(domain("N(s) needs s > 0 and C > 0"));
    }
    let q = 1.0 + s / PI;
    Ok(c * (q * q / s + (s / PI).ln_1p().sqrt() * q))
}
