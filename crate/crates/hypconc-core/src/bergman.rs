//! Functions in the weighted Bergman space, stored by their coefficients in
//! the orthonormal basis `z^k / sqrt(c_k)`, together with the density
//! `u = |f|^2 (1-|z|^2)^{alpha+2}`, its distribution function and its
//! decreasing rearrangement.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::hyperbolic::{mobius, GridMask};
use crate::optimize::{brent_root, nelder_mead};
use crate::quadrature::{gauss_legendre, QuadratureGrid};
use crate::specfun::{pow1p_neg, reg_inc_beta, AlphaParam};

/// Default number of kernel coefficients before automatic doubling.
pub const DEFAULT_TRUNCATION: usize = 48;
/// Largest kernel truncation tail accepted without a warning.
pub const KERNEL_TAIL_TOL: f64 = 1e-10;

/// `1 / sqrt(c_k)` for `k < n`, built by the product
/// `c_k / c_{k-1} = k / (k + alpha + 1)`.
fn inv_sqrt_c(alpha: AlphaParam, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut v = (alpha.plus_one() / PI).sqrt();
    for k in 0..n {
        if k > 0 {
            let kf = k as f64;
            v *= ((kf + alpha.plus_one()) / kf).sqrt();
        }
        out.push(v);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct BergmanFunction {
    alpha: AlphaParam,
    coeffs: Vec<Complex64>,
    scale: Vec<f64>,
}

impl BergmanFunction {
    pub fn new(alpha: AlphaParam, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(domain("a Bergman function needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(domain("coefficients must be finite"));
        }
        let scale = inv_sqrt_c(alpha, coeffs.len());
        Ok(Self { alpha, coeffs, scale })
    }

    pub fn from_real(alpha: AlphaParam, coeffs: &[f64]) -> Result<Self> {
        Self::new(alpha, coeffs.iter().map(|c| Complex64::new(*c, 0.0)).collect())
    }

    /// The constant extremal `sqrt((alpha+1)/pi)`, coefficient vector `(1)`.
    pub fn constant(alpha: AlphaParam) -> Self {
        Self::new(alpha, vec![Complex64::new(1.0, 0.0)]).expect("valid")
    }

    pub fn alpha(&self) -> AlphaParam {
        self.alpha
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit-norm copy together with the original norm.
    pub fn normalized(&self) -> Result<(Self, f64)> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(domain("cannot normalize the zero function"));
        }
        let mut g = self.clone();
        for c in g.coeffs.iter_mut() {
            *c /= n;
        }
        Ok((g, n))
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        let mut g = self.clone();
        for c in g.coeffs.iter_mut() {
            *c *= k;
        }
        g
    }

    /// Drop trailing coefficients below `1e-16` of the largest one.
    pub fn trimmed(&self) -> Self {
        let m = self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.norm()));
        let mut n = self.coeffs.len();
        while n > 1 && self.coeffs[n - 1].norm() <= 1e-16 * m {
            n -= 1;
        }
        let mut g = self.clone();
        g.coeffs.truncate(n);
        g.scale.truncate(n);
        g
    }

    /// Taylor coefficients `a_k / sqrt(c_k)`.
    pub fn taylor(&self) -> Vec<Complex64> {
        self.coeffs.iter().zip(&self.scale).map(|(a, s)| a * s).collect()
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() < 1.0) {
            return Err(domain("evaluation point must lie in the open disk"));
        }
        Ok(self.eval(z))
    }

    /// Horner evaluation without the domain check; valid for any `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, s) in self.coeffs.iter().zip(&self.scale).rev() {
            acc = acc * z + a * s;
        }
        acc
    }

    /// `|f(z)|^2 (1-|z|^2)^{alpha+2}`.
    pub fn u_density(&self, z: Complex64) -> f64 {
        let omt = (1.0 - z.norm()) * (1.0 + z.norm());
        self.u_with(z, omt)
    }

    /// Density with `1 - |z|^2` supplied by the caller.
    pub fn u_with(&self, z: Complex64, one_minus_t: f64) -> f64 {
        if !(one_minus_t > 0.0) {
            return 0.0;
        }
        self.eval(z).norm_sqr() * one_minus_t.powf(self.alpha.plus_two())
    }

    pub fn inner(&self, other: &BergmanFunction) -> Result<Complex64> {
        if self.alpha != other.alpha {
            return Err(domain("inner product of functions with different alpha"));
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum())
    }

    /// `U_a f = (f o phi_a) (phi_a')^{(alpha+2)/2}`, the unitary change of
    /// variables under `phi_a(z) = (z-a)/(1-conj(a) z)`; it satisfies
    /// `u_{U_a f} = u_f o phi_a`. Coefficients come from a DFT on the unit
    /// circle; the expansion grows until its norm matches `||f||`.
    pub fn mobius_transport(&self, a: Complex64) -> Result<Self> {
        if !(a.norm() < 1.0) {
            return Err(domain("Möbius parameter must lie in the open disk"));
        }
        if a.norm() == 0.0 {
            return Ok(self.clone());
        }
        let p = self.alpha.plus_two();
        let pref = ((1.0 - a.norm()) * (1.0 + a.norm())).powf(0.5 * p);
        let target = self.norm_sq();
        let mut n = (self.len() + 16).max(DEFAULT_TRUNCATION);
        loop {
            let m = (4 * n).next_power_of_two();
            let samples: Vec<Complex64> = (0..m)
                .map(|j| {
                    let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
                    self.eval(mobius(a, z)) * pref * (1.0 - a.conj() * z).powf(-p)
                })
                .collect();
            let taylor = dft_coefficients(&samples, n);
            let g = from_taylor(self.alpha, &taylor)?;
            let miss = (target - g.norm_sq()).abs();
            if miss <= 1e-14 * target.max(1e-300) || n >= 1 << 14 {
                return Ok(g.trimmed());
            }
            n *= 2;
        }
    }
}

/// First `n` Taylor coefficients of a function sampled at the `m`-th roots
/// of unity.
pub(crate) fn dft_coefficients(samples: &[Complex64], n: usize) -> Vec<Complex64> {
    let m = samples.len();
    let mf = m as f64;
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, s) in samples.iter().enumerate() {
                let idx = (k * j) % m;
                acc += s * Complex64::from_polar(1.0, -2.0 * PI * idx as f64 / mf);
            }
            acc / mf
        })
        .collect()
}

/// Build a function from Taylor coefficients `b_k`, so `a_k = b_k sqrt(c_k)`.
pub fn from_taylor(alpha: AlphaParam, taylor: &[Complex64]) -> Result<BergmanFunction> {
    let s = inv_sqrt_c(alpha, taylor.len());
    BergmanFunction::new(alpha, taylor.iter().zip(&s).map(|(b, s)| b / s).collect())
}

/// Normalized reproducing kernel at `omega`, truncated to `n` coefficients,
/// with the squared norm of the discarded tail.
#[derive(Clone, Debug)]
pub struct KernelExpansion {
    pub function: BergmanFunction,
    pub tail: f64,
}

impl KernelExpansion {
    /// True when the truncation tail exceeds [`KERNEL_TAIL_TOL`].
    pub fn warning(&self) -> bool {
        self.tail > KERNEL_TAIL_TOL
    }
}

/// `sqrt((alpha+1)/pi) (1-|omega|^2)^{(alpha+2)/2} (1 - conj(omega) z)^{-(alpha+2)}`
/// expanded to `n` terms: `a_k = (1-|omega|^2)^{(alpha+2)/2} conj(omega)^k sqrt((alpha+2)_k / k!)`.
pub fn kernel_function(alpha: AlphaParam, omega: Complex64, n: usize) -> Result<KernelExpansion> {
    if !(omega.norm() < 1.0) {
        return Err(domain("kernel point must lie in the open disk"));
    }
    if n == 0 {
        return Err(domain("kernel expansion needs at least one term"));
    }
    let p = alpha.plus_two();
    let x = omega.norm_sqr();
    let r = omega.norm();
    let phase = if r > 0.0 { omega.conj() / r } else { Complex64::new(1.0, 0.0) };
    let lnw = 0.5 * p * (-x).ln_1p();
    let mut coeffs = Vec::with_capacity(n);
    let mut ln_mag = lnw;
    let mut ph = Complex64::new(1.0, 0.0);
    for k in 0..n {
        if k > 0 {
            let kf = k as f64;
            ln_mag += r.ln() + 0.5 * ((p + kf - 1.0) / kf).ln();
            ph *= phase;
        }
        let mag = if r == 0.0 && k > 0 { 0.0 } else { ln_mag.exp() };
        coeffs.push(ph * mag);
    }
    let tail = if x == 0.0 { 0.0 } else { reg_inc_beta(x, n as f64, p)? };
    Ok(KernelExpansion { function: BergmanFunction::new(alpha, coeffs)?, tail })
}

/// Kernel with truncation doubled from [`DEFAULT_TRUNCATION`] until the tail
/// is below [`KERNEL_TAIL_TOL`].
pub fn kernel(alpha: AlphaParam, omega: Complex64) -> Result<KernelExpansion> {
    let mut n = DEFAULT_TRUNCATION;
    loop {
        let k = kernel_function(alpha, omega, n)?;
        if !k.warning() || n >= 1 << 16 {
            return Ok(k);
        }
        n *= 2;
    }
}

/// `v*(s) = (alpha+1)/pi (1+s/pi)^{-(alpha+2)}`.
pub fn v_star(alpha: AlphaParam, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(domain("v* needs s >= 0"));
    }
    Ok(alpha.plus_one() / PI * pow1p_neg(alpha.plus_two(), s / PI))
}

/// Inverse of `v*`: `pi (((alpha+1)/pi / t)^{1/(alpha+2)} - 1)` for
/// `0 < t <= (alpha+1)/pi`.
pub fn v_star_inverse(alpha: AlphaParam, t: f64) -> f64 {
    let top = alpha.plus_one() / PI;
    if t >= top {
        return 0.0;
    }
    PI * ((top / t).ln() / alpha.plus_two()).exp_m1()
}

/// Per-ray structure of the density of a unit-norm function, sampled on
/// the radial nodes of a grid and refined by root finding.
#[derive(Clone, Debug)]
pub struct DensityProfile {
    f: BergmanFunction,
    original_norm: f64,
    ts: Vec<f64>,
    rays: Vec<(f64, f64)>,
    samples: Vec<f64>,
    max_u: f64,
    argmax: Complex64,
    gl: (Vec<f64>, Vec<f64>),
}

impl DensityProfile {
    /// Profile of `f / ||f||` on `rays` equispaced rays, using the radial
    /// nodes of `grid` (plus the origin) as the scan resolution.
    pub fn new(f: &BergmanFunction, grid: &QuadratureGrid, rays: usize) -> Result<Self> {
        if rays < 8 {
            return Err(domain("density profile needs at least 8 rays"));
        }
        let (f, original_norm) = f.normalized()?;
        let mut ts = vec![0.0];
        let mut omts = vec![1.0];
        for n in grid.radial() {
            ts.push(n.t);
            omts.push(n.one_minus_t);
        }
        ts.push(1.0 - grid.one_minus_tmax());
        omts.push(grid.one_minus_tmax());
        let dirs: Vec<(f64, f64)> = (0..rays)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / rays as f64;
                (th.cos(), th.sin())
            })
            .collect();
        let mut samples = Vec::with_capacity(rays * ts.len());
        let (mut best, mut arg) = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
        for (c, s) in &dirs {
            for (t, omt) in ts.iter().zip(&omts) {
                let r = t.sqrt();
                let z = Complex64::new(r * c, r * s);
                let u = f.u_with(z, *omt);
                if u > best {
                    best = u;
                    arg = z;
                }
                samples.push(u);
            }
        }
        let mut prof = Self {
            f,
            original_norm,
            ts,
            rays: dirs,
            samples,
            max_u: best,
            argmax: arg,
            gl: gauss_legendre(32),
        };
        prof.refine_max();
        Ok(prof)
    }

    /// Profile of the transport of `f` that moves its peak to the origin.
    /// `rho`, `u*` and level integrals are Möbius invariant and the rays
    /// then resolve small super-level sets; ray geometry refers to the
    /// transported function.
    pub fn centered(f: &BergmanFunction, grid: &QuadratureGrid, rays: usize) -> Result<Self> {
        let p = Self::new(f, grid, rays)?;
        if p.argmax.norm() < 1e-12 {
            return Ok(p);
        }
        let g = p.f.mobius_transport(-p.argmax)?;
        let mut q = Self::new(&g, grid, rays)?;
        q.original_norm = p.original_norm;
        Ok(q)
    }

    fn refine_max(&mut self) {
        let f = &self.f;
        let obj = |w: &[f64]| -> f64 {
            let z = from_w(w);
            -f.u_density(z)
        };
        let start = to_w(self.argmax);
        let res = nelder_mead(obj, &start, 1e-2, 1e-13, 2000);
        let z = from_w(&res.x);
        let u = f.u_density(z);
        if u > self.max_u {
            self.max_u = u;
            self.argmax = z;
        }
    }

    pub fn function(&self) -> &BergmanFunction {
        &self.f
    }

    pub fn original_norm(&self) -> f64 {
        self.original_norm
    }

    /// `max u = u*(0)`.
    pub fn max_u(&self) -> f64 {
        self.max_u
    }

    pub fn argmax(&self) -> Complex64 {
        self.argmax
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    fn u_on_ray(&self, j: usize, t: f64) -> f64 {
        let r = t.sqrt();
        let (c, s) = self.rays[j];
        self.f.u_with(Complex64::new(r * c, r * s), 1.0 - t)
    }

    /// Intervals in `t = r^2` where `u > level` along ray `j`.
    pub fn ray_intervals(&self, j: usize, level: f64) -> Result<Vec<(f64, f64)>> {
        let n = self.ts.len();
        let row = &self.samples[j * n..(j + 1) * n];
        let mut out = Vec::new();
        let mut start: Option<f64> = if row[0] > level { Some(0.0) } else { None };
        for i in 1..n {
            let (a, b) = (row[i - 1] > level, row[i] > level);
            if a != b {
                let (ta, tb) = (self.ts[i - 1], self.ts[i]);
                let x = brent_root(|t| self.u_on_ray(j, t) - level, ta, tb, 1e-15 * tb.max(1e-3))
                    .unwrap_or(0.5 * (ta + tb));
                if b {
                    start = Some(x);
                } else if let Some(s0) = start.take() {
                    out.push((s0, x));
                }
            }
        }
        if start.is_some() {
            return Err(Error::Regime(alloc::format!(
                "level {level:e} reaches the grid truncation; refine the grid or raise the level"
            )));
        }
        Ok(out)
    }

    /// `rho(t) = mu({u > t})`.
    pub fn rho(&self, level: f64) -> Result<f64> {
        if !(level > 0.0) {
            return Err(domain("distribution function needs a positive level"));
        }
        if level >= self.max_u {
            return Ok(0.0);
        }
        let mut acc = 0.0;
        for j in 0..self.rays.len() {
            for (ta, tb) in self.ray_intervals(j, level)? {
                acc += (tb - ta) / ((1.0 - ta) * (1.0 - tb));
            }
        }
        Ok(PI * acc / self.rays.len() as f64)
    }

    /// `int_{u > level} u dmu` for the unit-norm function. The part inside
    /// the largest centered disc contained in the set uses the closed form
    /// `sum |a_k|^2 I_t(k+1, alpha+1)`.
    pub fn level_integral(&self, level: f64) -> Result<f64> {
        if level >= self.max_u {
            return Ok(0.0);
        }
        let m = self.rays.len();
        let mut per_ray = Vec::with_capacity(m);
        let mut t_in = f64::INFINITY;
        for j in 0..m {
            let iv = self.ray_intervals(j, level)?;
            let inner = match iv.first() {
                Some((a, b)) if *a == 0.0 => *b,
                _ => 0.0,
            };
            t_in = t_in.min(inner);
            per_ray.push(iv);
        }
        let alpha = self.f.alpha();
        let mut core = 0.0;
        if t_in > 0.0 {
            for (k, a) in self.f.coeffs().iter().enumerate() {
                core += a.norm_sqr() * reg_inc_beta(t_in, k as f64 + 1.0, alpha.plus_one())?;
            }
        }
        let mut ann = 0.0;
        for (j, iv) in per_ray.iter().enumerate() {
            for (ta, tb) in iv {
                let lo = ta.max(t_in);
                if *tb > lo {
                    ann += self.radial_integral(j, lo, *tb);
                }
            }
        }
        Ok(core + ann / m as f64)
    }

    /// `pi int_a^b |f|^2 (1-t)^alpha dt` along ray `j`, in `v = -ln(1-t)`.
    fn radial_integral(&self, j: usize, a: f64, b: f64) -> f64 {
        let (va, vb) = (-(-a).ln_1p(), -(-b).ln_1p());
        let (x, w) = &self.gl;
        let h = 0.5 * (vb - va);
        let mid = 0.5 * (vb + va);
        let (c, s) = self.rays[j];
        let alpha = self.f.alpha();
        let mut acc = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            let v = mid + h * xi;
            let omt = (-v).exp();
            let r = (-(-v).exp_m1()).sqrt();
            let z = Complex64::new(r * c, r * s);
            acc += wi * self.f.eval(z).norm_sqr() * omt.powf(alpha.plus_one());
        }
        PI * h * acc
    }

    /// Level `t` with `rho(t) = s`, the rearrangement `u*(s)`.
    pub fn u_star(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(domain("u* needs s > 0"));
        }
        let top = self.max_u;
        let mut lo = top;
        let mut rho_lo = 0.0;
        // walk down geometrically to bracket rho = s
        while rho_lo < s {
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::Regime("u* level underflow".into()));
            }
            rho_lo = self.rho(lo)?;
        }
        let hi = (2.0 * lo).min(top);
        brent_root(|t| self.rho(t).unwrap_or(f64::INFINITY) - s, lo, hi, 1e-12 * top)
    }

    /// The super-level set of measure `s`: returns `(level, mu, integral)`
    /// with `integral = int_{u > level} u dmu`.
    pub fn optimal_set(&self, s: f64) -> Result<(f64, f64, f64)> {
        let t = self.u_star(s)?;
        Ok((t, self.rho(t)?, self.level_integral(t)?))
    }

    /// Grid mask of `{u > level}`.
    pub fn mask(&self, grid: &Arc<QuadratureGrid>, level: f64) -> GridMask {
        super_level_set(&self.f, level, grid)
    }
}

/// Cell mask of `{u > level}` (cell in iff its node is).
pub fn super_level_set(f: &BergmanFunction, level: f64, grid: &Arc<QuadratureGrid>) -> GridMask {
    let m = grid.angular_count();
    let bits = (0..grid.len())
        .map(|idx| {
            let node = grid.radial()[idx / m];
            f.u_with(grid.point(idx), node.one_minus_t) > level
        })
        .collect();
    GridMask::new(grid.clone(), bits).expect("length matches grid")
}

pub(crate) fn to_w(a: Complex64) -> [f64; 2] {
    let n = a.norm();
    if n == 0.0 {
        [0.0, 0.0]
    } else {
        let h = n.atanh() / n;
        [a.re * h, a.im * h]
    }
}

pub(crate) fn from_w(w: &[f64]) -> Complex64 {
    let n = (w[0] * w[0] + w[1] * w[1]).sqrt();
    if n == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(w[0], w[1]) * (n.tanh() / n)
    }
}
