//! Cauchy windows, the Bergman transform from Hardy space on the upper
//! half-plane, its wavelet form, and the unitary map onto the disk.
//!
//! Conventions: `f^(t) = (2 pi)^{-1/2} int f(x) e^{-i x t} dx`, half-plane
//! Bergman norm `int |g|^2 y^alpha dx dy`, `alpha = 2 beta - 1`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bergman::{dft_coefficients, from_taylor, BergmanFunction};
use crate::concentration::{deficit, theta};
use crate::error::{domain, Result};
use crate::hyperbolic::{cayley, cayley_inv, cayley_to_disc, nu_of_halfplane_disc, HalfPlaneSet};
use crate::quadrature::{gauss_laguerre, gauss_legendre};
use crate::specfun::{lgamma, AlphaParam};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default number of spectral nodes.
pub const SPECTRAL_NODES: usize = 128;

fn check_beta(beta: f64) -> Result<AlphaParam> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(domain("window order beta must be positive"));
    }
    AlphaParam::new(2.0 * beta - 1.0)
}

/// `c_beta = (Gamma(2 beta) / 2^{2 beta})^{1/2}`, making
/// `int_0^inf |psi_beta^(t)|^2 dt/t = 1`.
pub fn cauchy_window_constant(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok((0.5 * lgamma(2.0 * beta) - beta * core::f64::consts::LN_2).exp())
}

/// `psi_beta^(t) = t^beta e^{-t} / c_beta` for `t >= 0`, zero otherwise.
pub fn cauchy_window_hat(beta: f64, t: f64) -> Result<f64> {
    let c = cauchy_window_constant(beta)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    Ok((beta * t.ln() - t).exp() / c)
}

/// `kappa_alpha = (2^alpha / (pi Gamma(alpha+1)))^{1/2}`, the factor that
/// makes the Bergman transform an isometry.
pub fn bergman_transform_constant(alpha: AlphaParam) -> f64 {
    (0.5 * (alpha.alpha() * core::f64::consts::LN_2 - PI.ln() - lgamma(alpha.plus_one()))).exp()
}

/// A Hardy-space signal on the upper half-plane, stored by its spectrum on a
/// rate-scaled Gauss–Laguerre grid.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPlaneSignal {
    rate: f64,
    nodes: Vec<f64>,
    /// `int_0^inf g dt ~ sum weights[j] g(nodes[j])`.
    weights: Vec<f64>,
    values: Vec<Complex64>,
}

impl HalfPlaneSignal {
    /// Sample `spectrum` on `n` nodes suited to decay like `e^{-rate t}`.
    pub fn from_fn<F: FnMut(f64) -> Complex64>(n: usize, rate: f64, mut spectrum: F) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(domain("spectral rate must be positive"));
        }
        let (x, w) = gauss_laguerre(n, 0.0)?;
        let nodes: Vec<f64> = x.iter().map(|xi| xi / rate).collect();
        let weights = x.iter().zip(&w).map(|(xi, wi)| (wi.ln() + xi).exp() / rate).collect();
        let values = nodes.iter().map(|t| spectrum(*t)).collect();
        Ok(Self { rate, nodes, weights, values })
    }

    /// Rebuild from stored nodes and values; nodes must match the grid of
    /// size `values.len()` at `rate`.
    pub fn from_samples(rate: f64, nodes: &[f64], values: Vec<Complex64>) -> Result<Self> {
        let mut it = values.into_iter();
        let s = Self::from_fn(nodes.len(), rate, |_| it.next().unwrap_or_default())?;
        let ok = s.nodes.iter().zip(nodes).all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0));
        if !ok {
            return Err(domain("spectral nodes do not match the Gauss–Laguerre grid"));
        }
        Ok(s)
    }

    /// `f^(t) = t^beta e^{-i t conj(zeta)}`, whose Bergman transform of order
    /// `2 beta - 1` is a multiple of `(z - conj(zeta))^{-(2 beta + 1)}`.
    pub fn atom(beta: f64, zeta: Complex64, n: usize) -> Result<Self> {
        check_beta(beta)?;
        if !(zeta.im > 0.0) {
            return Err(domain("atom parameter must lie in the upper half-plane"));
        }
        Self::atom_with_rate(beta, zeta, n, 2.0 * zeta.im)
    }

    pub fn atom_with_rate(beta: f64, zeta: Complex64, n: usize, rate: f64) -> Result<Self> {
        check_beta(beta)?;
        Self::from_fn(n, rate, |t| (beta * t.ln() - I * t * zeta.conj()).exp())
    }

    /// `a self + b other` on a shared grid.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.rate != other.rate || self.nodes.len() != other.nodes.len() {
            return Err(domain("signals live on different spectral grids"));
        }
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v = a * *v + b * w;
        }
        Ok(out)
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `||f||^2 = int_0^inf |f^|^2 dt`.
    pub fn norm_sq(&self) -> f64 {
        self.weights.iter().zip(&self.values).map(|(w, v)| w * v.norm_sqr()).sum()
    }

    fn spectral_integral<F: Fn(f64) -> Complex64>(&self, kernel: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((t, w), v)| kernel(*t) * v * *w)
            .sum()
    }
}

/// `<atom(beta, zeta_1), atom(beta, zeta_2)> = Gamma(2 beta + 1) (i (conj(zeta_1) - zeta_2))^{-(2 beta + 1)}`.
pub fn atom_inner(beta: f64, zeta_1: Complex64, zeta_2: Complex64) -> Result<Complex64> {
    check_beta(beta)?;
    let p = 2.0 * beta + 1.0;
    Ok((I * (zeta_1.conj() - zeta_2)).powf(-p) * lgamma(p).exp())
}

/// `B_alpha f(z) = kappa_alpha int_0^inf t^{(alpha+1)/2} f^(t) e^{i z t} dt`.
pub fn bergman_transform(f: &HalfPlaneSignal, alpha: AlphaParam, z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(domain("Bergman transform is evaluated in the open upper half-plane"));
    }
    let e = 0.5 * alpha.plus_one();
    let k = bergman_transform_constant(alpha);
    Ok(k * f.spectral_integral(|t| (e * t.ln() + I * z * t).exp()))
}

/// Closed form of the Bergman transform of `atom((alpha+1)/2, zeta)`:
/// `kappa Gamma(alpha+2) (-i (z - conj(zeta)))^{-(alpha+2)}`.
pub fn bergman_transform_atom(alpha: AlphaParam, zeta: Complex64, z: Complex64) -> Complex64 {
    let p = alpha.plus_two();
    bergman_transform_constant(alpha) * lgamma(p).exp() * (-I * (z - zeta.conj())).powf(-p)
}

/// Wavelet coefficient at `(x, y)` with window `psi_beta`, defined through
/// `y^{alpha/2 + 1} B_alpha f(-x + i y)`; square-integrable against
/// `dx dy / y^2` with integral `||f||^2`.
pub fn wavelet_transform_point(f: &HalfPlaneSignal, beta: f64, x: f64, y: f64) -> Result<Complex64> {
    let alpha = check_beta(beta)?;
    if !(y > 0.0) {
        return Err(domain("wavelet scale must be positive"));
    }
    Ok(bergman_transform(f, alpha, Complex64::new(-x, y))? * y.powf(0.5 * alpha.alpha() + 1.0))
}

/// The windowed integral `y^{-1/2} int f(t) conj(psi_beta((t - x)/y)) dt`
/// evaluated spectrally as `y^{1/2} int f^(t) psi_beta^(y t) e^{i x t} dt`.
pub fn wavelet_direct(f: &HalfPlaneSignal, beta: f64, x: f64, y: f64) -> Result<Complex64> {
    let c = cauchy_window_constant(beta)?;
    if !(y > 0.0) {
        return Err(domain("wavelet scale must be positive"));
    }
    let v = f.spectral_integral(|t| Complex64::new(beta * (y * t).ln() - y * t, x * t).exp());
    Ok(v * y.sqrt() / c)
}

/// `T_alpha g(w) = 2 (1 - w)^{-(alpha+2)} g(i (1 + w)/(1 - w))`.
pub fn t_alpha_map<G: FnMut(Complex64) -> Complex64>(alpha: AlphaParam, mut g: G, w: Complex64) -> Result<Complex64> {
    if !(w.norm() < 1.0) {
        return Err(domain("T_alpha is evaluated inside the unit disk"));
    }
    Ok(2.0 * (1.0 - w).powf(-alpha.plus_two()) * g(cayley_inv(w)))
}

/// Disk function `T_alpha g` recovered from `4 n` samples on the circle of
/// radius `radius`, kept to `n` coefficients.
pub fn t_alpha_function<G: FnMut(Complex64) -> Complex64>(
    alpha: AlphaParam,
    mut g: G,
    n: usize,
    radius: f64,
) -> Result<BergmanFunction> {
    if !(radius > 0.0 && radius < 1.0) || n == 0 {
        return Err(domain("sampling circle must lie inside the disk"));
    }
    let m = (4 * n).next_power_of_two();
    let samples: Vec<Complex64> = (0..m)
        .map(|j| {
            let w = Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64);
            2.0 * (1.0 - w).powf(-alpha.plus_two()) * g(cayley_inv(w))
        })
        .collect();
    let mut taylor = dft_coefficients(&samples, n);
    let mut scale = 1.0;
    for b in taylor.iter_mut() {
        *b /= scale;
        scale *= radius;
    }
    from_taylor(alpha, &taylor)
}

/// `T_alpha B_alpha` of `atom((alpha+1)/2, zeta)`:
/// `2 kappa Gamma(alpha+2) (1 + i conj(zeta))^{-(alpha+2)} (1 - conj(omega) w)^{-(alpha+2)}`
/// with `omega` the Cayley image of `zeta`.
pub fn transported_atom(alpha: AlphaParam, zeta: Complex64, w: Complex64) -> Complex64 {
    let p = alpha.plus_two();
    let omega = cayley(zeta);
    2.0 * bergman_transform_constant(alpha) * lgamma(p).exp() * (1.0 + I * zeta.conj()).powf(-p) * (1.0 - omega.conj() * w).powf(-p)
}

/// Best fit of Taylor coefficients by `A (alpha+2)_k/k! conj(omega)^k`:
/// `(omega, A, relative residual)`.
pub fn fit_kernel(alpha: AlphaParam, f: &BergmanFunction) -> Result<(Complex64, Complex64, f64)> {
    let b = f.taylor();
    if b.len() < 2 || b[0].norm() == 0.0 {
        return Err(domain("kernel fit needs a nonzero constant term and two coefficients"));
    }
    let p = alpha.plus_two();
    let omega = (b[1] / (p * b[0])).conj();
    let mut model = Vec::with_capacity(b.len());
    let mut g = Complex64::new(1.0, 0.0);
    for k in 0..b.len() {
        if k > 0 {
            g *= omega.conj() * ((p + k as f64 - 1.0) / k as f64);
        }
        model.push(g);
    }
    // least-squares amplitude against the model in the orthonormal basis
    let basis = from_taylor(alpha, &model)?;
    let num: Complex64 = f.coeffs().iter().zip(basis.coeffs()).map(|(a, m)| a * m.conj()).sum();
    let den = basis.norm_sq();
    let amp = num / den;
    let resid: f64 = f.coeffs().iter().zip(basis.coeffs()).map(|(a, m)| (a - amp * m).norm_sqr()).sum();
    Ok((omega, amp, (resid / f.norm_sq()).sqrt()))
}

/// Polar rule on the half-plane disc `|z - c| < rho`, `rho < Im c`:
/// `(z, dx dy weight)`.
pub fn halfplane_disc_rule(center: Complex64, radius: f64, n_tau: usize, n_phi: usize) -> Result<Vec<(Complex64, f64)>> {
    if !(radius > 0.0 && radius < center.im) {
        return Err(domain("half-plane disc must have 0 < radius < center height"));
    }
    let (x, w) = gauss_legendre(n_tau);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut out = Vec::with_capacity(n_tau * n_phi);
    for (xi, wi) in x.iter().zip(&w) {
        let tau = 0.5 * (xi + 1.0);
        let r = radius * tau.sqrt();
        let wt = 0.25 * radius * radius * wi * dphi;
        for j in 0..n_phi {
            out.push((center + Complex64::from_polar(r, dphi * j as f64), wt));
        }
    }
    Ok(out)
}

/// Half-plane and disk deficits of one signal on one half-plane disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveletDeficit {
    /// `nu(Omega)`.
    pub nu: f64,
    /// Hyperbolic measure of the transported disk set.
    pub mu: f64,
    /// `1 - int_Omega |W f|^2 dnu / (||f||^2 theta_alpha(nu/4))`.
    pub half_plane: f64,
    /// Deficit of `T_alpha B_alpha f` on the Cayley image of the reflected set.
    pub disk: f64,
}

/// Resolution of [`wavelet_deficit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BridgeResolution {
    pub n_tau: usize,
    pub n_phi: usize,
    pub coefficients: usize,
    pub sampling_radius_permille: u32,
}

impl Default for BridgeResolution {
    fn default() -> Self {
        Self { n_tau: 64, n_phi: 128, coefficients: 96, sampling_radius_permille: 900 }
    }
}

/// Compute the deficit of `f` on `|z - center| < radius` twice: directly
/// on the half-plane with the wavelet transform, and on the disk after
/// `T_alpha B_alpha`.
pub fn wavelet_deficit(
    f: &HalfPlaneSignal,
    beta: f64,
    center: Complex64,
    radius: f64,
    res: BridgeResolution,
) -> Result<WaveletDeficit> {
    let alpha = check_beta(beta)?;
    let nu = nu_of_halfplane_disc(center.im, radius)?;
    let th = theta(alpha, nu / 4.0);
    let rule = halfplane_disc_rule(center, radius, res.n_tau, res.n_phi)?;
    let mut conc = 0.0;
    for (z, w) in &rule {
        let v = wavelet_transform_point(f, beta, z.re, z.im)?;
        conc += w * v.norm_sqr() / (z.im * z.im);
    }
    let half_plane = 1.0 - conc / (f.norm_sq() * th);

    let radius_s = res.sampling_radius_permille as f64 / 1000.0;
    let g = t_alpha_function(
        alpha,
        |z| bergman_transform(f, alpha, z).unwrap_or_default(),
        res.coefficients,
        radius_s,
    )?;
    let reflected = HalfPlaneSet::Disc { center: -center.conj(), radius };
    let set = cayley_to_disc(&reflected)?;
    let rep = deficit(&g, &set)?;
    Ok(WaveletDeficit { nu, mu: rep.s, half_plane, disk: rep.deficit })
}

/// Half-plane disc that is the hyperbolic ball of `nu`-measure `nu` around
/// `zeta`: Euclidean center `x + i y cosh R`, radius `y sinh R`.
pub fn halfplane_ball(zeta: Complex64, nu: f64) -> Result<(Complex64, f64)> {
    if !(zeta.im > 0.0 && nu > 0.0) {
        return Err(domain("half-plane ball needs Im zeta > 0 and nu > 0"));
    }
    // nu = 4 pi sinh^2(R/2) = 2 pi (cosh R - 1)
    let ch = 1.0 + nu / (2.0 * PI);
    let sh = ((ch - 1.0) * (ch + 1.0)).sqrt();
    Ok((Complex64::new(zeta.re, zeta.im * ch), zeta.im * sh))
}
