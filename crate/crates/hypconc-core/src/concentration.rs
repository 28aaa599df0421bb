//! Concentration of Bergman functions on subsets of the disk, the sharp
//! bound `theta_alpha(s)`, deficits and localization matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bergman::BergmanFunction;
use crate::error::{domain, Error, Result};
use crate::hyperbolic::{mu_measure, GridMask, HyperbolicSet, PseudoDisc};
use crate::linalg::{eigh, HermitianMatrix};
use crate::quadrature::gauss_legendre;
use crate::specfun::{one_minus_pow1p_neg, AlphaParam};

/// `theta_alpha(s) = 1 - (1+s/pi)^{-(alpha+1)}`.
pub fn theta(alpha: AlphaParam, s: f64) -> f64 {
    one_minus_pow1p_neg(alpha.plus_one(), s / PI)
}

/// `theta_alpha(s) / (alpha+1)`, finite as `alpha -> -1` where it tends to
/// `ln(1 + s/pi)`.
pub fn theta_over_plus_one(alpha: AlphaParam, s: f64) -> f64 {
    let b = alpha.plus_one();
    let l = (s / PI).ln_1p();
    if b * l < 1e-300 {
        return l;
    }
    -(-b * l).exp_m1() / b
}

/// Polar rule on a Euclidean disc `|z - c| < rho` inside the unit disk:
/// Gauss–Legendre in `|z-c|^2`, trapezoid in angle.
#[derive(Clone, Debug)]
pub struct DiscRule {
    /// `(z, dA weight, 1 - |z|^2)`.
    nodes: Vec<(Complex64, f64, f64)>,
}

impl DiscRule {
    pub fn new(center: Complex64, radius: f64, n_tau: usize, n_phi: usize) -> Result<Self> {
        if !(radius > 0.0) || !(center.norm() + radius < 1.0 + 1e-15) {
            return Err(domain("disc rule needs a nondegenerate disc inside the unit disk"));
        }
        let (x, w) = gauss_legendre(n_tau);
        let mut nodes = Vec::with_capacity(n_tau * n_phi);
        let dphi = 2.0 * PI / n_phi as f64;
        for (xi, wi) in x.iter().zip(&w) {
            let tau = 0.5 * (xi + 1.0);
            let r = radius * tau.sqrt();
            // dA = rho^2/2 dtau dphi, dtau = dx/2
            let wt = 0.25 * radius * radius * wi * dphi;
            for j in 0..n_phi {
                let z = center + Complex64::from_polar(r, dphi * j as f64);
                let a = z.norm();
                nodes.push((z, wt, (1.0 - a) * (1.0 + a)));
            }
        }
        Ok(Self { nodes })
    }

    /// Rule sized for functions with `n_coeffs` Taylor coefficients.
    pub fn for_disc(disc: &PseudoDisc, n_coeffs: usize) -> Result<Self> {
        let n_phi = (2 * n_coeffs + 32).max(128);
        let n_tau = (n_coeffs + 32).max(64);
        Self::new(disc.euclidean_center(), disc.euclidean_radius(), n_tau, n_phi)
    }

    pub fn nodes(&self) -> &[(Complex64, f64, f64)] {
        &self.nodes
    }

    /// `int g(z) (1-|z|^2)^exponent dA`.
    pub fn integrate<F: FnMut(Complex64) -> f64>(&self, exponent: f64, mut g: F) -> f64 {
        self.nodes.iter().map(|(z, w, omt)| w * omt.powf(exponent) * g(*z)).sum()
    }
}

/// `int_Omega |f|^2 (1-|z|^2)^alpha dA = int_Omega u dmu`.
pub fn concentration_integral(f: &BergmanFunction, set: &HyperbolicSet) -> Result<f64> {
    match set {
        HyperbolicSet::Disc(d) => {
            let rule = DiscRule::for_disc(d, f.len())?;
            Ok(rule.integrate(f.alpha().alpha(), |z| f.eval(z).norm_sqr()))
        }
        HyperbolicSet::Mask(m) => {
            if m.count() == 0 {
                return Ok(0.0);
            }
            let t = mask_gram(m, f.alpha().alpha(), f.len(), &basis_scale(f.alpha(), f.len()))?;
            let a = f.coeffs();
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..a.len() {
                for j in 0..a.len() {
                    acc += a[i].conj() * t[i * a.len() + j] * a[j];
                }
            }
            Ok(acc.re)
        }
    }
}

fn basis_scale(alpha: AlphaParam, n: usize) -> Vec<f64> {
    let f = BergmanFunction::new(alpha, vec![Complex64::new(1.0, 0.0); n]).expect("nonempty");
    f.taylor().iter().map(|c| c.re).collect()
}

/// `G[m][n] = int_S s_m s_n z^n conj(z)^m (1-|z|^2)^exponent dA` over the
/// exact cells of a mask, so that `a^H G a = int_S |sum a_k s_k z^k|^2 ...`.
/// Radial cell integrals use a 16-point rule per cell, angular ones are exact.
pub(crate) fn mask_gram(mask: &GridMask, exponent: f64, dim: usize, scale: &[f64]) -> Result<Vec<Complex64>> {
    let grid = mask.grid();
    let m = grid.angular_count();
    if m < 2 * dim {
        return Err(domain(alloc::format!(
            "grid with {m} angles is too coarse for {dim} basis functions"
        )));
    }
    let (gx, gw) = gauss_legendre(16);
    let dth = 2.0 * PI / m as f64;
    let maxd = dim.saturating_sub(1);
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    let bits = mask.bits();
    let mut ang = vec![Complex64::new(0.0, 0.0); 2 * maxd + 1];
    let mut rad = vec![0.0; 2 * maxd + 1];
    for i in 0..grid.n_radial() {
        let row = &bits[i * m..(i + 1) * m];
        if !row.iter().any(|b| *b) {
            continue;
        }
        // angular factors int e^{i d theta} over member sectors, d = n - m
        for (k, a) in ang.iter_mut().enumerate() {
            let d = k as f64 - maxd as f64;
            let sinc = if d == 0.0 { dth } else { 2.0 * (0.5 * d * dth).sin() / d };
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, b) in row.iter().enumerate() {
                if *b {
                    acc += Complex64::from_polar(1.0, d * grid.angle(j));
                }
            }
            *a = acc * sinc;
        }
        // radial factors (1/2) int r^q (1-t)^exponent dt, q = m + n
        let (hi, lo) = grid.ring_edges(i);
        let h = 0.5 * (hi - lo);
        let c = 0.5 * (hi + lo);
        for r in rad.iter_mut() {
            *r = 0.0;
        }
        for (x, w) in gx.iter().zip(&gw) {
            let omt = c + h * x;
            let rr = (1.0 - omt).max(0.0).sqrt();
            let base = 0.5 * h * w * omt.powf(exponent);
            let mut p = 1.0;
            for q in rad.iter_mut() {
                *q += base * p;
                p *= rr;
            }
        }
        for a in 0..dim {
            for b in 0..dim {
                let d = b as isize - a as isize + maxd as isize;
                out[a * dim + b] += ang[d as usize] * rad[a + b];
            }
        }
    }
    for a in 0..dim {
        for b in 0..dim {
            out[a * dim + b] *= scale[a] * scale[b];
        }
    }
    Ok(out)
}

/// Compression of the localization operator of a set to the first `dim`
/// basis functions.
#[derive(Clone, Debug)]
pub struct LocalizationMatrix {
    pub alpha: AlphaParam,
    pub matrix: HermitianMatrix,
}

impl LocalizationMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// `T[m][n] = int_Omega e_m conj(e_n) (1-|z|^2)^alpha dA` for `m, n < dim`,
/// `e_k = z^k / sqrt(c_k)`.
pub fn localization_matrix(alpha: AlphaParam, set: &HyperbolicSet, dim: usize) -> Result<LocalizationMatrix> {
    if dim == 0 {
        return Err(domain("localization matrix needs dim >= 1"));
    }
    let scale = basis_scale(alpha, dim);
    let data = match set {
        HyperbolicSet::Disc(d) => {
            let rule = DiscRule::for_disc(d, dim)?;
            let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            for (z, w, omt) in rule.nodes() {
                let wt = w * omt.powf(alpha.alpha());
                let mut p = Complex64::new(1.0, 0.0);
                for k in 0..dim {
                    e[k] = p * scale[k];
                    p *= z;
                }
                for a in 0..dim {
                    let ea = e[a] * wt;
                    for b in a..dim {
                        out[a * dim + b] += ea * e[b].conj();
                    }
                }
            }
            for a in 0..dim {
                for b in 0..a {
                    out[a * dim + b] = out[b * dim + a].conj();
                }
            }
            out
        }
        HyperbolicSet::Mask(m) => {
            // mask_gram pairs conj(z)^a z^b; T[a][b] pairs z^a conj(z)^b
            let g = mask_gram(m, alpha.alpha(), dim, &scale)?;
            let mut out = g.clone();
            for a in 0..dim {
                for b in 0..dim {
                    out[a * dim + b] = g[b * dim + a];
                }
            }
            out
        }
    };
    let matrix = HermitianMatrix::from_row_major(dim, data, 1e-10)?;
    Ok(LocalizationMatrix { alpha, matrix })
}

/// Largest eigenvalue of `T` and its unit eigenvector as a function. The
/// spectrum must lie in `[-1e-10, 1 + 1e-10]`; the eigenvalue is clipped to
/// `[0, 1]` afterwards.
pub fn lambda_max(t: &LocalizationMatrix) -> Result<(f64, BergmanFunction)> {
    let eg = eigh(&t.matrix)?;
    let n = t.dim();
    let (lo, hi) = (eg.values[0], eg.values[n - 1]);
    if lo < -1e-10 || hi > 1.0 + 1e-10 {
        return Err(Error::Regime(alloc::format!(
            "localization spectrum [{lo:e}, {hi}] leaves [0, 1]; the grid is too coarse"
        )));
    }
    // eigenvector coefficients in the basis, conjugated to match T's layout
    let v: Vec<Complex64> = eg.vector(n - 1).iter().map(|c| c.conj()).collect();
    Ok((hi.clamp(0.0, 1.0), BergmanFunction::new(t.alpha, v)?))
}

/// Deficit of a function on a set against the sharp bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeficitReport {
    pub s: f64,
    pub theta: f64,
    pub concentration: f64,
    pub deficit: f64,
    pub f_norm: f64,
}

/// `1 - int_Omega u dmu / (||f||^2 theta_alpha(mu(Omega)))`.
pub fn deficit(f: &BergmanFunction, set: &HyperbolicSet) -> Result<DeficitReport> {
    let s = mu_measure(set);
    if !(s > 0.0) {
        return Err(domain("deficit needs a set of positive measure"));
    }
    let f_norm = f.norm();
    if !(f_norm > 0.0) {
        return Err(domain("deficit needs a nonzero function"));
    }
    let th = theta(f.alpha(), s);
    let conc = concentration_integral(f, set)?;
    Ok(DeficitReport { s, theta: th, concentration: conc, deficit: 1.0 - conc / (f_norm * f_norm * th), f_norm })
}
