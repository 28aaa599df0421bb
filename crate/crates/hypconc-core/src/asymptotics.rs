//! The two-mode family `e_0 + eps e_2`, its deficit on centered discs,
//! the second-variation coefficients `W_k(s)` and the threshold below which
//! no multiple of `(1+s/pi)^{(alpha+1)/2}` can serve as a stability constant.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bergman::{BergmanFunction, DensityProfile};
use crate::concentration::{theta, theta_over_plus_one};
use crate::error::{domain, Result};
use crate::quadrature::QuadratureGrid;
use crate::specfun::{one_minus_pow1p_neg, pow1p_neg, reg_inc_beta, AlphaParam};

/// The perturbation `(1, 0, eps)` of the constant extremal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SharpnessFamily {
    pub alpha: AlphaParam,
    pub epsilon: f64,
}

impl SharpnessFamily {
    pub fn new(alpha: AlphaParam, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(domain("epsilon must be finite and nonnegative"));
        }
        Ok(Self { alpha, epsilon })
    }

    /// Unnormalized coefficients `(1, 0, eps)`.
    pub fn function(&self) -> BergmanFunction {
        BergmanFunction::from_real(self.alpha, &[1.0, 0.0, self.epsilon]).expect("finite")
    }
}

/// `x = s / (s + pi)`, the squared radius of the centered disc of measure `s`.
fn radius_sq(s: f64) -> f64 {
    s / (s + PI)
}

/// `(I1, I2) = (int_B (1-|z|^2)^alpha dA, int_B |z|^4 (1-|z|^2)^alpha dA)`
/// over the centered disc of measure `s`, `I2` in its three-term form.
pub fn moment_integrals(alpha: AlphaParam, s: f64) -> Result<(f64, f64)> {
    if !(s > 0.0) {
        return Err(domain("moment integrals need s > 0"));
    }
    let b = alpha.plus_one();
    let q = s / PI;
    let i1 = PI * theta_over_plus_one(alpha, s);
    let i2 = PI
        * (theta_over_plus_one(alpha, s) - 2.0 * one_minus_pow1p_neg(b + 1.0, q) / (b + 1.0)
            + one_minus_pow1p_neg(b + 2.0, q) / (b + 2.0));
    Ok((i1, i2))
}

/// Deficit factor `c_alpha(s)` with `delta = eps^2/(1+eps^2) c_alpha(s)`:
/// `c_alpha = (alpha+1) x (1 + (alpha+2) x / 2) (1+s/pi)^{-(alpha+1)} / theta_alpha(s)`.
pub fn deficit_factor(alpha: AlphaParam, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain("deficit factor needs s > 0"));
    }
    let x = radius_sq(s);
    let y = pow1p_neg(alpha.plus_one(), s / PI);
    Ok(x * (1.0 + 0.5 * alpha.plus_two() * x) * y / theta_over_plus_one(alpha, s))
}

/// Deficit of `(1, 0, eps)` on the centered disc of measure `s`.
pub fn sharpness_deficit_closed(alpha: AlphaParam, s: f64, eps: f64) -> Result<f64> {
    let e2 = eps * eps;
    Ok(e2 / (1.0 + e2) * deficit_factor(alpha, s)?)
}

/// `lim_{alpha -> -1} c_alpha(s) = x (1 + x/2) / ln(1 + s/pi)`.
pub fn c_limit(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain("c_limit needs s > 0"));
    }
    let x = radius_sq(s);
    Ok(x * (1.0 + 0.5 * x) / (s / PI).ln_1p())
}

/// `W_k(s) = (1-x)^{alpha+1} [ (alpha+1)/(alpha+2) (alpha+2)_k/k! x^k
///   - sum_{j=1..k} (alpha+1)_j/j! x^j ]`, a cancellation-free rewrite of
/// `I_x(k+1, alpha+1) - theta + pi/((alpha+2) c_k) (1-x)^{alpha+1} x^k`.
pub fn second_variation_w(alpha: AlphaParam, s: f64, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(domain("W_k is defined for k >= 2"));
    }
    if !(s > 0.0) {
        return Err(domain("W_k needs s > 0"));
    }
    let (b, p) = (alpha.plus_one(), alpha.plus_two());
    let x = radius_sq(s);
    let y = pow1p_neg(b, s / PI);
    let mut rising_p = p; // (alpha+2)_j / j!
    let mut rising_b = b; // (alpha+1)_j / j!
    let mut xj = x;
    let mut sum = rising_b * xj;
    for j in 2..=k {
        let jf = j as f64;
        rising_p *= (p + jf - 1.0) / jf;
        rising_b *= (b + jf - 1.0) / jf;
        xj *= x;
        sum += rising_b * xj;
    }
    let head = b / p * rising_p * xj;
    Ok(y * (head - sum))
}

/// `W_2(s) = -(alpha+1)/2 (1+s/pi)^{-(alpha+1)} s (s+2 pi) / (s+pi)^2`.
pub fn w2_closed(alpha: AlphaParam, s: f64) -> f64 {
    let y = pow1p_neg(alpha.plus_one(), s / PI);
    -0.5 * alpha.plus_one() * y * s * (s + 2.0 * PI) / ((s + PI) * (s + PI))
}

/// The uniform second-variation bound in two readings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegdefBound {
    /// `W_2(s)`, the sharp bound for unit perturbations orthogonal to `1, z`.
    pub w2: f64,
    /// `-(pi^{alpha+2}/2) s (pi+s)^{-3-alpha} (s+2pi)`.
    pub stated: f64,
    /// `stated / w2 = pi/(alpha+1)`.
    pub ratio: f64,
}

pub fn negdef_bound(alpha: AlphaParam, s: f64) -> Result<NegdefBound> {
    if !(s > 0.0) {
        return Err(domain("negdef_bound needs s > 0"));
    }
    let w2 = w2_closed(alpha, s);
    let y = pow1p_neg(alpha.plus_one(), s / PI);
    let stated = -0.5 * PI * y * s * (s + 2.0 * PI) / ((s + PI) * (s + PI));
    Ok(NegdefBound { w2, stated, ratio: stated / w2 })
}

/// `sum_k |a_k|^2 W_k(s)` for coefficients indexed from `k = 0`; entries
/// with `k < 2` must vanish.
pub fn second_variation(alpha: AlphaParam, s: f64, coeffs: &[Complex64]) -> Result<f64> {
    if coeffs.iter().take(2).any(|c| c.norm() > 0.0) {
        return Err(domain("perturbation must be orthogonal to 1 and z"));
    }
    let mut acc = 0.0;
    for (k, c) in coeffs.iter().enumerate().skip(2) {
        if c.norm() > 0.0 {
            acc += c.norm_sqr() * second_variation_w(alpha, s, k)?;
        }
    }
    Ok(acc)
}

/// The three pieces of `W_k` evaluated separately, for cross-checks:
/// `(I_x(k+1, alpha+1), theta_alpha(s), pi/((alpha+2) c_k) (1-x)^{alpha+1} x^k)`.
pub fn w_terms(alpha: AlphaParam, s: f64, k: usize) -> Result<(f64, f64, f64)> {
    let x = radius_sq(s);
    let first = reg_inc_beta(x, k as f64 + 1.0, alpha.plus_one())?;
    let th = theta(alpha, s);
    let ln_c = crate::specfun::ln_basis_norm_c(k, alpha);
    let third = (PI.ln() - alpha.plus_two().ln() - ln_c - alpha.plus_one() * (s / PI).ln_1p()
        + k as f64 * x.ln())
    .exp();
    Ok((first, th, third))
}

/// `(alpha+2)^{-1/(alpha+1)}`, the least `c` for which `c (1+s/pi)^{...}`
/// could be admissible as the function-stability constant.
pub fn sigma_threshold(alpha: AlphaParam) -> f64 {
    let b = alpha.plus_one();
    (-(b.ln_1p()) / b).exp()
}

/// Concentration of `f / ||f||` on its own super-level set of measure `s`,
/// with the measure actually attained: `(K, mu)`.
pub fn optimal_concentration(
    f: &BergmanFunction,
    s: f64,
    grid: &QuadratureGrid,
    rays: usize,
) -> Result<(f64, f64)> {
    let prof = DensityProfile::centered(f, grid, rays)?;
    let (_, mu, k) = prof.optimal_set(s)?;
    Ok((k, mu))
}

/// `(theta - K) / eps^2` for `(1,0,eps)` on its optimal set of measure `s`;
/// tends to `-W_2(s)` as `eps -> 0`.
pub fn optimal_set_gap(alpha: AlphaParam, s: f64, eps: f64, grid: &QuadratureGrid, rays: usize) -> Result<f64> {
    let f = SharpnessFamily::new(alpha, eps)?.function();
    let (k, mu) = optimal_concentration(&f, s, grid, rays)?;
    Ok((theta(alpha, mu) - k) / (eps * eps))
}

/// Table rows `(k, W_k)` for `k = 2..=k_max`.
pub fn w_table(alpha: AlphaParam, s: f64, k_max: usize) -> Result<Vec<(usize, f64)>> {
    (2..=k_max).map(|k| Ok((k, second_variation_w(alpha, s, k)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w2_at_alpha_zero_s_pi() {
        let a = AlphaParam::new(0.0).unwrap();
        assert_eq!(w2_closed(a, PI), -3.0 / 16.0);
        assert!((second_variation_w(a, PI, 2).unwrap() + 3.0 / 16.0).abs() < 1e-16);
    }
}
