//! Gamma and Beta functions, the basis constants `c_n` of the weighted
//! Bergman spaces, and a few cancellation-free power helpers.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;


use crate::error::{domain, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Weight exponent `alpha > -1`.
///
/// `alpha + 1` is stored separately so that callers working near `-1`
/// can pass it directly without losing digits to cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaParam {
    alpha: f64,
    plus_one: f64,
}

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(domain(alloc::format!("alpha must be finite and > -1, got {alpha}")));
        }
        Ok(Self { alpha, plus_one: alpha + 1.0 })
    }

    /// Build from `alpha + 1 > 0` given exactly.
    pub fn from_plus_one(plus_one: f64) -> Result<Self> {
        if !plus_one.is_finite() || plus_one <= 0.0 {
            return Err(domain(alloc::format!("alpha + 1 must be finite and > 0, got {plus_one}")));
        }
        Ok(Self { alpha: plus_one - 1.0, plus_one })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn plus_one(&self) -> f64 {
        self.plus_one
    }

    pub fn plus_two(&self) -> f64 {
        self.plus_one + 1.0
    }
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain(alloc::format!("ln_gamma needs a finite positive argument, got {x}")));
    }
    Ok(lgamma(x))
}

/// `zeta(k) - 1` for `k = 2..=30`.
const ZETA_M1: [f64; 29] = [
    0.644_934_066_848_226_4,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_339,
    0.002_008_392_826_082_214,
    9.945_751_278_180_853e-4,
    4.941_886_041_194_646e-4,
    2.460_865_533_080_483e-4,
    1.227_133_475_784_891_5e-4,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_762e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_96e-7,
    4.769_329_867_878_065e-7,
    2.384_505_027_277_33e-7,
    1.192_199_259_653_110_7e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504e-8,
    7.450_711_789_835_429e-9,
    3.725_334_024_788_457e-9,
    1.862_659_723_513_049e-9,
    9.313_274_324_196_682e-10,
];
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ln Gamma(2 + z)` for `|z| <= 1/2` from its Taylor series, so the zero at
/// `z = 0` is resolved to full relative precision.
fn lgamma_two_plus(z: f64) -> f64 {
    let mut acc = 0.0;
    let mut zk = -z;
    for (i, c) in ZETA_M1.iter().enumerate() {
        zk *= -z;
        acc += c * zk / (i + 2) as f64;
    }
    acc + (1.0 - EULER_GAMMA) * z
}

/// Unchecked `ln Gamma` for positive finite arguments.
pub(crate) fn lgamma(x: f64) -> f64 {
    if x >= 10.0 {
        return (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_correction(x);
    }
    if x < 1.5 {
        // descend from [1.5, 2.5) through Gamma(x) = Gamma(x + 1) / x
        let mut y = x;
        let mut ln_div = 0.0;
        while y < 1.5 {
            ln_div += if (y - 1.0).abs() < 0.5 { (y - 1.0).ln_1p() } else { y.ln() };
            y += 1.0;
        }
        return lgamma_two_plus(y - 2.0) - ln_div;
    }
    if x < 2.5 {
        return lgamma_two_plus(x - 2.0);
    }
    // shift up to the Stirling range
    let mut y = x;
    let mut prod = 1.0;
    while y < 10.0 {
        prod *= y;
        y += 1.0;
    }
    (y - 0.5) * y.ln() - y + LN_SQRT_2PI + stirling_correction(y) - prod.ln()
}

/// Remainder `ln Gamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)]` for `x >= 10`.
pub(crate) fn stirling_correction(x: f64) -> f64 {
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let r = 1.0 / x;
    let r2 = r * r;
    let mut acc = 0.0;
    for c in C.iter().rev() {
        acc = acc * r2 + c;
    }
    acc * r
}

fn stirling_correction_any(x: f64) -> f64 {
    if x >= 10.0 {
        stirling_correction(x)
    } else {
        lgamma(x) - ((x - 0.5) * x.ln() - x + LN_SQRT_2PI)
    }
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    if a >= 10.0 && b >= 10.0 {
        let ab = a + b;
        // (a-1/2)ln a + (b-1/2)ln b - (a+b-1/2)ln(a+b), regrouped
        let big = (a - 0.5) * (a / ab).ln() + b * (b / ab).ln() - 0.5 * b.ln();
        return LN_SQRT_2PI + big + stirling_correction(a) + stirling_correction(b)
            - stirling_correction(ab);
    }
    lgamma(a) + lgamma(b) - lgamma(a + b)
}

/// `ln[x^a (1-x)^b / B(a,b)]` with the large-parameter cancellation removed.
fn ln_front(x: f64, a: f64, b: f64) -> f64 {
    if a >= 8.0 && b >= 8.0 {
        let ab = a + b;
        let x0 = a / ab;
        let d = x - x0;
        let t1 = a * (d / x0).ln_1p();
        let t2 = b * (-d / (1.0 - x0)).ln_1p();
        let corr = stirling_correction_any(a) + stirling_correction_any(b)
            - stirling_correction_any(ab);
        return t1 + t2 + 0.5 * (a * b / ab).ln() - LN_SQRT_2PI - corr;
    }
    a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b)
}

/// Modified Lentz evaluation of the incomplete-Beta continued fraction.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..200_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete Beta function `I_x(a, b)`.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    Ok(reg_inc_beta_pair(x, a, b)?.0)
}

/// `(I_x(a,b), 1 - I_x(a,b))`, each computed without subtracting from one
/// when it is the small member of the pair.
pub fn reg_inc_beta_pair(x: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&x) || !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain(alloc::format!(
            "reg_inc_beta needs 0 <= x <= 1 and a, b > 0; got x={x}, a={a}, b={b}"
        )));
    }
    Ok(inc_beta_pair(x, a, b))
}

pub(crate) fn inc_beta_pair(x: f64, a: f64, b: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    if x <= a / (a + b) {
        let v = (ln_front(x, a, b).exp() * beta_cf(x, a, b) / a).clamp(0.0, 1.0);
        (v, 1.0 - v)
    } else {
        let w = (ln_front(1.0 - x, b, a).exp() * beta_cf(1.0 - x, b, a) / b).clamp(0.0, 1.0);
        (1.0 - w, w)
    }
}

/// `ln[(alpha+1) c_n / pi] = ln[Gamma(alpha+2) n! / Gamma(n+alpha+2)]`.
pub fn ln_basis_ratio(n: usize, alpha: AlphaParam) -> f64 {
    let b = alpha.plus_one();
    if n <= 256 {
        let mut acc = 0.0;
        for j in 1..=n {
            acc -= (b / j as f64).ln_1p();
        }
        acc
    } else {
        let n = n as f64;
        // shift from the larger argument so the big values cancel analytically
        if b >= n {
            lgamma(n + 1.0) - ln_gamma_shift(b + 1.0, n)
        } else {
            lgamma(b + 1.0) - ln_gamma_shift(n + 1.0, b)
        }
    }
}

/// `ln Gamma(x + d) - ln Gamma(x)` for `x >= 20`, `d >= 0`, from the
/// difference of Stirling series so that the large `ln Gamma` values never
/// get subtracted.
fn ln_gamma_shift(x: f64, d: f64) -> f64 {
    const SERIES: [f64; 5] = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0];
    let tail = |z: f64| {
        let r = 1.0 / (z * z);
        let mut p = 1.0 / z;
        let mut acc = 0.0;
        for c in SERIES {
            acc += c * p;
            p *= r;
        }
        acc
    };
    let y = x + d;
    (x - 0.5) * (d / x).ln_1p() + d * y.ln() - d + (tail(y) - tail(x))
}

/// `(alpha+1) c_n / pi`, which tends to one as `alpha -> -1`.
pub fn basis_ratio(n: usize, alpha: AlphaParam) -> f64 {
    ln_basis_ratio(n, alpha).exp()
}

/// `ln c_n`.
pub fn ln_basis_norm_c(n: usize, alpha: AlphaParam) -> f64 {
    PI.ln() - alpha.plus_one().ln() + ln_basis_ratio(n, alpha)
}

/// `c_n = pi Gamma(alpha+1) Gamma(n+1) / Gamma(alpha+n+2)`, the squared
/// norm of `z^n` in the weighted Bergman space.
pub fn basis_norm_c(n: usize, alpha: AlphaParam) -> f64 {
    ln_basis_norm_c(n, alpha).exp()
}

/// Gautschi sandwich for `(alpha+1) c_n / pi` when `alpha` lies in `(-1, 0)`.
pub fn gautschi_bounds(n: usize, alpha: AlphaParam) -> Result<(f64, f64)> {
    let a = alpha.alpha();
    if !(a > -1.0 && a < 0.0) {
        return Err(domain(alloc::format!("gautschi_bounds needs alpha in (-1, 0), got {a}")));
    }
    let b = alpha.plus_one();
    let g = lgamma(b + 1.0);
    let n = n as f64;
    let lo = (g - b * (n + b + 1.0).ln()).exp();
    let hi = (g - b * (n + b).ln()).exp();
    Ok((lo, hi))
}

/// `1 - (1+x)^(-p)` for `x >= 0`, accurate for tiny `p` or tiny `x`.
pub fn one_minus_pow1p_neg(p: f64, x: f64) -> f64 {
    -(-p * x.ln_1p()).exp_m1()
}

/// `(1+x)^(-p)`.
pub fn pow1p_neg(p: f64, x: f64) -> f64 {
    (-p * x.ln_1p()).exp()
}

/// `((1+x)^p - 1) / p`, with the `p -> 0` limit `ln(1+x)`.
pub fn pow1p_minus_one_over(p: f64, x: f64) -> f64 {
    let l = x.ln_1p();
    if p == 0.0 {
        return l;
    }
    (p * l).exp_m1() / p
}

/// Rising factorial ratio `(a)_k / k!` for `k = 0..n`.
pub fn rising_over_factorial(a: f64, n: usize) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec::Vec::with_capacity(n);
    let mut g = 1.0;
    for k in 0..n {
        out.push(g);
        g *= (a + k as f64) / (k as f64 + 1.0);
    }
    out
}
