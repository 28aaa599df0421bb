//! Seeded random test families. Every row of an experiment draws from its
//! own ChaCha stream, so results do not depend on scheduling.

use std::f64::consts::PI;
use std::sync::Arc;

use hypconc_core::bergman::BergmanFunction;
use hypconc_core::hyperbolic::{GridMask, PseudoDisc};
use hypconc_core::quadrature::QuadratureGrid;
use hypconc_core::{AlphaParam, Complex64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const MAX_DEGREE: usize = 6;

/// Generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Unit-norm function of degree `1..=MAX_DEGREE` with standard normal
/// complex coefficients.
pub fn random_function<R: Rng>(rng: &mut R, alpha: AlphaParam) -> BergmanFunction {
    let degree = rng.gen_range(1..=MAX_DEGREE);
    loop {
        let coeffs: Vec<Complex64> = (0..=degree)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let f = BergmanFunction::new(alpha, coeffs).expect("finite coefficients");
        if let Ok((g, _)) = f.normalized() {
            return g;
        }
    }
}

/// Union of one to three pseudo-discs whose measures add up to `s`,
/// rasterized on `grid`, with up to two angular sectors removed.
pub fn random_mask<R: Rng>(rng: &mut R, grid: &Arc<QuadratureGrid>, s: f64) -> GridMask {
    let k = rng.gen_range(1..=3);
    let mut weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w *= s / total;
    }
    let discs: Vec<PseudoDisc> = weights
        .iter()
        .map(|w| {
            let r = 0.7 * rng.gen::<f64>().sqrt();
            let th = rng.gen_range(0.0..2.0 * PI);
            PseudoDisc::new(Complex64::from_polar(r, th), *w).expect("center inside the disk")
        })
        .collect();
    let bites: Vec<(f64, f64)> = (0..rng.gen_range(0..=2))
        .map(|_| {
            let start = rng.gen_range(-PI..PI);
            (start, start + rng.gen_range(0.1..0.8))
        })
        .collect();
    GridMask::from_fn(grid.clone(), |z| {
        let th = z.arg();
        let bitten = bites.iter().any(|(a, b)| {
            let t = if th < *a { th + 2.0 * PI } else { th };
            t < *b
        });
        !bitten && discs.iter().any(|d| d.contains(z))
    })
}
