//! Polar tensor quadrature on the disk, in the variable `t = |z|^2`.
//!
//! Radial nodes are Gauss–Legendre in `t` on one or more panels, angles are
//! equispaced. Node `(i, j)` sits at `sqrt(t_i) e^{2 pi i j / M}` and carries
//! area weight `pi w_i / M`, since `dA = dt dtheta / 2`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::specfun::{lgamma, AlphaParam};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d.is_finite() {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = 0.0;
    for j in 0..n {
        let jf = j as f64;
        let p2 = p1;
        p1 = p0;
        p0 = ((2.0 * jf + 1.0) * z * p1 - jf * p2) / (jf + 1.0);
    }
    let nf = n as f64;
    (p0, nf * (z * p0 - p1) / (z * z - 1.0))
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    (x.iter().map(|xi| m + h * xi).collect(), w.iter().map(|wi| h * wi).collect())
}

/// Generalized Gauss–Laguerre rule for `int_0^inf t^a e^{-t} g(t) dt`.
///
/// Nodes start from the Jacobi-matrix eigenvalues and are polished by Newton
/// steps on the three-term recurrence; weights come from the derivative
/// formula, which keeps them accurate in relative terms far into the tail.
pub fn gauss_laguerre(n: usize, a: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || !(a > -1.0) {
        return Err(domain("gauss_laguerre needs n >= 1 and a > -1"));
    }
    let mut diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0 + a).collect();
    let mut off: Vec<f64> = (0..n)
        .map(|k| if k + 1 < n { ((k as f64 + 1.0) * (k as f64 + 1.0 + a)).sqrt() } else { 0.0 })
        .collect();
    crate::linalg::tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let ln_norm = lgamma(n as f64 + a) - lgamma(n as f64);
    let mut w = vec![0.0; n];
    for (i, x) in diag.iter_mut().enumerate() {
        let mut z = *x;
        for _ in 0..20 {
            let (_, pn, pn1) = laguerre_pair(n, a, z);
            let dp = (n as f64 * pn - (n as f64 + a) * pn1) / z;
            let dz = pn / dp;
            z -= dz;
            if dz.abs() <= 4e-16 * z.abs() {
                break;
            }
        }
        // w = Gamma(n+a) / (n! * n * |L_n'(z) L_{n-1}(z)|) up to the rescale
        let (ln_scale, pn, pn1) = laguerre_pair(n, a, z);
        let dp = (n as f64 * pn - (n as f64 + a) * pn1) / z;
        w[i] = (ln_norm - 2.0 * ln_scale - (n as f64).ln() - (dp * pn1).abs().ln()).exp();
        *x = z;
    }
    Ok((diag, w))
}

/// `(ln s, L_n / s, L_{n-1} / s)` with a running rescale to avoid overflow.
fn laguerre_pair(n: usize, a: f64, z: f64) -> (f64, f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    let mut ln_scale = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf - 1.0 + a - z) * p2 - (jf - 1.0 + a) * p3) / jf;
        let m = p1.abs().max(p2.abs());
        if m > 1e150 {
            p1 /= m;
            p2 /= m;
            ln_scale += m.ln();
        }
    }
    (ln_scale, p1, p2)
}

/// Which measure to attach to the node weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    /// Lebesgue area `dA`.
    Plain,
    /// `(1-|z|^2)^alpha dA`.
    Bergman(AlphaParam),
    /// `(1-|z|^2)^{-2} dA`.
    Hyperbolic,
}

impl Weight {
    /// Density relative to `dA` at a point with `1 - |z|^2 = one_minus_t`.
    pub fn density(&self, one_minus_t: f64) -> f64 {
        match self {
            Weight::Plain => 1.0,
            Weight::Bergman(a) => one_minus_t.powf(a.alpha()),
            Weight::Hyperbolic => 1.0 / (one_minus_t * one_minus_t),
        }
    }

    /// `int density d(1-t)` between `lo < hi` in the variable `1 - t`;
    /// times `pi` this is the exact mass of the annulus.
    pub fn mass(&self, hi: f64, lo: f64) -> f64 {
        match self {
            Weight::Plain => hi - lo,
            Weight::Bergman(a) => {
                let b = a.plus_one();
                hi.powf(b) * -(b * (lo / hi).ln()).exp_m1() / b
            }
            Weight::Hyperbolic => (hi - lo) / (hi * lo),
        }
    }
}

/// A radial node in `t = r^2`. `one_minus_t` is carried separately so that
/// weights near the boundary keep full relative precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialNode {
    pub t: f64,
    pub one_minus_t: f64,
    pub weight: f64,
}

/// Parameters that identify a grid; two grids are compatible iff equal.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    /// Panel breakpoints expressed as `1 - t`, strictly decreasing, first
    /// entry 1 (the origin) and last entry `1 - r_max^2`.
    pub breaks: Vec<f64>,
    pub nodes_per_panel: usize,
    pub angular_count: usize,
}

#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    spec: GridSpec,
    radial: Vec<RadialNode>,
    edges: Vec<(f64, f64)>,
    cos_sin: Vec<(f64, f64)>,
}

impl QuadratureGrid {
    /// Single Gauss–Legendre panel on `t in (0, r_max^2)`.
    pub fn build(n_radial: usize, angular_count: usize, r_max: f64) -> Result<Self> {
        if n_radial < 4 || angular_count < 8 {
            return Err(domain("build_grid needs n_radial >= 4 and angular_count >= 8"));
        }
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(domain(alloc::format!("r_max must lie in (0, 1), got {r_max}")));
        }
        let omt = (1.0 - r_max) * (1.0 + r_max);
        Self::from_breaks(vec![1.0, omt], n_radial, angular_count)
    }

    /// Panels `[1, 1/2, 1/4, ...]` in `1 - t`, the last one ending at
    /// `one_minus_tmax`. Resolves boundary layers for any `alpha`.
    pub fn graded(nodes_per_panel: usize, angular_count: usize, one_minus_tmax: f64) -> Result<Self> {
        if !(one_minus_tmax > 0.0 && one_minus_tmax < 1.0) {
            return Err(domain("graded grid needs 0 < 1 - r_max^2 < 1"));
        }
        let mut breaks = vec![1.0];
        let mut b = 0.5;
        while b > one_minus_tmax * 1.5 {
            breaks.push(b);
            b *= 0.5;
        }
        breaks.push(one_minus_tmax);
        Self::from_breaks(breaks, nodes_per_panel, angular_count)
    }

    /// Graded grid whose truncation drops less than `1e-12` of the
    /// `(1-|z|^2)^alpha` mass, capped so that `1 - r_max^2 >= 1e-15`.
    pub fn default_for(alpha: AlphaParam, nodes_per_panel: usize, angular_count: usize) -> Result<Self> {
        Self::graded(nodes_per_panel, angular_count, default_one_minus_tmax(alpha))
    }

    /// General constructor from panel breaks in `1 - t`.
    pub fn from_breaks(breaks: Vec<f64>, nodes_per_panel: usize, angular_count: usize) -> Result<Self> {
        if nodes_per_panel < 4 || angular_count < 8 {
            return Err(domain("grid needs >= 4 nodes per panel and >= 8 angles"));
        }
        if breaks.len() < 2 || breaks[0] != 1.0 || breaks.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(domain("panel breaks must start at 1 and decrease strictly"));
        }
        let last = *breaks.last().unwrap();
        if !(last > 0.0) {
            return Err(domain("grid must stop strictly inside the disk"));
        }
        let (x, w) = gauss_legendre(nodes_per_panel);
        let mut radial = Vec::with_capacity(nodes_per_panel * (breaks.len() - 1));
        let mut edges = Vec::with_capacity(radial.capacity());
        for p in breaks.windows(2) {
            let (hi, lo) = (p[0], p[1]);
            let h = 0.5 * (hi - lo);
            let m = 0.5 * (hi + lo);
            // increasing t is decreasing 1 - t; cumulative weights separate
            // consecutive Gauss nodes, so they serve as cell edges
            let mut top = hi;
            for k in 0..nodes_per_panel {
                let omt = m - h * x[k];
                radial.push(RadialNode { t: 1.0 - omt, one_minus_t: omt, weight: h * w[k] });
                let bottom = if k + 1 == nodes_per_panel { lo } else { top - h * w[k] };
                edges.push((top, bottom));
                top = bottom;
            }
        }
        let cos_sin = (0..angular_count)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / angular_count as f64;
                (th.cos(), th.sin())
            })
            .collect();
        Ok(Self { spec: GridSpec { breaks, nodes_per_panel, angular_count }, radial, edges, cos_sin })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn radial(&self) -> &[RadialNode] {
        &self.radial
    }

    pub fn n_radial(&self) -> usize {
        self.radial.len()
    }

    pub fn angular_count(&self) -> usize {
        self.spec.angular_count
    }

    /// Number of cells, `n_radial * angular_count`.
    pub fn len(&self) -> usize {
        self.radial.len() * self.spec.angular_count
    }

    pub fn is_empty(&self) -> bool {
        self.radial.is_empty()
    }

    /// `1 - r_max^2`.
    pub fn one_minus_tmax(&self) -> f64 {
        *self.spec.breaks.last().unwrap()
    }

    pub fn r_max(&self) -> f64 {
        (1.0 - self.one_minus_tmax()).sqrt()
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.spec.angular_count as f64
    }

    /// `(cos, sin)` of the `j`-th angle.
    pub fn direction(&self, j: usize) -> (f64, f64) {
        self.cos_sin[j]
    }

    /// Point of cell `idx = i * angular_count + j`.
    pub fn point(&self, idx: usize) -> Complex64 {
        let m = self.spec.angular_count;
        let (i, j) = (idx / m, idx % m);
        let r = self.radial[i].t.sqrt();
        let (c, s) = self.cos_sin[j];
        Complex64::new(r * c, r * s)
    }

    /// Radial index of cell `idx`.
    pub fn ring_of(&self, idx: usize) -> usize {
        idx / self.spec.angular_count
    }

    /// Area weight `pi w_i / M` of ring `i`.
    pub fn area_weight(&self, i: usize) -> f64 {
        PI * self.radial[i].weight / self.spec.angular_count as f64
    }

    /// Weight of every cell on ring `i` against `weight`.
    pub fn ring_weight(&self, i: usize, weight: Weight) -> f64 {
        self.area_weight(i) * weight.density(self.radial[i].one_minus_t)
    }

    /// Cell weight for cell `idx`.
    pub fn cell_weight(&self, idx: usize, weight: Weight) -> f64 {
        self.ring_weight(self.ring_of(idx), weight)
    }

    /// Cell edges of ring `i` as `(1 - t_inner, 1 - t_outer)`.
    pub fn ring_edges(&self, i: usize) -> (f64, f64) {
        self.edges[i]
    }

    /// Exact `weight`-mass of one cell on ring `i`: the cell is the polar
    /// rectangle between the ring edges and half an angular step either side
    /// of its node.
    pub fn ring_mass(&self, i: usize, weight: Weight) -> f64 {
        let (hi, lo) = self.edges[i];
        PI * weight.mass(hi, lo) / self.spec.angular_count as f64
    }

    pub fn cell_mass(&self, idx: usize, weight: Weight) -> f64 {
        self.ring_mass(self.ring_of(idx), weight)
    }

    /// Ring whose cells contain radius squared `t`, if inside the grid.
    pub fn ring_containing(&self, t: f64) -> Option<usize> {
        let omt = 1.0 - t;
        if !(omt <= 1.0) || omt < self.one_minus_tmax() {
            return None;
        }
        // edges decrease in 1 - t
        let i = self.edges.partition_point(|e| e.1 > omt);
        Some(i.min(self.edges.len() - 1))
    }

    /// Angular sector containing angle `theta`.
    pub fn sector_containing(&self, theta: f64) -> usize {
        let m = self.spec.angular_count as f64;
        let x = theta / (2.0 * PI) * m;
        let r = x.round() % m;
        (if r < 0.0 { r + m } else { r }) as usize % self.spec.angular_count
    }

    /// Weighted sum of node samples, reduced ring by ring in a fixed order.
    pub fn integrate(&self, samples: &[Complex64], weight: Weight) -> Result<Complex64> {
        if samples.len() != self.len() {
            return Err(Error::Shape { expected: self.len(), got: samples.len() });
        }
        let m = self.spec.angular_count;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ring) in samples.chunks(m).enumerate() {
            let s: Complex64 = pairwise_sum(ring);
            acc += s * self.ring_weight(i, weight);
        }
        Ok(acc)
    }

    /// Sample `f` at every node in cell order.
    pub fn sample<F: FnMut(Complex64) -> Complex64>(&self, mut f: F) -> Vec<Complex64> {
        (0..self.len()).map(|idx| f(self.point(idx))).collect()
    }
}

/// `1 - r_max^2` used by [`QuadratureGrid::default_for`].
pub fn default_one_minus_tmax(alpha: AlphaParam) -> f64 {
    let drop = (1e-12f64.ln() / alpha.plus_one()).exp();
    drop.clamp(1e-15, 1e-4)
}

fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 8 {
        return xs.iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
