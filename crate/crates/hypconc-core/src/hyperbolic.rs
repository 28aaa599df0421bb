//! Geometry of the Poincaré disk: the invariant measure
//! `dmu = (1-|z|^2)^{-2} dA`, pseudohyperbolic discs, Möbius maps,
//! symmetric differences, the disc asymmetry and the Cayley transfer from
//! the upper half-plane.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::optimize::nelder_mead;
use crate::quadrature::{gauss_legendre, QuadratureGrid, Weight};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `(z - a) / (1 - conj(a) z)`.
pub fn mobius_apply(a: Complex64, z: Complex64) -> Result<Complex64> {
    if !(a.norm() < 1.0) {
        return Err(domain(alloc::format!("Möbius parameter must lie in the open disk, got {a}")));
    }
    Ok(mobius(a, z))
}

pub(crate) fn mobius(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (1.0 - a.conj() * z)
}

/// Euclidean radius squared of the centered disc of hyperbolic measure `s`.
pub fn centered_radius_sq(s: f64) -> f64 {
    s / (s + PI)
}

/// `mu` of the centered disc of Euclidean radius `r`, i.e. `pi r^2 / (1 - r^2)`.
pub fn centered_disc_measure(r: f64) -> f64 {
    PI * r * r / ((1.0 - r) * (1.0 + r))
}

/// Möbius image of a centered disc, stored both by its hyperbolic center and
/// measure and by its Euclidean center and radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoDisc {
    center: Complex64,
    s: f64,
    pseudo_radius: f64,
    e_center: Complex64,
    e_radius: f64,
}

impl PseudoDisc {
    /// Disc of hyperbolic measure `s` around `center`.
    pub fn new(center: Complex64, s: f64) -> Result<Self> {
        if !(center.norm() < 1.0) {
            return Err(domain("disc center must lie in the open disk"));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(domain(alloc::format!("disc measure must be positive and finite, got {s}")));
        }
        let r2 = centered_radius_sq(s);
        let a2 = center.norm_sqr();
        let den = 1.0 - r2 * a2;
        Ok(Self {
            center,
            s,
            pseudo_radius: r2.sqrt(),
            e_center: center * ((1.0 - r2) / den),
            e_radius: r2.sqrt() * (1.0 - a2) / den,
        })
    }

    /// Recover the hyperbolic description of a Euclidean disc inside the disk.
    pub fn from_euclidean(c: Complex64, rho: f64) -> Result<Self> {
        let cn = c.norm();
        if !(rho > 0.0) || !(cn + rho < 1.0) {
            return Err(domain("Euclidean disc must be nondegenerate and inside the unit disk"));
        }
        if cn == 0.0 {
            return Self::new(Complex64::new(0.0, 0.0), centered_disc_measure(rho));
        }
        let (h1, h2) = ((cn - rho).atanh(), (cn + rho).atanh());
        let a = (0.5 * (h1 + h2)).tanh();
        let r = (0.5 * (h2 - h1)).tanh();
        let mut d = Self::new(c * (a / cn), centered_disc_measure(r))?;
        d.e_center = c;
        d.e_radius = rho;
        Ok(d)
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    /// Hyperbolic measure.
    pub fn measure(&self) -> f64 {
        self.s
    }

    /// Euclidean radius of the centered copy.
    pub fn pseudo_radius(&self) -> f64 {
        self.pseudo_radius
    }

    pub fn euclidean_center(&self) -> Complex64 {
        self.e_center
    }

    pub fn euclidean_radius(&self) -> f64 {
        self.e_radius
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.e_center).norm() < self.e_radius
    }

    /// Image under `z -> (z - b)/(1 - conj(b) z)`.
    pub fn mobius_image(&self, b: Complex64) -> Result<Self> {
        Self::new(mobius_apply(b, self.center)?, self.s)
    }
}

/// Grid cell-indicator set; a cell belongs to the set iff its node does.
#[derive(Clone, Debug)]
pub struct GridMask {
    grid: Arc<QuadratureGrid>,
    bits: Vec<bool>,
}

impl GridMask {
    pub fn new(grid: Arc<QuadratureGrid>, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != grid.len() {
            return Err(Error::Shape { expected: grid.len(), got: bits.len() });
        }
        Ok(Self { grid, bits })
    }

    pub fn from_fn<F: FnMut(Complex64) -> bool>(grid: Arc<QuadratureGrid>, mut f: F) -> Self {
        let bits = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, bits }
    }

    pub fn empty(grid: Arc<QuadratureGrid>) -> Self {
        let bits = vec![false; grid.len()];
        Self { grid, bits }
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Indices of member cells.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)
    }

    pub fn measure_with(&self, weight: Weight) -> f64 {
        self.members().map(|i| self.grid.cell_mass(i, weight)).sum()
    }

    pub fn mu(&self) -> f64 {
        self.measure_with(Weight::Hyperbolic)
    }

    pub fn compatible(&self, other: &GridMask) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.spec() == other.grid.spec()
    }

    fn check(&self, other: &GridMask) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::IncompatibleGrid(
                "masks live on different grids; rasterize both onto one grid first".into(),
            ))
        }
    }

    fn zip_with(&self, other: &GridMask, f: impl Fn(bool, bool) -> bool) -> Result<Self> {
        self.check(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| f(*a, *b)).collect();
        Ok(Self { grid: self.grid.clone(), bits })
    }

    pub fn union(&self, other: &GridMask) -> Result<Self> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &GridMask) -> Result<Self> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &GridMask) -> Result<Self> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &GridMask) -> Result<Self> {
        self.zip_with(other, |a, b| a != b)
    }

    /// Membership of an arbitrary point, by the cell containing it.
    pub fn contains(&self, z: Complex64) -> bool {
        mask_lookup(self, z)
    }

    /// Largest `|z|^2` over member nodes, 0 if empty.
    pub fn max_t(&self) -> f64 {
        self.members().map(|i| self.grid.radial()[self.grid.ring_of(i)].t).fold(0.0, f64::max)
    }

    /// True if a member cell sits on the outermost ring of the grid.
    pub fn touches_rim(&self) -> bool {
        let m = self.grid.angular_count();
        let last = self.grid.n_radial() - 1;
        self.bits[last * m..].iter().any(|b| *b)
    }
}

/// A measurable subset of the disk.
#[derive(Clone, Debug)]
pub enum HyperbolicSet {
    Disc(PseudoDisc),
    Mask(GridMask),
}

/// Euclidean area and hyperbolic measure of a set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurePair {
    pub euclidean_area: f64,
    pub hyperbolic_measure: f64,
}

impl HyperbolicSet {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            HyperbolicSet::Disc(d) => d.contains(z),
            HyperbolicSet::Mask(m) => m.contains(z),
        }
    }

    pub fn measures(&self) -> MeasurePair {
        match self {
            HyperbolicSet::Disc(d) => MeasurePair {
                euclidean_area: PI * d.e_radius * d.e_radius,
                hyperbolic_measure: d.s,
            },
            HyperbolicSet::Mask(m) => MeasurePair {
                euclidean_area: m.measure_with(Weight::Plain),
                hyperbolic_measure: m.mu(),
            },
        }
    }

    /// Cell-indicator version on `grid`.
    pub fn rasterize(&self, grid: &Arc<QuadratureGrid>) -> GridMask {
        match self {
            HyperbolicSet::Disc(d) => GridMask::from_fn(grid.clone(), |z| d.contains(z)),
            HyperbolicSet::Mask(m) => {
                if m.compatible(&GridMask::empty(grid.clone())) {
                    m.clone()
                } else {
                    let src = m.clone();
                    GridMask::from_fn(grid.clone(), |z| mask_lookup(&src, z))
                }
            }
        }
    }
}

/// Membership of an arbitrary point in a mask, by the cell containing it.
fn mask_lookup(m: &GridMask, z: Complex64) -> bool {
    let g = &m.grid;
    match g.ring_containing(z.norm_sqr()) {
        Some(i) => m.bits[i * g.angular_count() + g.sector_containing(z.arg())],
        None => false,
    }
}

/// `mu(S)`; exact for discs, the quadrature sum for masks.
pub fn mu_measure(set: &HyperbolicSet) -> f64 {
    set.measures().hyperbolic_measure
}

/// Disc of hyperbolic measure `s` around `center`.
pub fn pseudo_disc(center: Complex64, s: f64) -> Result<HyperbolicSet> {
    Ok(HyperbolicSet::Disc(PseudoDisc::new(center, s)?))
}

/// `mu(A Δ B)`. Two discs are handled analytically; otherwise both sets are
/// compared cell by cell on the grid of the mask argument(s).
pub fn symm_diff_measure(a: &HyperbolicSet, b: &HyperbolicSet) -> Result<f64> {
    match (a, b) {
        (HyperbolicSet::Disc(p), HyperbolicSet::Disc(q)) => {
            Ok((p.s + q.s - 2.0 * disc_intersection_measure(p, q)).max(0.0))
        }
        (HyperbolicSet::Mask(m), HyperbolicSet::Mask(n)) => Ok(m.symmetric_difference(n)?.mu()),
        (HyperbolicSet::Mask(m), other) | (other, HyperbolicSet::Mask(m)) => {
            let r = other.rasterize(m.grid());
            Ok(m.symmetric_difference(&r)?.mu())
        }
    }
}

/// `mu(P ∩ Q)` for two pseudohyperbolic discs.
pub fn disc_intersection_measure(p: &PseudoDisc, q: &PseudoDisc) -> f64 {
    let d = (p.e_center - q.e_center).norm();
    if d + q.e_radius <= p.e_radius {
        return q.s;
    }
    if d + p.e_radius <= q.e_radius {
        return p.s;
    }
    if d >= p.e_radius + q.e_radius {
        return 0.0;
    }
    // move P to the origin; mu is invariant
    let qq = match q.mobius_image(p.center) {
        Ok(x) => x,
        Err(_) => return 0.0,
    };
    centered_cap_measure(p.pseudo_radius, qq.e_center, qq.e_radius)
}

/// `mu({|z| < r} ∩ {|z - c| < rho})`, integrating the exact radial measure
/// `(1/2) d[1/(1-|z|^2)]` over angle on pieces free of kinks.
fn centered_cap_measure(r: f64, c: Complex64, rho: f64) -> f64 {
    let cn = c.norm();
    if cn < 1e-300 {
        let m = r.min(rho);
        return centered_disc_measure(m);
    }
    let phic = c.arg();
    let mut breaks: Vec<f64> = Vec::new();
    let (lo, hi) = if cn > rho {
        let h = (rho / cn).asin();
        breaks.push(-h);
        breaks.push(h);
        (-h, h)
    } else {
        (-PI, PI)
    };
    let ca = (r * r + cn * cn - rho * rho) / (2.0 * r * cn);
    if ca.abs() < 1.0 {
        let h = ca.acos();
        for x in [-h, h] {
            if x > lo && x < hi {
                breaks.push(x);
            }
        }
    }
    breaks.push(lo);
    breaks.push(hi);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let (x, w) = gauss_legendre(48);
    let r2 = r * r;
    let ray = |phi: f64| -> f64 {
        let p = cn * phi.cos();
        let disc = p * p - cn * cn + rho * rho;
        if disc <= 0.0 {
            return 0.0;
        }
        let sq = disc.sqrt();
        let (r1, r2b) = ((p - sq).max(0.0), p + sq);
        if r2b <= 0.0 {
            return 0.0;
        }
        let ta = (r1 * r1).min(r2);
        let tb = (r2b * r2b).min(r2);
        if tb <= ta {
            return 0.0;
        }
        0.5 * (tb - ta) / ((1.0 - ta) * (1.0 - tb))
    };
    let mut total = 0.0;
    for win in breaks.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b - a <= 0.0 {
            continue;
        }
        // phi = a + (b-a)(1 - cos(pi u))/2 flattens square-root endpoints
        for (xi, wi) in x.iter().zip(&w) {
            let u = 0.5 * (xi + 1.0);
            let phi = a + (b - a) * 0.5 * (1.0 - (PI * u).cos());
            let jac = (b - a) * 0.5 * PI * (PI * u).sin() * 0.5;
            total += wi * jac * ray(phi);
        }
    }
    let _ = phic;
    total
}

/// Configuration of the asymmetry search.
#[derive(Clone, Copy, Debug)]
pub struct AsymmetrySearch {
    pub radial_candidates: usize,
    pub angular_candidates: usize,
    pub simplex_tol: f64,
    pub max_iter: usize,
}

impl Default for AsymmetrySearch {
    fn default() -> Self {
        Self { radial_candidates: 17, angular_candidates: 17, simplex_tol: 1e-9, max_iter: 400 }
    }
}

/// `inf_x mu(S Δ B(x)) / mu(S)` over discs with `mu(B) = mu(S)`.
pub fn asymmetry(set: &HyperbolicSet) -> Result<(f64, Complex64)> {
    asymmetry_with(set, AsymmetrySearch::default())
}

pub fn asymmetry_with(set: &HyperbolicSet, cfg: AsymmetrySearch) -> Result<(f64, Complex64)> {
    let mask = match set {
        HyperbolicSet::Disc(d) => return Ok((0.0, d.center)),
        HyperbolicSet::Mask(m) => m,
    };
    let s = mask.mu();
    if !(s > 0.0) {
        return Err(domain("asymmetry of a null set is undefined"));
    }
    let grid = mask.grid().clone();
    let members: Vec<(Complex64, f64)> =
        mask.members().map(|i| (grid.point(i), grid.cell_mass(i, Weight::Hyperbolic))).collect();
    let hyp_w: Vec<f64> = (0..grid.n_radial()).map(|i| grid.ring_mass(i, Weight::Hyperbolic)).collect();
    let m = grid.angular_count();
    let objective = |a: Complex64| -> f64 {
        let disc = match PseudoDisc::new(a, s) {
            Ok(d) => d,
            Err(_) => return 2.0,
        };
        let c = disc.e_center;
        let rho = disc.e_radius;
        let (tmin, tmax) = (((c.norm() - rho).max(0.0)).powi(2), (c.norm() + rho).powi(2));
        let mut mu_b = 0.0;
        for (i, node) in grid.radial().iter().enumerate() {
            if node.t < tmin || node.t > tmax {
                continue;
            }
            let r = node.t.sqrt();
            for j in 0..m {
                let (co, si) = grid.direction(j);
                if disc.contains(Complex64::new(r * co, r * si)) {
                    mu_b += hyp_w[i];
                }
            }
        }
        let inter: f64 = members.iter().filter(|(z, _)| disc.contains(*z)).map(|(_, w)| w).sum();
        ((s + mu_b - 2.0 * inter) / s).clamp(0.0, 2.0)
    };
    let extent = mask.max_t().sqrt().min(0.999_999);
    let h_ext = extent.atanh();
    let mut best = (objective(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
    let consider = |val: f64, a: Complex64, best: &mut (f64, Complex64)| {
        if val < best.0 - 1e-15 || ((val - best.0).abs() <= 1e-15 && a.norm() < best.1.norm()) {
            *best = (val, a);
        }
    };
    let nr = cfg.radial_candidates.max(2);
    for k in 1..nr {
        let rad = (h_ext * k as f64 / (nr - 1) as f64).tanh();
        for j in 0..cfg.angular_candidates {
            let a = Complex64::from_polar(rad, 2.0 * PI * j as f64 / cfg.angular_candidates as f64);
            let v = objective(a);
            consider(v, a, &mut best);
        }
    }
    let bary = hyperbolic_barycenter(&members);
    consider(objective(bary), bary, &mut best);
    // simplex refinement in w = atanh|a| a/|a|
    let to_w = |a: Complex64| -> [f64; 2] {
        let n = a.norm();
        if n == 0.0 {
            [0.0, 0.0]
        } else {
            let h = n.atanh() / n;
            [a.re * h, a.im * h]
        }
    };
    let from_w = |w: &[f64]| -> Complex64 {
        let n = (w[0] * w[0] + w[1] * w[1]).sqrt();
        if n == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(w[0], w[1]) * (n.tanh() / n)
        }
    };
    let start = to_w(best.1);
    let res = nelder_mead(|w| objective(from_w(w)), &start, 0.05, cfg.simplex_tol, cfg.max_iter);
    let refined = from_w(&res.x);
    consider(res.value, refined, &mut best);
    Ok(best)
}

/// Fixed point of "move to the candidate, average, move back"; a disc's
/// own center is a fixed point.
fn hyperbolic_barycenter(members: &[(Complex64, f64)]) -> Complex64 {
    let mut a = Complex64::new(0.0, 0.0);
    for _ in 0..50 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut tot = 0.0;
        for (z, w) in members {
            acc += mobius(a, *z) * w;
            tot += w;
        }
        if tot == 0.0 {
            break;
        }
        let m = acc / tot;
        let next = mobius(-a, m);
        if (next - a).norm() < 1e-14 || !(next.norm() < 1.0) {
            if next.norm() < 1.0 {
                a = next;
            }
            break;
        }
        a = next;
    }
    a
}

/// Cayley map `w -> (w - i)/(w + i)` from the upper half-plane to the disk.
pub fn cayley(w: Complex64) -> Complex64 {
    (w - I) / (w + I)
}

/// Inverse Cayley map `z -> i (1 + z)/(1 - z)`.
pub fn cayley_inv(z: Complex64) -> Complex64 {
    I * (1.0 + z) / (1.0 - z)
}

/// `nu(D) = 2 pi (q / sqrt(q^2 - rho^2) - 1)` for the Euclidean disc of
/// center height `q` and radius `rho < q` in the upper half-plane.
pub fn nu_of_halfplane_disc(q: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < q) {
        return Err(domain("half-plane disc must have 0 < radius < center height"));
    }
    let den = ((q - rho) * (q + rho)).sqrt();
    Ok(2.0 * PI * (rho * rho / (den * (q + den))))
}

/// A subset of the upper half-plane with finite `nu = y^{-2} dx dy`.
#[derive(Clone, Debug)]
pub enum HalfPlaneSet {
    /// Euclidean disc `|w - center| < radius` with `radius < Im center`.
    Disc { center: Complex64, radius: f64 },
    /// Cell mask on the Cayley pullback of a disk grid: half-plane cell `k`
    /// is the preimage of disk cell `k`.
    Mask(GridMask),
}

impl HalfPlaneSet {
    pub fn nu_measure(&self) -> Result<f64> {
        match self {
            HalfPlaneSet::Disc { center, radius } => nu_of_halfplane_disc(center.im, *radius),
            HalfPlaneSet::Mask(m) => Ok(halfplane_mask_nu(m)),
        }
    }

    pub fn contains(&self, w: Complex64) -> bool {
        match self {
            HalfPlaneSet::Disc { center, radius } => (w - center).norm() < *radius,
            HalfPlaneSet::Mask(m) => w.im > 0.0 && mask_lookup(m, cayley(w)),
        }
    }
}

/// `nu` of a pulled-back mask computed with half-plane quantities only:
/// Lebesgue weight `dA |dw/dz|^2` divided by `y^2` at the preimage node.
pub fn halfplane_mask_nu(m: &GridMask) -> f64 {
    let g = m.grid();
    m.members()
        .map(|k| {
            let z = g.point(k);
            let w = cayley_inv(z);
            let dwdz = 2.0 * I / ((1.0 - z) * (1.0 - z));
            g.cell_weight(k, Weight::Plain) * dwdz.norm_sqr() / (w.im * w.im)
        })
        .sum()
}

/// Image of a half-plane set under the Cayley map.
pub fn cayley_to_disc(set: &HalfPlaneSet) -> Result<HyperbolicSet> {
    match set {
        HalfPlaneSet::Disc { center, radius } => {
            nu_of_halfplane_disc(center.im, *radius)?;
            let (c, rho) = circle_image(*center, *radius, cayley);
            Ok(HyperbolicSet::Disc(PseudoDisc::from_euclidean(c, rho)?))
        }
        HalfPlaneSet::Mask(m) => {
            if m.touches_rim() {
                return Err(domain("half-plane mask reaches the grid truncation; extent may be unbounded"));
            }
            Ok(HyperbolicSet::Mask(m.clone()))
        }
    }
}

/// Image circle of `|w - w0| = r` under the Cayley map, or under any map
/// `m` sharing its pole at `-i`.
fn circle_image(w0: Complex64, r: f64, m: fn(Complex64) -> Complex64) -> (Complex64, f64) {
    // the pole's mirror point maps to the image center
    let mirror = w0 - r * r / (w0 + I).conj();
    let c = m(mirror);
    let rho = (m(w0 + r) - c).norm();
    (c, rho)
}

/// Pulled-back grid mask for a half-plane predicate.
pub fn halfplane_mask<F: FnMut(Complex64) -> bool>(grid: Arc<QuadratureGrid>, mut f: F) -> GridMask {
    GridMask::from_fn(grid, |z| f(cayley_inv(z)))
}
