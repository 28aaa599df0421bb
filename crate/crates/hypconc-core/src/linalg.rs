//! Dense Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL with Wilkinson-style shifts.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};

/// Square complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    /// Wrap row-major data; Hermitian symmetry is checked to `tol` relative
    /// to the largest entry.
    pub fn from_row_major(n: usize, data: Vec<Complex64>, tol: f64) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Shape { expected: n * n, got: data.len() });
        }
        let m = Self { n, data };
        let dev = m.hermitian_defect();
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        if dev > tol * scale {
            return Err(domain(alloc::format!("matrix is not Hermitian: defect {dev:e}")));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..=i {
                d = d.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        d
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Eigen-decomposition `A = V diag(values) V^H`, values ascending; column
/// `k` of `vectors` (row-major, `n x n`) belongs to `values[k]`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Complex64>,
    pub n: usize,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self.vectors[i * self.n + k]).collect()
    }
}

/// Full eigen-decomposition of a Hermitian matrix.
pub fn eigh(m: &HermitianMatrix) -> Result<Eigen> {
    let n = m.n;
    if n == 0 {
        return Ok(Eigen { values: Vec::new(), vectors: Vec::new(), n });
    }
    let mut a = m.data.clone();
    // symmetrize so round-off in the input cannot leak into the reduction
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
        for j in 0..i {
            let v = 0.5 * (a[i * n + j] + a[j * n + i].conj());
            a[i * n + j] = v;
            a[j * n + i] = v.conj();
        }
    }
    let mut q = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        q[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let mut sub = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let mut x: Vec<Complex64> = (0..len).map(|r| a[(k + 1 + r) * n + k]).collect();
        let xn = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xn == 0.0 {
            sub[k] = Complex64::new(0.0, 0.0);
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * xn;
        x[0] -= alpha;
        let vn = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            sub[k] = alpha;
            continue;
        }
        for z in x.iter_mut() {
            *z /= vn;
        }
        let v = x;
        // p = B v on the trailing block
        let mut p = vec![Complex64::new(0.0, 0.0); len];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = (k + 1 + r) * n + k + 1;
            *pr = (0..len).map(|c| a[row + c] * v[c]).sum();
        }
        let kk: Complex64 = (0..len).map(|r| v[r].conj() * p[r]).sum();
        let w: Vec<Complex64> = (0..len).map(|r| p[r] - kk.re * v[r]).collect();
        for r in 0..len {
            let row = (k + 1 + r) * n + k + 1;
            for c in 0..len {
                a[row + c] -= 2.0 * (v[r] * w[c].conj() + w[r] * v[c].conj());
            }
        }
        sub[k] = alpha;
        for r in 0..len {
            a[(k + 1 + r) * n + k] = Complex64::new(0.0, 0.0);
            a[k * n + k + 1 + r] = Complex64::new(0.0, 0.0);
        }
        a[(k + 1) * n + k] = alpha;
        a[k * n + k + 1] = alpha.conj();
        // Q <- Q H
        for i in 0..n {
            let row = i * n + k + 1;
            let qv: Complex64 = (0..len).map(|c| q[row + c] * v[c]).sum();
            for c in 0..len {
                q[row + c] -= 2.0 * qv * v[c].conj();
            }
        }
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1) * n + n - 2];
    }
    // diagonal phase change making the subdiagonal real and nonnegative
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut e = vec![0.0; n];
    let mut ph = Complex64::new(1.0, 0.0);
    let mut phases = vec![ph; n];
    for k in 0..n.saturating_sub(1) {
        let s = sub[k];
        let r = s.norm();
        e[k] = r;
        if r > 0.0 {
            ph *= s / r;
        }
        phases[k + 1] = ph;
    }
    for i in 0..n {
        for (c, phase) in phases.iter().enumerate() {
            q[i * n + c] *= phase;
        }
    }
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql(&mut d, &mut e, Some(&mut z))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &r| d[p].partial_cmp(&d[r]).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for (col, &k) in order.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += q[i * n + j] * z[j * n + k];
            }
            vectors[i * n + col] = acc;
        }
    }
    Ok(Eigen { values, vectors, n })
}

/// Eigenvalues of the real symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e` (`e[i]` couples `i` and `i + 1`). Results overwrite
/// `d` in no particular order.
pub fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    tql(d, e, None)
}

fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if e.len() != n {
        return Err(Error::Shape { expected: n, got: e.len() });
    }
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 80 {
                return Err(Error::NoConvergence {
                    what: "tridiagonal QL".to_string(),
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zz) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = zz[k * n + i + 1];
                        zz[k * n + i + 1] = s * zz[k * n + i] + c * f;
                        zz[k * n + i] = c * zz[k * n + i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
