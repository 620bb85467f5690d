//! Internal scalar abstraction, sparse storage and small dense kernels.
//!
//! Non-magnetic operators are real symmetric, magnetic ones complex
//! Hermitian; the iterative solver is generic over both through [`Scalar`].

use num_complex::Complex64;

pub trait Scalar:
    Copy
    + Send
    + Sync
    + std::fmt::Debug
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
    + std::ops::AddAssign
    + std::ops::SubAssign
    + 'static
{
    fn zero() -> Self;
    fn from_re(r: f64) -> Self;
    fn from_c64(c: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn scale(self, r: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_re(r: f64) -> Self {
        r
    }
    fn from_c64(c: Complex64) -> Self {
        c.re
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn scale(self, r: f64) -> Self {
        self * r
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_re(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }
    fn from_c64(c: Complex64) -> Self {
        c
    }
    fn to_c64(self) -> Complex64 {
        self
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn scale(self, r: f64) -> Self {
        self * r
    }
}

/// Compressed sparse rows, column-sorted within each row.
#[derive(Clone, Debug)]
pub struct Csr<S> {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<S>,
}

impl<S: Scalar> Csr<S> {
    /// Build from triplets; duplicates are summed in input order.
    pub fn from_triplets(dim: usize, triplets: &[(u32, u32, S)]) -> Csr<S> {
        let mut rows: Vec<Vec<(u32, S)>> = vec![Vec::new(); dim];
        for &(r, c, v) in triplets {
            rows[r as usize].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in &mut rows {
            row.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = row[k].1;
                k += 1;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Csr {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn matvec(&self, x: &[S], y: &mut [S]) {
        for r in 0..self.dim {
            let mut acc = S::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[r] = acc;
        }
    }

    pub fn entry(&self, r: usize, c: usize) -> S {
        for k in self.row_ptr[r]..self.row_ptr[r + 1] {
            if self.cols[k] as usize == c {
                return self.vals[k];
            }
        }
        S::zero()
    }

    /// Row-wise Gershgorin lower bound `min_r (a_rr - sum_{c != r} |a_rc|)`.
    pub fn gershgorin_min(&self) -> f64 {
        let mut g = f64::INFINITY;
        for r in 0..self.dim {
            let mut d = 0.0;
            let mut off = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] as usize == r {
                    d = self.vals[k].re();
                } else {
                    off += self.vals[k].norm_sqr().sqrt();
                }
            }
            g = g.min(d - off);
        }
        g
    }
}

// -------- dense vector helpers --------

pub fn sdot<S: Scalar>(x: &[S], y: &[S]) -> S {
    let mut acc = S::zero();
    for (a, b) in x.iter().zip(y) {
        acc += a.conj() * *b;
    }
    acc
}

pub fn norm2<S: Scalar>(x: &[S]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn axpy<S: Scalar>(alpha: S, x: &[S], y: &mut [S]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

pub fn scal<S: Scalar>(alpha: f64, x: &mut [S]) {
    for v in x.iter_mut() {
        *v = v.scale(alpha);
    }
}

/// Modified Gram-Schmidt with re-orthogonalization. Near-dependent vectors
/// (norm shrinking below `drop_tol` of the original) are dropped.
pub fn orthonormalize<S: Scalar>(vecs: &mut Vec<Vec<S>>, drop_tol: f64) {
    let mut kept: Vec<Vec<S>> = Vec::with_capacity(vecs.len());
    for mut v in vecs.drain(..) {
        let n0 = norm2(&v);
        if n0 == 0.0 {
            continue;
        }
        for _pass in 0..2 {
            for u in &kept {
                let c = sdot(u, &v);
                for i in 0..v.len() {
                    v[i] -= c * u[i];
                }
            }
        }
        let n = norm2(&v);
        if n <= drop_tol * n0 {
            continue;
        }
        scal(1.0 / n, &mut v);
        kept.push(v);
    }
    *vecs = kept;
}

// -------- small dense Hermitian eigensolver (cyclic Jacobi) --------

/// Eigendecomposition of an m x m Hermitian matrix stored row-major.
/// Returns eigenvalues ascending with matching eigenvector columns.
/// Intended for the Rayleigh-Ritz subproblems (m <= ~12).
pub fn hermitian_eig_small(m: usize, a_in: &[Complex64]) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    assert_eq!(a_in.len(), m * m);
    let mut a = a_in.to_vec();
    let mut v = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        v[i * m + i] = Complex64::new(1.0, 0.0);
    }
    let frob: f64 = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 {
        let vals = vec![0.0; m];
        let vecs = (0..m)
            .map(|j| (0..m).map(|i| v[i * m + j]).collect())
            .collect();
        return (vals, vecs);
    }
    let tol = 1e-15 * frob;
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..m {
            for q in (p + 1)..m {
                off += a[p * m + q].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                let napq = apq.norm();
                if napq <= tol * 1e-2 {
                    continue;
                }
                // unitary D = diag(1, e^{-i arg(apq)}) makes the 2x2 block real
                let phase = apq / napq;
                let app = a[p * m + p].re;
                let aqq = a[q * m + q].re;
                let tau = (aqq - app) / (2.0 * napq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // combined rotation: col_p <- c*col_p - s*conj(phase)*col_q,
                //                    col_q <- s*phase*col_p + c*col_q
                let sp = phase.conj() * s;
                let sq = phase * s;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = akp * c - akq * sp;
                    a[k * m + q] = akp * sq + akq * c;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = apk * c - aqk * sp.conj();
                    a[q * m + k] = apk * sq.conj() + aqk * c;
                }
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = vkp * c - vkq * sp;
                    v[k * m + q] = vkp * sq + vkq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    let diag: Vec<f64> = (0..m).map(|i| a[i * m + i].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let vals = order.iter().map(|&i| diag[i]).collect();
    let vecs = order
        .iter()
        .map(|&j| (0..m).map(|i| v[i * m + j]).collect())
        .collect();
    (vals, vecs)
}
