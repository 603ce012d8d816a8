//! Dense complex linear algebra sized for spectral Galerkin pencils: LU with
//! partial pivoting, explicit inverses for condition estimates, and a
//! complex Schur decomposition (Householder Hessenberg reduction followed by
//! shifted QR with Givens rotations) with eigenvectors recovered by
//! triangular back-substitution.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> CMat {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> CMat {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex64]) {
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Row-major dense real symmetric-friendly matrix (used for the boundary
/// mass matrix, which is real by construction).
#[derive(Debug, Clone, PartialEq)]
pub struct RealMat {
    pub n: usize,
    data: Vec<f64>,
}

impl RealMat {
    pub fn zeros(n: usize) -> RealMat {
        RealMat {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn column_complex(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| Complex64::new(self.get(i, j), 0.0)).collect()
    }

    pub fn mul_vec_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.n {
                acc += x[j] * self.get(i, j);
            }
            y[i] = acc;
        }
        y
    }
}

/// LU factorization with partial pivoting.
pub struct LuFactors {
    lu: CMat,
    piv: Vec<usize>,
}

pub fn lu_factor(a: &CMat) -> Result<LuFactors> {
    assert_eq!(a.rows, a.cols, "LU needs a square matrix");
    let n = a.rows;
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut p = k;
        let mut best = lu.get(k, k).norm();
        for i in k + 1..n {
            let v = lu.get(i, k).norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(Error::Numerical(format!(
                "LU pivot {k} is exactly zero: matrix is singular"
            )));
        }
        if p != k {
            for j in 0..n {
                let tmp = lu.get(k, j);
                lu[(k, j)] = lu.get(p, j);
                lu[(p, j)] = tmp;
            }
            piv.swap(k, p);
        }
        let pivot = lu.get(k, k);
        for i in k + 1..n {
            let factor = lu.get(i, k) / pivot;
            lu[(i, k)] = factor;
            for j in k + 1..n {
                let upd = lu.get(i, j) - factor * lu.get(k, j);
                lu[(i, j)] = upd;
            }
        }
    }
    Ok(LuFactors { lu, piv })
}

impl LuFactors {
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows;
        let mut x: Vec<Complex64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu.get(i, j) * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu.get(i, j) * x[j];
            }
            x[i] = acc / self.lu.get(i, i);
        }
        x
    }
}

/// Explicit inverse by solving against the identity columns.
pub fn invert(a: &CMat) -> Result<CMat> {
    let n = a.rows;
    let lu = lu_factor(a)?;
    let mut inv = CMat::zeros(n, n);
    for j in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        inv.set_column(j, &lu.solve(&e));
    }
    Ok(inv)
}

/// 1-norm condition number from an explicit inverse.
pub fn condition_one_norm(a: &CMat, a_inv: &CMat) -> f64 {
    a.one_norm() * a_inv.one_norm()
}

// ---------------------------------------------------------------------------
// complex Schur decomposition and eigenvectors
// ---------------------------------------------------------------------------

struct Givens {
    c: f64,
    s: Complex64,
}

fn givens(f: Complex64, g: Complex64) -> (Givens, Complex64) {
    if g == Complex64::new(0.0, 0.0) {
        return (
            Givens {
                c: 1.0,
                s: Complex64::new(0.0, 0.0),
            },
            f,
        );
    }
    if f == Complex64::new(0.0, 0.0) {
        let phase = g.conj() / g.norm();
        return (Givens { c: 0.0, s: phase }, Complex64::new(g.norm(), 0.0));
    }
    let t = (f.norm_sqr() + g.norm_sqr()).sqrt();
    let fdir = f / f.norm();
    let c = f.norm() / t;
    let s = fdir * g.conj() / t;
    (Givens { c, s }, fdir * t)
}

impl Givens {
    /// Apply from the left to rows `(k, k+1)` over columns `j0..j1`.
    fn apply_left(&self, m: &mut CMat, k: usize, j0: usize, j1: usize) {
        for j in j0..j1 {
            let a = m.get(k, j);
            let b = m.get(k + 1, j);
            m[(k, j)] = self.c * a + self.s * b;
            m[(k + 1, j)] = -self.s.conj() * a + self.c * b;
        }
    }

    /// Apply the adjoint from the right to columns `(k, k+1)` over rows
    /// `i0..i1`.
    fn apply_right(&self, m: &mut CMat, k: usize, i0: usize, i1: usize) {
        for i in i0..i1 {
            let a = m.get(i, k);
            let b = m.get(i, k + 1);
            m[(i, k)] = self.c * a + self.s.conj() * b;
            m[(i, k + 1)] = -self.s * a + self.c * b;
        }
    }
}

/// Householder reduction to upper Hessenberg form, accumulating the unitary
/// transform: `A = Q H Q^H`.
fn hessenberg(a: &CMat) -> (CMat, CMat) {
    let n = a.rows;
    let mut h = a.clone();
    let mut q = CMat::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        // reflect column k below the subdiagonal onto e1
        let m = n - k - 1;
        let mut v: Vec<Complex64> = (0..m).map(|i| h.get(k + 1 + i, k)).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0 == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // left: rows k+1.., all columns
        for j in 0..n {
            let mut w = Complex64::new(0.0, 0.0);
            for i in 0..m {
                w += v[i].conj() * h.get(k + 1 + i, j);
            }
            w *= beta;
            for i in 0..m {
                let upd = h.get(k + 1 + i, j) - v[i] * w;
                h[(k + 1 + i, j)] = upd;
            }
        }
        // right: columns k+1.., all rows
        for i in 0..n {
            let mut w = Complex64::new(0.0, 0.0);
            for j in 0..m {
                w += h.get(i, k + 1 + j) * v[j];
            }
            w *= beta;
            for j in 0..m {
                let upd = h.get(i, k + 1 + j) - w * v[j].conj();
                h[(i, k + 1 + j)] = upd;
            }
        }
        // accumulate Q <- Q P
        for i in 0..n {
            let mut w = Complex64::new(0.0, 0.0);
            for j in 0..m {
                w += q.get(i, k + 1 + j) * v[j];
            }
            w *= beta;
            for j in 0..m {
                let upd = q.get(i, k + 1 + j) - w * v[j].conj();
                q[(i, k + 1 + j)] = upd;
            }
        }
        // clean the annihilated entries
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Eigenvalues of a complex 2x2 matrix.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    (tr + root, tr - root)
}

const QR_MAX_SWEEPS_PER_EIG: usize = 60;

/// Schur form of a complex matrix: `A = Z T Z^H` with `T` upper triangular.
fn schur(a: &CMat) -> Result<(CMat, CMat)> {
    let n = a.rows;
    let (mut h, mut z) = hessenberg(a);
    if n <= 1 {
        return Ok((h, z));
    }
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1; // active block is 0..=hi after deflation from the bottom
    let mut iters_at_hi = 0usize;
    let mut total = 0usize;
    while total < QR_MAX_SWEEPS_PER_EIG * n * 4 {
        total += 1;
        // deflate negligible subdiagonals
        for i in (1..=hi).rev() {
            let sub = h.get(i, i - 1).norm();
            let local = h.get(i - 1, i - 1).norm() + h.get(i, i).norm();
            if sub <= eps * local.max(eps * scale) {
                h[(i, i - 1)] = Complex64::new(0.0, 0.0);
            }
        }
        while hi > 0 && h.get(hi, hi - 1) == Complex64::new(0.0, 0.0) {
            hi -= 1;
            iters_at_hi = 0;
        }
        if hi == 0 {
            return Ok((h, z));
        }
        // find the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 && h.get(lo, lo - 1) != Complex64::new(0.0, 0.0) {
            lo -= 1;
        }

        iters_at_hi += 1;
        if iters_at_hi > QR_MAX_SWEEPS_PER_EIG {
            return Err(Error::Numerical(format!(
                "QR iteration failed to deflate eigenvalue {hi} after \
                 {QR_MAX_SWEEPS_PER_EIG} sweeps"
            )));
        }
        // Wilkinson shift from the trailing 2x2, exceptional shift now and then
        let mu = if iters_at_hi % 20 == 0 {
            h.get(hi, hi) + Complex64::new(1.5 * h.get(hi, hi - 1).norm(), 0.0)
        } else {
            let (e1, e2) = eig2(
                h.get(hi - 1, hi - 1),
                h.get(hi - 1, hi),
                h.get(hi, hi - 1),
                h.get(hi, hi),
            );
            let d = h.get(hi, hi);
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        // explicit single-shift QR sweep on the active block
        for i in lo..=hi {
            let upd = h.get(i, i) - mu;
            h[(i, i)] = upd;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (g, r) = givens(h.get(k, k), h.get(k + 1, k));
            h[(k, k)] = r;
            h[(k + 1, k)] = Complex64::new(0.0, 0.0);
            g.apply_left(&mut h, k, k + 1, n);
            rotations.push(g);
        }
        for (idx, g) in rotations.iter().enumerate() {
            let k = lo + idx;
            g.apply_right(&mut h, k, 0, (k + 2).min(n));
            g.apply_right(&mut z, k, 0, n);
        }
        for i in lo..=hi {
            let upd = h.get(i, i) + mu;
            h[(i, i)] = upd;
        }
    }
    Err(Error::Numerical(
        "QR iteration exceeded the global sweep budget".into(),
    ))
}

/// Full eigendecomposition of a dense complex matrix.
///
/// Returns the eigenvalues and a matrix whose columns are unit right
/// eigenvectors, recovered from the Schur factor by back-substitution.
pub fn eigen_decompose(a: &CMat) -> Result<(Vec<Complex64>, CMat)> {
    assert_eq!(a.rows, a.cols, "eigendecomposition needs a square matrix");
    let n = a.rows;
    let (t, z) = schur(a)?;
    let values: Vec<Complex64> = (0..n).map(|i| t.get(i, i)).collect();
    let tnorm = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let smallnum = f64::EPSILON * tnorm;
    let mut vectors = CMat::zeros(n, n);
    for idx in 0..n {
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        y[idx] = Complex64::new(1.0, 0.0);
        for i in (0..idx).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in i + 1..=idx {
                s += t.get(i, j) * y[j];
            }
            let mut d = t.get(i, i) - values[idx];
            if d.norm() < smallnum {
                d = Complex64::new(smallnum, 0.0);
            }
            y[i] = -s / d;
        }
        // v = Z y, normalized
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..=idx {
                acc += z.get(i, j) * y[j];
            }
            v[i] = acc;
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in &mut v {
            *c /= norm;
        }
        vectors.set_column(idx, &v);
    }
    Ok((values, vectors))
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eigenvalues(m: &RealMat) -> Vec<f64> {
    let n = m.n;
    let mut a = m.clone();
    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a.get(p, q) * a.get(p, q);
            }
        }
        if off.sqrt() <= 1e-15 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    (0..n).map(|i| a.get(i, i)).collect()
}
