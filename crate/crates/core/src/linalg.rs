//! Dense real and complex matrices, products and LU factorization.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::scalar::{int, Real};

/// Row-major dense real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> RMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Real product `self * rhs`.
    pub fn matmul(&self, rhs: &RMat<T>) -> RMat<T> {
        assert_eq!(self.cols, rhs.rows);
        let mut out = RMat::zeros(self.rows, rhs.cols);
        unsafe {
            T::gemm(
                self.rows,
                self.cols,
                rhs.cols,
                T::one(),
                self.data.as_ptr(),
                self.cols as isize,
                1,
                rhs.data.as_ptr(),
                rhs.cols as isize,
                1,
                T::zero(),
                out.data.as_mut_ptr(),
                rhs.cols as isize,
                1,
            );
        }
        out
    }

    /// Real matrix times complex matrix.
    pub fn matmul_c(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.cols, rhs.rows);
        let mut out = CMat::zeros(self.rows, rhs.cols);
        let rp = rhs.data.as_ptr() as *const T;
        let op = out.data.as_mut_ptr() as *mut T;
        let (rs, os) = (2 * rhs.cols as isize, 2 * rhs.cols as isize);
        for part in 0..2 {
            unsafe {
                T::gemm(
                    self.rows,
                    self.cols,
                    rhs.cols,
                    T::one(),
                    self.data.as_ptr(),
                    self.cols as isize,
                    1,
                    rp.add(part),
                    rs,
                    2,
                    T::zero(),
                    op.add(part),
                    os,
                    2,
                );
            }
        }
        out
    }

    pub fn transpose(&self) -> RMat<T> {
        let mut out = RMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn from_real(m: &RMat<T>) -> Self {
        Self {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex<T>] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Complex product `self * rhs`.
    pub fn matmul(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.cols, rhs.rows);
        let mut out = CMat::zeros(self.rows, rhs.cols);
        let ap = self.data.as_ptr() as *const T;
        let bp = rhs.data.as_ptr() as *const T;
        let cp = out.data.as_mut_ptr() as *mut T;
        let (ra, rb, rc) = (
            2 * self.cols as isize,
            2 * rhs.cols as isize,
            2 * rhs.cols as isize,
        );
        // (re, im) offsets of A, B, target part of C and sign
        let terms: [(usize, usize, usize, T); 4] = [
            (0, 0, 0, T::one()),
            (1, 1, 0, -T::one()),
            (0, 1, 1, T::one()),
            (1, 0, 1, T::one()),
        ];
        for (idx, &(pa, pb, pc, s)) in terms.iter().enumerate() {
            let beta = if idx == 1 || idx == 3 { T::one() } else { T::zero() };
            unsafe {
                T::gemm(
                    self.rows,
                    self.cols,
                    rhs.cols,
                    s,
                    ap.add(pa),
                    ra,
                    2,
                    bp.add(pb),
                    rb,
                    2,
                    beta,
                    cp.add(pc),
                    rc,
                    2,
                );
            }
        }
        out
    }

    /// Complex matrix times real matrix.
    pub fn matmul_r(&self, rhs: &RMat<T>) -> CMat<T> {
        assert_eq!(self.cols, rhs.rows);
        let mut out = CMat::zeros(self.rows, rhs.cols);
        let ap = self.data.as_ptr() as *const T;
        let cp = out.data.as_mut_ptr() as *mut T;
        for part in 0..2 {
            unsafe {
                T::gemm(
                    self.rows,
                    self.cols,
                    rhs.cols,
                    T::one(),
                    ap.add(part),
                    2 * self.cols as isize,
                    2,
                    rhs.data.as_ptr(),
                    rhs.cols as isize,
                    1,
                    T::zero(),
                    cp.add(part),
                    2 * rhs.cols as isize,
                    2,
                );
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: Complex<T>, other: &CMat<T>) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + alpha * *b;
        }
    }

    pub fn scale(&mut self, alpha: Complex<T>) {
        for a in &mut self.data {
            *a = *a * alpha;
        }
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &CMat<T>) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            let dst = &mut self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + block.cols];
            dst.copy_from_slice(block.row(i));
        }
    }

    /// Extracts the sub-matrix of the given extent.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMat<T> {
        let mut out = CMat::zeros(rows, cols);
        for i in 0..rows {
            out.row_mut(i)
                .copy_from_slice(&self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + cols]);
        }
        out
    }

    pub fn norm_fro(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> T {
        let mut sums = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for (s, z) in sums.iter_mut().zip(self.row(i)) {
                *s = *s + z.norm();
            }
        }
        sums.into_iter().fold(T::zero(), T::max)
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: CMat<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    /// Factors a square matrix. Fails on an exactly singular or non-finite pivot.
    pub fn factor(mut a: CMat<T>) -> Result<Self, Error> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = T::zero();
            for i in k..n {
                let z = a.data[i * n + k];
                let v = z.re.abs() + z.im.abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > T::zero()) || !best.is_finite() {
                return Err(Error::SingularSystem { condition: f64::INFINITY });
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let inv = Complex::<T>::one() / a.data[k * n + k];
            let (head, tail) = a.data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n + k + 1..k * n + n];
            for i in 0..n - k - 1 {
                let row = &mut tail[i * n..(i + 1) * n];
                let l = row[k] * inv;
                row[k] = l;
                if l.re == T::zero() && l.im == T::zero() {
                    continue;
                }
                for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x = *x - l * u;
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s = s - row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s = s - row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // A^H = U^H L^H P, solve U^H y = b, L^H z = y, x = P^T z
        let mut y = b.to_vec();
        for i in 0..n {
            let s = y[i] / self.lu.get(i, i).conj();
            y[i] = s;
            let row = self.lu.row(i);
            for j in i + 1..n {
                y[j] = y[j] - row[j].conj() * s;
            }
        }
        for i in (0..n).rev() {
            let s = y[i];
            let row = self.lu.row(i);
            for j in 0..i {
                y[j] = y[j] - row[j].conj() * s;
            }
        }
        let mut x = vec![Complex::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    /// Estimate of `||A^{-1}||_1` (Hager's method with Higham's refinements).
    pub fn inverse_norm1_estimate(&self) -> T {
        let n = self.dim();
        if n == 0 {
            return T::zero();
        }
        let nn = int::<T>(n);
        let mut x = vec![Complex::new(T::one() / nn, T::zero()); n];
        let mut est = T::zero();
        let mut last_j = usize::MAX;
        for iter in 0..5 {
            let y = self.solve(&x);
            let ny: T = y.iter().map(|z| z.norm()).sum();
            if iter > 0 && ny <= est {
                break;
            }
            est = ny;
            let xi: Vec<Complex<T>> = y
                .iter()
                .map(|z| {
                    let a = z.norm();
                    if a > T::zero() {
                        *z / a
                    } else {
                        Complex::one()
                    }
                })
                .collect();
            let z = self.solve_adjoint(&xi);
            let (mut j, mut zmax) = (0, T::zero());
            for (i, v) in z.iter().enumerate() {
                if v.norm() > zmax {
                    zmax = v.norm();
                    j = i;
                }
            }
            let ztx: T = z.iter().zip(&x).map(|(a, b)| (a.conj() * *b).re).sum();
            if iter > 0 && (zmax <= ztx || j == last_j) {
                break;
            }
            last_j = j;
            x = vec![Complex::zero(); n];
            x[j] = Complex::one();
        }
        // alternating probe guards against adversarial cancellation
        let alt: Vec<Complex<T>> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { T::one() } else { -T::one() };
                let frac = if n > 1 { int::<T>(i) / int::<T>(n - 1) } else { T::zero() };
                Complex::new(s * (T::one() + frac), T::zero())
            })
            .collect();
        let y = self.solve(&alt);
        let two = T::one() + T::one();
        let alt_est = two * y.iter().map(|z| z.norm()).sum::<T>() / (int::<T>(3) * nn);
        est.max(alt_est)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn test_matrix(n: usize) -> CMat<f64> {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = c(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i + 2 * j) % 5) as f64 - 2.0);
                m.set(i, j, v);
            }
            m.set(i, i, m.get(i, i) + c(20.0, 1.0));
        }
        m
    }

    #[test]
    fn complex_matmul_matches_naive() {
        let a = test_matrix(5).block(0, 0, 4, 5);
        let b = test_matrix(6).block(1, 0, 5, 3);
        let p = a.matmul(&b);
        for i in 0..4 {
            for j in 0..3 {
                let mut s = c(0.0, 0.0);
                for k in 0..5 {
                    s += a.get(i, k) * b.get(k, j);
                }
                assert!((p.get(i, j) - s).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn mixed_products_match_complex() {
        let a = test_matrix(4);
        let r = RMat::from_vec(4, 2, vec![1.0, 2.0, -1.0, 0.5, 3.0, 0.0, 0.25, -2.0]);
        let rc = CMat::from_real(&r);
        let p1 = a.matmul_r(&r);
        let p2 = a.matmul(&rc);
        assert!((0..8).all(|k| (p1.data()[k] - p2.data()[k]).norm() < 1e-12));
        let rt = r.transpose();
        let q1 = rt.matmul_c(&a);
        let q2 = CMat::from_real(&rt).matmul(&a);
        assert!((0..8).all(|k| (q1.data()[k] - q2.data()[k]).norm() < 1e-12));
    }

    #[test]
    fn lu_solves_and_adjoint() {
        let n = 9;
        let a = test_matrix(n);
        let x: Vec<_> = (0..n).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        let b = a.apply(&x);
        let lu = Lu::factor(a.clone()).unwrap();
        let y = lu.solve(&b);
        assert!(x.iter().zip(&y).all(|(p, q)| (p - q).norm() < 1e-12));
        let mut ah = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                ah.set(i, j, a.get(j, i).conj());
            }
        }
        let bh = ah.apply(&x);
        let yh = lu.solve_adjoint(&bh);
        assert!(x.iter().zip(&yh).all(|(p, q)| (p - q).norm() < 1e-12));
    }

    #[test]
    fn singular_is_rejected() {
        let a = CMat::<f64>::zeros(3, 3);
        assert!(matches!(Lu::factor(a), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn norm_estimate_exact_for_diagonal() {
        let mut a = CMat::<f64>::identity(6);
        a.set(3, 3, c(1e-3, 0.0));
        let lu = Lu::factor(a).unwrap();
        assert!((lu.inverse_norm1_estimate() - 1e3).abs() < 1e-9);
    }
}
