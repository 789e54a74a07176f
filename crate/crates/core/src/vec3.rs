//! Small fixed-size vector helpers for real and complex 3-vectors.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

pub type V3<T> = [T; 3];
pub type C3<T> = [Complex<T>; 3];

#[inline]
pub fn add<T: Real>(a: V3<T>, b: V3<T>) -> V3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub<T: Real>(a: V3<T>, b: V3<T>) -> V3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale<T: Real>(s: T, a: V3<T>) -> V3<T> {
    [s * a[0], s * a[1], s * a[2]]
}

#[inline]
pub fn dot<T: Real>(a: V3<T>, b: V3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<T: Real>(a: V3<T>, b: V3<T>) -> V3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm<T: Real>(a: V3<T>) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn normalize<T: Real>(a: V3<T>) -> V3<T> {
    scale(T::one() / norm(a), a)
}

/// Matrix-vector product with a row-major 3x3 matrix.
#[inline]
pub fn matvec<T: Real>(m: &[[T; 3]; 3], v: V3<T>) -> V3<T> {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

/// Transposed matrix-vector product.
#[inline]
pub fn matvec_t<T: Real>(m: &[[T; 3]; 3], v: V3<T>) -> V3<T> {
    [
        m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
        m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
        m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
    ]
}

pub fn matmul3<T: Real>(a: &[[T; 3]; 3], b: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn transpose3<T: Real>(a: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn identity3<T: Real>() -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = T::one();
    }
    out
}

#[inline]
pub fn czero<T: Real>() -> C3<T> {
    [Complex::zero(); 3]
}

#[inline]
pub fn cfrom<T: Real>(a: V3<T>) -> C3<T> {
    [
        Complex::new(a[0], T::zero()),
        Complex::new(a[1], T::zero()),
        Complex::new(a[2], T::zero()),
    ]
}

#[inline]
pub fn cadd<T: Real>(a: C3<T>, b: C3<T>) -> C3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn csub<T: Real>(a: C3<T>, b: C3<T>) -> C3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn cscale<T: Real>(s: Complex<T>, a: C3<T>) -> C3<T> {
    [s * a[0], s * a[1], s * a[2]]
}

#[inline]
pub fn crscale<T: Real>(s: T, a: C3<T>) -> C3<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Complex vector times real vector as a complex scalar.
#[inline]
pub fn rscale<T: Real>(s: Complex<T>, a: V3<T>) -> C3<T> {
    [s * a[0], s * a[1], s * a[2]]
}

/// Bilinear (non-conjugating) dot product.
#[inline]
pub fn cdot<T: Real>(a: C3<T>, b: C3<T>) -> Complex<T> {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Hermitian inner product `a . conj(b)`.
#[inline]
pub fn cdot_conj<T: Real>(a: C3<T>, b: C3<T>) -> Complex<T> {
    a[0] * b[0].conj() + a[1] * b[1].conj() + a[2] * b[2].conj()
}

#[inline]
pub fn rcdot<T: Real>(a: V3<T>, b: C3<T>) -> Complex<T> {
    b[0] * a[0] + b[1] * a[1] + b[2] * a[2]
}

#[inline]
pub fn ccross<T: Real>(a: C3<T>, b: C3<T>) -> C3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Real vector crossed with complex vector.
#[inline]
pub fn rccross<T: Real>(a: V3<T>, b: C3<T>) -> C3<T> {
    [
        b[2] * a[1] - b[1] * a[2],
        b[0] * a[2] - b[2] * a[0],
        b[1] * a[0] - b[0] * a[1],
    ]
}

/// Complex vector crossed with real vector.
#[inline]
pub fn crcross<T: Real>(a: C3<T>, b: V3<T>) -> C3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn cnorm<T: Real>(a: C3<T>) -> T {
    (a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()).sqrt()
}

#[inline]
pub fn cnorm_sqr<T: Real>(a: C3<T>) -> T {
    a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()
}

/// Tangential projection `(n x a) x n` of a complex vector.
#[inline]
pub fn tangential<T: Real>(n: V3<T>, a: C3<T>) -> C3<T> {
    let an = rcdot(n, a);
    [a[0] - an * n[0], a[1] - an * n[1], a[2] - an * n[2]]
}

/// Real 3x3 matrix applied to a complex vector.
#[inline]
pub fn rmat_c<T: Real>(m: &[[T; 3]; 3], v: C3<T>) -> C3<T> {
    [rcdot(m[0], v), rcdot(m[1], v), rcdot(m[2], v)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_products_agree() {
        let a = [1.0f64, -2.0, 0.5];
        let b = [0.3f64, 4.0, -1.0];
        let r = cross(a, b);
        let c = ccross(cfrom(a), cfrom(b));
        let d = rccross(a, cfrom(b));
        let e = crcross(cfrom(a), b);
        for i in 0..3 {
            assert_eq!(c[i].re, r[i]);
            assert_eq!(d[i].re, r[i]);
            assert_eq!(e[i].re, r[i]);
        }
        assert!(dot(r, a).abs() < 1e-14);
    }
}
