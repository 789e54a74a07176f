//! Spherical Bessel and Hankel functions of complex argument.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{int, lit, Real};

/// `j_l(z)` for `l = 0..=l_max` by normalized downward recurrence.
pub fn spherical_jn<T: Real>(l_max: usize, z: Complex<T>) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); l_max + 1];
    if z.norm() == T::zero() {
        out[0] = Complex::one();
        return out;
    }
    let (j0, j1) = j0_j1(z);
    let az = z.norm().to_f64().unwrap_or(0.0);
    let start = l_max + 20 + (1.5 * az).ceil() as usize;
    let big = lit::<T>(1e10);
    let mut vals = vec![Complex::<T>::zero(); start + 2];
    vals[start + 1] = Complex::zero();
    vals[start] = Complex::new(lit(1e-20), T::zero());
    for l in (1..=start).rev() {
        let f = vals[l] * (int::<T>(2 * l + 1)) / z - vals[l + 1];
        vals[l - 1] = f;
        if f.norm() > big {
            let s = T::one() / big;
            for v in vals[l - 1..].iter_mut() {
                *v = *v * s;
            }
        }
    }
    let scale = if j0.norm() >= j1.norm() { j0 / vals[0] } else { j1 / vals[1] };
    for (o, v) in out.iter_mut().zip(&vals) {
        *o = *v * scale;
    }
    out
}

fn j0_j1<T: Real>(z: Complex<T>) -> (Complex<T>, Complex<T>) {
    if z.norm() < lit(1e-3) {
        let z2 = z * z;
        let j0 = Complex::<T>::one() - z2 / lit::<T>(6.0) + z2 * z2 / lit::<T>(120.0);
        let j1 = z / lit::<T>(3.0) - z * z2 / lit::<T>(30.0) + z * z2 * z2 / lit::<T>(840.0);
        (j0, j1)
    } else {
        let (s, c) = (z.sin(), z.cos());
        (s / z, s / (z * z) - c / z)
    }
}

/// `h_l^{(1)}(z)` for `l = 0..=l_max` by upward recurrence.
pub fn spherical_hn1<T: Real>(l_max: usize, z: Complex<T>) -> Vec<Complex<T>> {
    let i = Complex::<T>::i();
    let e = (i * z).exp();
    let mut out = vec![Complex::zero(); l_max + 1];
    out[0] = -i * e / z;
    if l_max >= 1 {
        out[1] = -e * (z + i) / (z * z);
    }
    for l in 1..l_max {
        out[l + 1] = out[l] * int::<T>(2 * l + 1) / z - out[l - 1];
    }
    out
}

/// Riccati derivative `(x z_l(x))' / x = z_{l-1}(x) - l z_l(x) / x` for `l >= 1`.
///
/// `vals` holds `z_0..z_{l_max}` at `x`; entry 0 of the result is unused.
pub fn riccati_derivative<T: Real>(vals: &[Complex<T>], x: Complex<T>) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); vals.len()];
    for l in 1..vals.len() {
        out[l] = vals[l - 1] - vals[l] * int::<T>(l) / x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    #[test]
    fn closed_forms_real_argument() {
        let x = c(2.3, 0.0);
        let j = spherical_jn(3, x);
        let (s, co) = (x.sin(), x.cos());
        let j2 = (c(3.0, 0.0) / (x * x) - 1.0) * s / x - c(3.0, 0.0) * co / (x * x);
        assert!((j[0] - s / x).norm() < 1e-15);
        assert!((j[2] - j2).norm() < 1e-14);
        let h = spherical_hn1(3, x);
        let y0 = -co / x;
        assert!((h[0] - (j[0] + C::i() * y0)).norm() < 1e-15);
    }

    #[test]
    fn wronskian_complex_argument() {
        // j_l y_{l-1} - j_{l-1} y_l = 1/z^2, equivalently j_l h_{l-1} - j_{l-1} h_l = i/z^2
        for z in [c(0.7, 0.2), c(3.5, 1.1), c(9.0, 0.0), c(1.2, 3.0)] {
            let j = spherical_jn(25, z);
            let h = spherical_hn1(25, z);
            for l in 1..=25 {
                let w = j[l] * h[l - 1] - j[l - 1] * h[l];
                let expect = C::i() / (z * z);
                assert!((w - expect).norm() <= 1e-10 * expect.norm(), "z={z} l={l} w={w}");
            }
        }
    }

    #[test]
    fn small_argument_series() {
        let z = c(1e-4, 0.0);
        let j = spherical_jn(4, z);
        let z2 = z * z;
        assert!((j[1] - z / 3.0 * (1.0 - z2 / 10.0)).norm() < 1e-18);
        assert!((j[3] - z * z2 / 105.0 * (1.0 - z2 / 18.0)).norm() < 1e-26);
    }

    #[test]
    fn riccati_derivative_fd() {
        let k = c(1.3, 0.4);
        let r = 1.7;
        let f = |r: f64| {
            let j = spherical_jn(5, k * r);
            (0..=5).map(|l| j[l] * r).collect::<Vec<_>>()
        };
        let h = 1e-6;
        let (fp, fm) = (f(r + h), f(r - h));
        let x = k * r;
        let zeta = riccati_derivative(&spherical_jn(5, x), x);
        for l in 1..=5 {
            let fd = (fp[l] - fm[l]) / (2.0 * h) / x;
            assert!((fd - zeta[l]).norm() < 1e-8, "l={l}");
        }
    }
}
