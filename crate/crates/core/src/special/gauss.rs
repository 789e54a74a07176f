use crate::scalar::{int, lit, Real};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let nn = int::<T>(n);
    let tol = T::EPS * lit(4.0);
    for i in 0..(n + 1) / 2 {
        let mut z = (T::PI() * (int::<T>(i) + lit(0.75)) / (nn + lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z = z - dz;
            if dz.abs() <= tol {
                let (_, d) = legendre_and_derivative(n, z);
                dp = d;
                break;
            }
        }
        let wi = lit::<T>(2.0) / ((T::one() - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = T::zero();
    }
    (x, w)
}

fn legendre_and_derivative<T: Real>(n: usize, z: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = z;
    for k in 2..=n {
        let kk = int::<T>(k);
        let p2 = ((kk + kk - T::one()) * z * p1 - (kk - T::one()) * p0) / kk;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let d = int::<T>(n) * (z * p1 - p0) / (z * z - T::one());
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre::<f64>(7);
        for deg in 0..14usize {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn symmetric_and_sorted() {
        let (x, w) = gauss_legendre::<f64>(24);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        for i in 0..24 {
            assert!((x[i] + x[23 - i]).abs() < 1e-15);
            assert_eq!(w[i], w[23 - i]);
        }
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn single_precision_rule() {
        let (x, w) = gauss_legendre::<f32>(10);
        let q: f32 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((q - 2.0 / 3.0).abs() < 1e-6);
    }
}
