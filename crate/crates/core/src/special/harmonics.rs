//! Real orthonormal spherical harmonics and their surface gradients.
//!
//! `Y_{l,0} = P̄_l^0`, `Y_{l,m} = √2 P̄_l^m cos(mφ)` and
//! `Y_{l,-m} = √2 P̄_l^m sin(mφ)` for `m > 0`, where `P̄` are the fully
//! normalized associated Legendre functions without the Condon-Shortley phase.

use crate::scalar::{int, lit, Real};
use crate::vec3::V3;

/// Number of real harmonics of degree at most `l_max`.
pub const fn sh_count(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

/// Flat index of `(l, m)` with `-l <= m <= l`.
#[inline]
pub fn sh_index(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + m) as usize
}

/// Inverse of [`sh_index`].
pub fn sh_degree_order(idx: usize) -> (usize, i64) {
    let l = (idx as f64).sqrt().floor() as usize;
    let l = if (l + 1) * (l + 1) <= idx { l + 1 } else { l };
    (l, idx as i64 - (l * l + l) as i64)
}

/// Reusable evaluator for harmonics and surface gradients at a point of `S²`.
#[derive(Clone, Debug)]
pub struct ShEvaluator<T> {
    l_max: usize,
    pbar: Vec<T>,
    pbar_u: Vec<T>,
    cos_m: Vec<T>,
    sin_m: Vec<T>,
    alm: Vec<T>,
    blm: Vec<T>,
    /// Derivative recurrence factors, by triangular index.
    clm: Vec<T>,
    /// `√(l(l+1))` by degree.
    lnorm: Vec<T>,
    /// `Y_k` at the last evaluated point.
    pub y: Vec<T>,
    /// `∇_S Y_k` at the last evaluated point, as Cartesian vectors.
    pub grad: Vec<V3<T>>,
}

impl<T: Real> ShEvaluator<T> {
    pub fn new(l_max: usize) -> Self {
        let n = sh_count(l_max);
        let tri = (l_max + 1) * (l_max + 2) / 2;
        let mut alm = vec![T::zero(); tri];
        let mut blm = vec![T::zero(); tri];
        for m in 0..=l_max {
            for l in m + 2..=l_max {
                let (lf, mf) = (l as f64, m as f64);
                alm[tri_index(l, m)] = lit(((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt());
                blm[tri_index(l, m)] = lit(
                    (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt(),
                );
            }
        }
        let mut clm = vec![T::zero(); tri];
        for l in 0..=l_max {
            for m in 1..=l {
                let (lf, mf) = (l as f64, m as f64);
                clm[tri_index(l, m)] = lit(((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt());
            }
        }
        let lnorm = (0..=l_max).map(|l| lit(((l * (l + 1)) as f64).sqrt())).collect();
        Self {
            l_max,
            clm,
            lnorm,
            pbar: vec![T::zero(); tri],
            pbar_u: vec![T::zero(); tri],
            cos_m: vec![T::zero(); l_max + 1],
            sin_m: vec![T::zero(); l_max + 1],
            alm,
            blm,
            y: vec![T::zero(); n],
            grad: vec![[T::zero(); 3]; n],
        }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// `√(l(l+1))`.
    pub fn degree_norm(&self, l: usize) -> T {
        self.lnorm[l]
    }

    /// Evaluates all harmonics and gradients at the unit vector `s`.
    pub fn eval(&mut self, s: V3<T>) {
        let x = s[2].max(-T::one()).min(T::one());
        let rho = (s[0] * s[0] + s[1] * s[1]).sqrt();
        let (cp, sp) = if rho > T::zero() {
            (s[0] / rho, s[1] / rho)
        } else {
            (T::one(), T::zero())
        };
        let u = rho;
        self.legendre(x, u);
        self.cos_m[0] = T::one();
        self.sin_m[0] = T::zero();
        for m in 1..=self.l_max {
            self.cos_m[m] = self.cos_m[m - 1] * cp - self.sin_m[m - 1] * sp;
            self.sin_m[m] = self.sin_m[m - 1] * cp + self.cos_m[m - 1] * sp;
        }
        let e_theta = [x * cp, x * sp, -u];
        let e_phi = [-sp, cp, T::zero()];
        let sqrt2 = lit::<T>(2.0).sqrt();
        for l in 0..=self.l_max {
            let lf = int::<T>(l);
            // m = 0
            let k = sh_index(l, 0);
            self.y[k] = self.pbar[tri_index(l, 0)];
            let dtheta = if l == 0 {
                T::zero()
            } else {
                -self.lnorm[l] * self.pbar[tri_index(l, 1)]
            };
            self.grad[k] = [dtheta * e_theta[0], dtheta * e_theta[1], dtheta * e_theta[2]];
            for m in 1..=l {
                let mf = int::<T>(m);
                let pu = self.pbar_u[tri_index(l, m)];
                let pu_prev = if l > m { self.pbar_u[tri_index(l - 1, m)] } else { T::zero() };
                let c = self.clm[tri_index(l, m)];
                let dp = lf * x * pu - if l > m { c * pu_prev } else { T::zero() };
                let p = self.pbar[tri_index(l, m)];
                let (cm, sm) = (self.cos_m[m], self.sin_m[m]);
                let kc = sh_index(l, m as i64);
                let ks = sh_index(l, -(m as i64));
                self.y[kc] = sqrt2 * p * cm;
                self.y[ks] = sqrt2 * p * sm;
                let (gt_c, gp_c) = (sqrt2 * dp * cm, -sqrt2 * mf * pu * sm);
                let (gt_s, gp_s) = (sqrt2 * dp * sm, sqrt2 * mf * pu * cm);
                for i in 0..3 {
                    self.grad[kc][i] = gt_c * e_theta[i] + gp_c * e_phi[i];
                    self.grad[ks][i] = gt_s * e_theta[i] + gp_s * e_phi[i];
                }
            }
        }
    }

    fn legendre(&mut self, x: T, u: T) {
        let l_max = self.l_max;
        let four_pi = lit::<T>(4.0) * T::PI();
        let mut pmm = T::one() / four_pi.sqrt();
        let mut pmm_u = T::zero();
        for m in 0..=l_max {
            let mf = int::<T>(m);
            if m > 0 {
                let f = ((mf + mf + T::one()) / (mf + mf)).sqrt();
                pmm_u = f * pmm;
                pmm = pmm_u * u;
            }
            self.pbar[tri_index(m, m)] = pmm;
            self.pbar_u[tri_index(m, m)] = pmm_u;
            if m < l_max {
                let f = (mf + mf + lit(3.0)).sqrt();
                self.pbar[tri_index(m + 1, m)] = f * x * pmm;
                self.pbar_u[tri_index(m + 1, m)] = f * x * pmm_u;
            }
            for l in m + 2..=l_max {
                let t = tri_index(l, m);
                let (a, b) = (self.alm[t], self.blm[t]);
                self.pbar[t] =
                    a * (x * self.pbar[tri_index(l - 1, m)] - b * self.pbar[tri_index(l - 2, m)]);
                self.pbar_u[t] =
                    a * (x * self.pbar_u[tri_index(l - 1, m)] - b * self.pbar_u[tri_index(l - 2, m)]);
            }
        }
    }
}

#[inline]
fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gauss::gauss_legendre;
    use crate::vec3::{cross, dot};

    fn unit(theta: f64, phi: f64) -> [f64; 3] {
        [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
    }

    #[test]
    fn index_roundtrip() {
        for idx in 0..sh_count(9) {
            let (l, m) = sh_degree_order(idx);
            assert_eq!(sh_index(l, m), idx);
        }
    }

    #[test]
    fn known_values() {
        let mut ev = ShEvaluator::<f64>::new(2);
        let s = unit(0.7, 1.3);
        ev.eval(s);
        let pi = std::f64::consts::PI;
        assert!((ev.y[0] - 1.0 / (4.0 * pi).sqrt()).abs() < 1e-15);
        assert!((ev.y[sh_index(1, 0)] - (3.0 / (4.0 * pi)).sqrt() * s[2]).abs() < 1e-15);
        assert!((ev.y[sh_index(1, 1)] - (3.0 / (4.0 * pi)).sqrt() * s[0]).abs() < 1e-15);
        assert!((ev.y[sh_index(1, -1)] - (3.0 / (4.0 * pi)).sqrt() * s[1]).abs() < 1e-15);
        let y20 = (5.0 / (16.0 * pi)).sqrt() * (3.0 * s[2] * s[2] - 1.0);
        assert!((ev.y[sh_index(2, 0)] - y20).abs() < 1e-14);
    }

    #[test]
    fn orthonormal_under_quadrature() {
        let l_max = 8;
        let (x, w) = gauss_legendre::<f64>(l_max + 1);
        let nphi = 2 * l_max + 2;
        let n = sh_count(l_max);
        let mut gram = vec![0.0; n * n];
        let mut ev = ShEvaluator::<f64>::new(l_max);
        for (xi, wi) in x.iter().zip(&w) {
            for j in 0..nphi {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / nphi as f64;
                ev.eval(unit(xi.acos(), phi));
                let wq = wi * 2.0 * std::f64::consts::PI / nphi as f64;
                for a in 0..n {
                    for b in 0..n {
                        gram[a * n + b] += wq * ev.y[a] * ev.y[b];
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * n + b] - e).abs() < 1e-13, "{a} {b}");
            }
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let l_max = 7;
        let mut ev = ShEvaluator::<f64>::new(l_max);
        let mut fwd = ShEvaluator::<f64>::new(l_max);
        let mut bwd = ShEvaluator::<f64>::new(l_max);
        for &(th, ph) in &[(0.4, 2.0), (1.7, -0.6), (2.9, 4.0), (1e-3, 0.3)] {
            let s = unit(th, ph);
            ev.eval(s);
            let t1 = [1.0, 0.3, -0.2];
            for dir in [t1, cross(s, t1)] {
                let t = {
                    let d = dot(dir, s);
                    let v = [dir[0] - d * s[0], dir[1] - d * s[1], dir[2] - d * s[2]];
                    let n = dot(v, v).sqrt();
                    [v[0] / n, v[1] / n, v[2] / n]
                };
                let h: f64 = 1e-5;
                let step = |sg: f64| {
                    let (c, sn) = (h.cos(), (sg * h).sin());
                    [s[0] * c + t[0] * sn, s[1] * c + t[1] * sn, s[2] * c + t[2] * sn]
                };
                fwd.eval(step(1.0));
                bwd.eval(step(-1.0));
                for k in 0..sh_count(l_max) {
                    let fd = (fwd.y[k] - bwd.y[k]) / (2.0 * h);
                    let an = dot(ev.grad[k], t);
                    assert!((fd - an).abs() < 1e-7, "k={k} th={th} fd={fd} an={an}");
                    assert!(dot(ev.grad[k], s).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn gradient_is_finite_at_pole() {
        let mut ev = ShEvaluator::<f64>::new(5);
        ev.eval([0.0, 0.0, 1.0]);
        let (l, m) = (3usize, 1i64);
        let g = ev.grad[sh_index(l, m)];
        assert!(g.iter().all(|v| v.is_finite()));
        assert!(g[0].abs() > 0.1);
    }
}
