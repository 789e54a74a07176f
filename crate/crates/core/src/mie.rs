//! Vector spherical wave series for concentric spheres.
//!
//! Fields are expanded as `E = Σ α M_lm + β N_lm` with
//! `M_lm = -z_l(kr) r̂ × ∇_S Y_lm` and tangential part of `N_lm` equal to
//! `ζ_l(kr) ∇_S Y_lm`, `ζ_l(x) = (x z_l(x))' / x`; then `H = -i (α N + β M)`.
//! Each degree decouples into a 2x2 transmission problem at the interface
//! after the core condition fixes the mix of regular and outgoing waves in
//! the layer.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::Error;
use crate::geometry::Shape;
use crate::media::{Scene, WaveNumbers};
use crate::scalar::{int, lit, Real};
use crate::special::{riccati_derivative, sh_count, sh_index, spherical_hn1, spherical_jn, ShEvaluator};
use crate::vec3::{self, C3, V3};

/// Boundary condition on the inner sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Core<T> {
    /// Perfect conductor.
    Pec,
    /// Impedance condition with parameter `λ`.
    Impedance(T),
    /// No inner sphere: the layer fills the ball.
    Solid,
}

/// Concentric two-layer configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MieScene<T> {
    pub r0: T,
    pub r1: T,
    pub media: WaveNumbers<T>,
    pub core: Core<T>,
}

/// Scattered-field coefficients and the truncation degree.
#[derive(Clone, Debug)]
pub struct MieCoefficients<T> {
    pub l_max: usize,
    pub alpha: Vec<Complex<T>>,
    pub beta: Vec<Complex<T>>,
    /// Relative size of the highest retained degree.
    pub tail: T,
}

impl<T: Real> MieScene<T> {
    /// Extracts the concentric configuration of a scene.
    pub fn from_scene(scene: &Scene<T>) -> Result<Self, Error> {
        let tol = lit::<T>(1e-12);
        let r0 = scene.interface.is_centered_sphere(tol);
        let r1 = scene.obstacle.is_centered_sphere(tol);
        let (r0, r1) = match (r0, r1) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::OracleUnsupported(
                    "both surfaces must be spheres centered at the origin".into(),
                ))
            }
        };
        let core = if scene.partition.is_all_pec() {
            Core::Pec
        } else if scene.partition.is_all_impedance() {
            Core::Impedance(scene.partition.impedance)
        } else {
            return Err(Error::OracleUnsupported("mixed boundary conditions have no series solution".into()));
        };
        if !(r1 < r0) {
            return Err(Error::OracleUnsupported("inner radius must be smaller".into()));
        }
        Ok(Self { r0, r1, media: scene.media, core })
    }

    /// Degree-wise factors `(t_α, t_β)` with `α^s = t_α α^i`, `β^s = t_β β^i`.
    pub fn transfer(&self, l_max: usize) -> Vec<(Complex<T>, Complex<T>)> {
        let m = &self.media;
        let k0 = m.k0c();
        let k1 = m.k1;
        let x0 = k0 * self.r0;
        let y0 = k1 * self.r0;
        let j0 = spherical_jn(l_max, x0);
        let h0 = spherical_hn1(l_max, x0);
        let zj0 = riccati_derivative(&j0, x0);
        let zh0 = riccati_derivative(&h0, x0);
        let j1 = spherical_jn(l_max, y0);
        let h1 = spherical_hn1(l_max, y0);
        let zj1 = riccati_derivative(&j1, y0);
        let zh1 = riccati_derivative(&h1, y0);
        let (rte, rtm) = self.core_reflection(l_max);
        let (le, lh) = (m.lambda_e, m.lambda_h);
        let mut out = vec![(Complex::zero(), Complex::zero()); l_max + 1];
        for l in 1..=l_max {
            let u = j1[l] + rte[l] * h1[l];
            let zu = zj1[l] + rte[l] * zh1[l];
            let det = le * u * zh0[l] - lh * h0[l] * zu;
            let ta = (lh * j0[l] * zu - le * u * zj0[l]) / det;
            let v = j1[l] + rtm[l] * h1[l];
            let zv = zj1[l] + rtm[l] * zh1[l];
            let det = le * zv * h0[l] - lh * zh0[l] * v;
            let tb = (lh * zj0[l] * v - le * zv * j0[l]) / det;
            out[l] = (ta, tb);
        }
        out
    }

    fn core_reflection(&self, l_max: usize) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let zero = vec![Complex::zero(); l_max + 1];
        let k1 = self.media.k1;
        let y1 = k1 * self.r1;
        let j = spherical_jn(l_max, y1);
        let h = spherical_hn1(l_max, y1);
        let zj = riccati_derivative(&j, y1);
        let zh = riccati_derivative(&h, y1);
        let i = Complex::<T>::i();
        match self.core {
            Core::Solid => (zero.clone(), zero),
            Core::Pec => {
                let te = (0..=l_max).map(|l| if l == 0 { Complex::zero() } else { -j[l] / h[l] }).collect();
                let tm = (0..=l_max).map(|l| if l == 0 { Complex::zero() } else { -zj[l] / zh[l] }).collect();
                (te, tm)
            }
            Core::Impedance(lam) => {
                let c = Complex::new(lam, T::zero()) / k1;
                let te = (0..=l_max)
                    .map(|l| {
                        if l == 0 {
                            Complex::zero()
                        } else {
                            -(-i * zj[l] + c * j[l]) / (-i * zh[l] + c * h[l])
                        }
                    })
                    .collect();
                let tm = (0..=l_max)
                    .map(|l| {
                        if l == 0 {
                            Complex::zero()
                        } else {
                            -(-i * j[l] - c * zj[l]) / (-i * h[l] - c * zh[l])
                        }
                    })
                    .collect();
                (te, tm)
            }
        }
    }

    /// Scattered coefficients for the plane wave `(d, q)`.
    ///
    /// Starts at degree `ceil(k₀ r₀) + 10` and raises it until the last degree
    /// carries less than the tolerated relative share.
    pub fn coefficients(&self, d: V3<T>, q: V3<T>) -> Result<MieCoefficients<T>, Error> {
        let k0r0 = (self.media.k0 * self.r0).to_f64().unwrap_or(0.0);
        let mut l_max = k0r0.ceil() as usize + 10;
        let tol = lit::<T>(crate::tolerances::SERIES_TAIL);
        loop {
            let c = self.coefficients_at(d, q, l_max);
            if c.tail <= tol {
                return Ok(c);
            }
            l_max += 5;
            if l_max > 120 {
                return Err(Error::Truncation(format!(
                    "series tail {} still above tolerance at degree 120",
                    c.tail
                )));
            }
        }
    }

    /// Scattered coefficients at a fixed truncation degree.
    pub fn coefficients_at(&self, d: V3<T>, q: V3<T>, l_max: usize) -> MieCoefficients<T> {
        let k0 = self.media.k0;
        let h = vec3::cross(d, q);
        let e = vec3::cross(h, d);
        let mut ev = ShEvaluator::new(l_max);
        ev.eval(d);
        let tr = self.transfer(l_max);
        let n = sh_count(l_max);
        let mut alpha = vec![Complex::zero(); n];
        let mut beta = vec![Complex::zero(); n];
        let four_pi = lit::<T>(4.0) * T::PI();
        let mut ipow = Complex::new(T::one(), T::zero());
        let mut per_degree = vec![T::zero(); l_max + 1];
        for l in 1..=l_max {
            ipow = ipow * Complex::<T>::i();
            let ll = int::<T>(l * (l + 1));
            for m in -(l as i64)..=(l as i64) {
                let k = sh_index(l, m);
                let g = ev.grad[k];
                let bi = ipow * (four_pi * k0 * vec3::dot(e, g) / ll);
                let ai = ipow * Complex::<T>::i() * (four_pi * k0 * vec3::dot(h, g) / ll);
                alpha[k] = tr[l].0 * ai;
                beta[k] = tr[l].1 * bi;
                per_degree[l] = per_degree[l] + (alpha[k].norm_sqr() + beta[k].norm_sqr()) * ll;
            }
        }
        let total: T = per_degree.iter().copied().sum();
        let tail = if total > T::zero() { (per_degree[l_max] / total).sqrt() } else { T::zero() };
        MieCoefficients { l_max, alpha, beta, tail }
    }

    /// Far-field pattern of the scattered field, `E^s ~ e^{ik₀r}/r E^∞`.
    pub fn farfield(&self, coef: &MieCoefficients<T>, xhat: V3<T>) -> C3<T> {
        let mut ev = ShEvaluator::new(coef.l_max);
        ev.eval(xhat);
        let mut out = vec3::czero();
        let mi = -Complex::<T>::i();
        let mut pow = Complex::new(T::one(), T::zero());
        for l in 1..=coef.l_max {
            pow = pow * mi;
            for m in -(l as i64)..=(l as i64) {
                let k = sh_index(l, m);
                let g = ev.grad[k];
                let xg = vec3::cross(xhat, g);
                let a = -coef.alpha[k] * pow * mi;
                let b = coef.beta[k] * pow;
                for i in 0..3 {
                    out[i] = out[i] + a * xg[i] + b * g[i];
                }
            }
        }
        vec3::cscale(Complex::new(T::one() / self.media.k0, T::zero()), out)
    }
}

/// Whether a scene shape is a sphere (for callers choosing the oracle).
pub fn is_sphere<T: Real>(shape: &Shape<T>) -> bool {
    matches!(shape, Shape::Sphere { .. })
}
