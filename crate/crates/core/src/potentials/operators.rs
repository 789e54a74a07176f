//! Boundary operators of basis densities at one target, assembled from a [`Bank`].
//!
//! Each operator is a `3 x n` (or `1 x n`) complex block mapping coefficient
//! vectors to the value at the target. Target-side pointwise maps (`ν×`, `R`, `P`)
//! are real `3 x 3` matrices applied on the left.

use num_complex::Complex;

use crate::linalg::CMat;
use crate::potentials::bank::{scal_row, tan_row, Bank};
use crate::scalar::{int, lit, Real};
use crate::special::sh_degree_order;
use crate::vec3::V3;

pub type M3<T> = [[T; 3]; 3];

/// `v ↦ ν × v`.
pub fn cross_matrix<T: Real>(nu: V3<T>) -> M3<T> {
    let z = T::zero();
    [[z, -nu[2], nu[1]], [nu[2], z, -nu[0]], [-nu[1], nu[0], z]]
}

/// `R v = v × ν`.
pub fn r_matrix<T: Real>(nu: V3<T>) -> M3<T> {
    scale3(-T::one(), cross_matrix(nu))
}

/// `P v = (ν × v) × ν`, the tangential projection.
pub fn p_matrix<T: Real>(nu: V3<T>) -> M3<T> {
    let mut m = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = -nu[i] * nu[j];
        }
        m[i][i] = m[i][i] + T::one();
    }
    m
}

pub fn scale3<T: Real>(s: T, m: M3<T>) -> M3<T> {
    m.map(|r| r.map(|v| v * s))
}

pub fn mul3<T: Real>(a: &M3<T>, b: &M3<T>) -> M3<T> {
    crate::vec3::matmul3(a, b)
}

/// `m · op` for a `3 x n` block.
pub fn apply3<T: Real>(m: &M3<T>, op: &CMat<T>) -> CMat<T> {
    let n = op.cols();
    let mut out = CMat::zeros(3, n);
    for i in 0..3 {
        for j in 0..3 {
            let s = m[i][j];
            if s == T::zero() {
                continue;
            }
            let src = op.row(j).to_vec();
            for (o, v) in out.row_mut(i).iter_mut().zip(src) {
                *o = *o + v * s;
            }
        }
    }
    out
}

fn rows<T: Real>(m: &CMat<T>, r0: usize, count: usize) -> CMat<T> {
    m.block(r0, 0, count, m.cols())
}

/// `m · Div` for a block `m` acting on scalar coefficients.
fn compose_div<T: Real>(m: &CMat<T>, n_tan: usize) -> CMat<T> {
    let mut out = CMat::zeros(m.rows(), n_tan);
    for idx in 1..m.cols() {
        let (l, _) = sh_degree_order(idx);
        let lf = int::<T>(l);
        let f = -(lf * (lf + T::one())).sqrt();
        for r in 0..m.rows() {
            out.set(r, 2 * (idx - 1), m.get(r, idx) * f);
        }
    }
    out
}

impl<T: Real> Bank<T> {
    /// `∫ Φ a`.
    pub fn slv(&self) -> CMat<T> {
        rows(&self.tan, tan_row::SLV, 3)
    }

    /// `curl ∫ Φ a`.
    pub fn curl(&self) -> CMat<T> {
        rows(&self.tan, tan_row::CURL, 3)
    }

    /// `div ∫ Φ a`.
    pub fn div(&self) -> CMat<T> {
        rows(&self.tan, tan_row::DIV, 1)
    }

    /// `∫ ∇_x Φ Div a`, through the spectral surface divergence.
    pub fn grad_div(&self) -> CMat<T> {
        compose_div(&self.gsl(), self.tan.cols())
    }

    /// `∫ Φ Div a` (one row).
    pub fn sls_div(&self) -> CMat<T> {
        compose_div(&self.sls(), self.tan.cols())
    }

    /// `curl curl ∫ Φ a = k² ∫ Φ a + ∫ ∇_x Φ Div a`.
    pub fn curlcurl(&self) -> CMat<T> {
        let mut out = self.grad_div();
        out.add_scaled(self.k * self.k, &self.slv());
        out
    }

    /// `2 ν × curl ∫ Φ a`.
    pub fn mag(&self, nu: V3<T>) -> CMat<T> {
        apply3(&scale3(lit(2.0), cross_matrix(nu)), &self.curl())
    }

    /// `2 ν × curl curl ∫ Φ a`.
    pub fn efi(&self, nu: V3<T>) -> CMat<T> {
        apply3(&scale3(lit(2.0), cross_matrix(nu)), &self.curlcurl())
    }

    /// `∫ Φ σ` (one row).
    pub fn sls(&self) -> CMat<T> {
        rows(&self.scal, scal_row::SLS, 1)
    }

    /// `∫ ∇_x Φ σ`.
    pub fn gsl(&self) -> CMat<T> {
        rows(&self.scal, scal_row::GSL, 3)
    }

    /// `∫ ν_y Φ σ`.
    pub fn nsl(&self) -> CMat<T> {
        rows(&self.scal, scal_row::NSL, 3)
    }

    /// `curl ∫ ν_y Φ σ`.
    pub fn curln(&self) -> CMat<T> {
        rows(&self.scal, scal_row::CURLN, 3)
    }

    /// `∫ ∂_{ν_y} Φ σ` (one row).
    pub fn dbl(&self) -> CMat<T> {
        rows(&self.scal, scal_row::DBL, 1)
    }

    /// `ν_x × ∫ ∇_x Φ × (ν_y - ν_x) σ`.
    pub fn curln_difference(&self, nu: V3<T>) -> CMat<T> {
        let nx = cross_matrix(nu);
        let mut out = apply3(&nx, &self.curln());
        out.add_scaled(Complex::new(T::one(), T::zero()), &apply3(&mul3(&nx, &nx), &self.gsl()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3;

    #[test]
    fn rotation_squares_to_minus_identity_on_tangent_fields() {
        let nu = vec3::normalize([0.3f64, -0.2, 0.9]);
        let r = r_matrix(nu);
        let rr = mul3(&r, &r);
        let p = p_matrix(nu);
        for i in 0..3 {
            for j in 0..3 {
                assert!((rr[i][j] + p[i][j]).abs() < 1e-15);
            }
        }
    }
}
