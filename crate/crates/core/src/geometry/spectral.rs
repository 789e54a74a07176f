//! Band-limited representations of surface densities.
//!
//! Scalar densities are `σ = J⁻¹ Σ γ_k Y_k` and tangential densities are Piola
//! transforms `a = J⁻¹ DX Σ α_k v_k` of orthonormal vector harmonics on the
//! unit sphere, `v_{2j} = ∇Y/√(l(l+1))` and `v_{2j+1} = ŝ × ∇Y/√(l(l+1))`.
//! With these, integrals `∫ K a ds` reduce to `∫ K DX v dŝ` and the surface
//! divergence acts diagonally on the coefficients.

use num_complex::Complex;

use crate::geometry::shape::tangent_frame;
use crate::geometry::surface::Surface;
use crate::linalg::RMat;
use crate::scalar::{int, Real};
use crate::special::{sh_count, sh_degree_order, ShEvaluator};
use crate::vec3::{self, C3, V3};

/// Spectral degree used for densities on a grid of the given order.
pub fn degree_for_order(order: usize) -> usize {
    (order / 2).saturating_sub(1).max(1)
}

/// Number of tangential basis fields of degree `1..=l_max`.
pub const fn tangential_count(l_max: usize) -> usize {
    2 * (sh_count(l_max) - 1)
}

/// Degree of tangential basis field `k`.
pub fn tangential_degree(k: usize) -> usize {
    sh_degree_order(k / 2 + 1).0
}

/// Evaluates `DX v_k` and `Y_k` at the parameter point `s`.
///
/// `tan` receives `tangential_count(l_max)` vectors, `scal` receives `sh_count(l_max)` values.
pub fn eval_weighted_basis<T: Real>(
    ev: &mut ShEvaluator<T>,
    s: V3<T>,
    dx: &[[T; 3]; 3],
    tan: &mut [V3<T>],
    scal: &mut [T],
) {
    ev.eval(s);
    let n = sh_count(ev.l_max());
    scal[..n].copy_from_slice(&ev.y[..n]);
    for l in 1..=ev.l_max() {
        let inv = T::one() / ev.degree_norm(l);
        for idx in l * l..(l + 1) * (l + 1) {
            let g = vec3::scale(inv, ev.grad[idx]);
            let c = vec3::cross(s, g);
            tan[2 * (idx - 1)] = vec3::matvec(dx, g);
            tan[2 * (idx - 1) + 1] = vec3::matvec(dx, c);
        }
    }
}

/// Pullback `v = J (DX|_T)⁻¹ a` as a 3x3 matrix acting on ambient vectors (normal part discarded).
pub fn pullback_matrix<T: Real>(s: V3<T>, dx: &[[T; 3]; 3], jac: T) -> [[T; 3]; 3] {
    let (t1, t2) = tangent_frame(s);
    let g1 = vec3::matvec(dx, t1);
    let g2 = vec3::matvec(dx, t2);
    let (a, b, c) = (vec3::dot(g1, g1), vec3::dot(g1, g2), vec3::dot(g2, g2));
    let det = a * c - b * b;
    // rows of (GᵀG)⁻¹ Gᵀ
    let r1 = vec3::scale(T::one() / det, vec3::sub(vec3::scale(c, g1), vec3::scale(b, g2)));
    let r2 = vec3::scale(T::one() / det, vec3::sub(vec3::scale(a, g2), vec3::scale(b, g1)));
    let mut m = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = jac * (t1[i] * r1[j] + t2[i] * r2[j]);
        }
    }
    m
}

/// Spectral operators of degree `l_max` on the nodes of one surface.
#[derive(Clone, Debug)]
pub struct SpectralSpace<T> {
    pub l_max: usize,
    /// Projection of nodal tangential fields (`3N` interleaved) to coefficients.
    pub tan_proj: RMat<T>,
    /// Nodal values of the tangential basis (`3N x n_tan`).
    pub tan_interp: RMat<T>,
    /// Projection of nodal scalar densities to coefficients.
    pub scal_proj: RMat<T>,
    /// Nodal values of the scalar basis (`N x n_scal`).
    pub scal_interp: RMat<T>,
}

impl<T: Real> SpectralSpace<T> {
    pub fn new(surface: &Surface<T>, l_max: usize) -> Self {
        let n = surface.len();
        let nt = tangential_count(l_max);
        let ns = sh_count(l_max);
        let mut tan_proj = RMat::zeros(nt, 3 * n);
        let mut tan_interp = RMat::zeros(3 * n, nt);
        let mut scal_proj = RMat::zeros(ns, n);
        let mut scal_interp = RMat::zeros(n, ns);
        let mut ev = ShEvaluator::new(l_max);
        let mut tan = vec![[T::zero(); 3]; nt];
        let mut tan_s2 = vec![[T::zero(); 3]; nt];
        let mut scal = vec![T::zero(); ns];
        let ident = vec3::identity3();
        for node in 0..n {
            let s = surface.params[node];
            let jac = surface.jac[node];
            eval_weighted_basis(&mut ev, s, &surface.dx[node], &mut tan, &mut scal);
            eval_weighted_basis(&mut ev, s, &ident, &mut tan_s2, &mut scal);
            let pb = pullback_matrix(s, &surface.dx[node], jac);
            let w = surface.sphere_weights[node];
            for k in 0..nt {
                let row = vec3::matvec_t(&pb, tan_s2[k]);
                for a in 0..3 {
                    tan_proj.set(k, 3 * node + a, w * row[a]);
                    tan_interp.set(3 * node + a, k, tan[k][a] / jac);
                }
            }
            for k in 0..ns {
                scal_proj.set(k, node, w * jac * scal[k]);
                scal_interp.set(node, k, scal[k] / jac);
            }
        }
        Self { l_max, tan_proj, tan_interp, scal_proj, scal_interp }
    }

    pub fn n_tan(&self) -> usize {
        tangential_count(self.l_max)
    }

    pub fn n_scal(&self) -> usize {
        sh_count(self.l_max)
    }

    /// Coefficients of a nodal tangential field.
    pub fn project_tangential(&self, field: &[C3<T>]) -> Vec<Complex<T>> {
        let flat: Vec<Complex<T>> = field.iter().flat_map(|v| v.iter().copied()).collect();
        apply_real(&self.tan_proj, &flat)
    }

    /// Nodal values of a tangential coefficient vector.
    pub fn interp_tangential(&self, coef: &[Complex<T>]) -> Vec<C3<T>> {
        let flat = apply_real(&self.tan_interp, coef);
        flat.chunks(3).map(|c| [c[0], c[1], c[2]]).collect()
    }

    pub fn project_scalar(&self, field: &[Complex<T>]) -> Vec<Complex<T>> {
        apply_real(&self.scal_proj, field)
    }

    pub fn interp_scalar(&self, coef: &[Complex<T>]) -> Vec<Complex<T>> {
        apply_real(&self.scal_interp, coef)
    }
}

/// Surface divergence as a map from tangential to scalar coefficients.
pub fn divergence_map<T: Real>(l_max: usize) -> RMat<T> {
    let nt = tangential_count(l_max);
    let mut d = RMat::zeros(sh_count(l_max), nt);
    for idx in 1..sh_count(l_max) {
        let (l, _) = sh_degree_order(idx);
        let lf = int::<T>(l);
        d.set(idx, 2 * (idx - 1), -(lf * (lf + T::one())).sqrt());
    }
    d
}

/// Real matrix applied to a complex vector.
pub fn apply_real<T: Real>(m: &RMat<T>, x: &[Complex<T>]) -> Vec<Complex<T>> {
    assert_eq!(m.cols(), x.len());
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(x)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + *b * *a)
        })
        .collect()
}

/// Spectral surface divergence of a nodal tangential field.
///
/// Uses the highest degree the grid integrates exactly.
pub fn surface_divergence<T: Real>(surface: &Surface<T>, field: &[C3<T>]) -> Vec<Complex<T>> {
    let l_max = surface.n_theta().saturating_sub(1).max(1);
    let sp = SpectralSpace::new(surface, l_max);
    let coef = sp.project_tangential(field);
    let div = apply_real(&divergence_map::<T>(l_max), &coef);
    sp.interp_scalar(&div)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shape::{Placement, Shape};
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn divergence_of_projected_ez_on_unit_sphere() {
        let s = Surface::new(Placement::new(Shape::Sphere { radius: 1.0 }, [0.0; 3]), 12).unwrap();
        let field: Vec<C3<f64>> = (0..s.len())
            .map(|n| {
                let nu = s.normals[n];
                let v = [-nu[2] * nu[0], -nu[2] * nu[1], 1.0 - nu[2] * nu[2]];
                vec3::cfrom(v)
            })
            .collect();
        let div = surface_divergence(&s, &field);
        for n in 0..s.len() {
            assert!((div[n] - c(-2.0 * s.points[n][2])).norm() < 1e-12);
        }
    }

    #[test]
    fn divergence_on_sphere_of_radius_two() {
        let s = Surface::new(Placement::new(Shape::Sphere { radius: 2.0 }, [0.0; 3]), 12).unwrap();
        let field: Vec<C3<f64>> = (0..s.len())
            .map(|n| {
                let nu = s.normals[n];
                vec3::cfrom([-nu[2] * nu[0], -nu[2] * nu[1], 1.0 - nu[2] * nu[2]])
            })
            .collect();
        let div = surface_divergence(&s, &field);
        for n in 0..s.len() {
            assert!((div[n] - c(-2.0 * s.points[n][2] / 4.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn projection_roundtrip_on_ellipsoid() {
        let pl = Placement::new(Shape::Ellipsoid { semi_axes: [1.0, 1.4, 0.7] }, [0.0, 0.3, 0.0]);
        let s = Surface::new(pl, 12).unwrap();
        let sp = SpectralSpace::new(&s, degree_for_order(12));
        let coef: Vec<Complex64> =
            (0..sp.n_tan()).map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64).cos())).collect();
        let nodal = sp.interp_tangential(&coef);
        for n in 0..s.len() {
            assert!(vec3::rcdot(s.normals[n], nodal[n]).norm() < 1e-13);
        }
        let back = sp.project_tangential(&nodal);
        for k in 0..coef.len() {
            assert!((back[k] - coef[k]).norm() < 1e-12);
        }
        let scoef: Vec<Complex64> = (0..sp.n_scal()).map(|k| c(1.0 / (1.0 + k as f64))).collect();
        let back = sp.project_scalar(&sp.interp_scalar(&scoef));
        for k in 0..scoef.len() {
            assert!((back[k] - scoef[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn piola_divergence_theorem_on_ellipsoid() {
        // ∫ Div a ds = 0 and ∫ Div(a) f ds = -∫ a·∇f ds for f = x_1
        let pl = Placement::new(Shape::Ellipsoid { semi_axes: [1.0, 1.4, 0.7] }, [0.0; 3]);
        let s = Surface::new(pl, 16).unwrap();
        let l = degree_for_order(16);
        let sp = SpectralSpace::new(&s, l);
        let coef: Vec<Complex64> = (0..sp.n_tan()).map(|k| c(((k * 7) % 5) as f64 - 2.0)).collect();
        let a = sp.interp_tangential(&coef);
        let div = sp.interp_scalar(&apply_real(&divergence_map(l), &coef));
        let total: Complex64 = (0..s.len()).map(|n| div[n] * s.weights[n]).sum();
        assert!(total.norm() < 1e-11);
        let lhs: Complex64 = (0..s.len()).map(|n| div[n] * s.points[n][0] * s.weights[n]).sum();
        let rhs: Complex64 = (0..s.len()).map(|n| -a[n][0] * s.weights[n]).sum();
        assert!((lhs - rhs).norm() < 1e-11, "{lhs} {rhs}");
    }
}
