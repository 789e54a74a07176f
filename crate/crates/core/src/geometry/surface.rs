//! Discretized surfaces: tensor Gauss-Legendre x trapezoid grids in the sphere parameter.

use crate::error::Error;
use crate::geometry::shape::{check_rotation, tangent_frame, GeomEvaluator, Placement, Shape};
use crate::scalar::{int, lit, Real};
use crate::special::gauss_legendre;
use crate::vec3::{self, V3};

/// Smallest accepted quadrature order.
pub const MIN_ORDER: usize = 8;

/// Order of the finer grid used for off-surface evaluation and proximity checks.
pub fn eval_order(order: usize) -> usize {
    (2 * order).max(48)
}

/// A closed surface with its quadrature nodes.
///
/// Node `n = i * n_phi + j` sits at `cos θ_i` (Gauss-Legendre) and `φ_j = 2πj/n_phi`.
#[derive(Clone, Debug)]
pub struct Surface<T: Real> {
    placement: Placement<T>,
    n_theta: usize,
    n_phi: usize,
    pub params: Vec<V3<T>>,
    pub points: Vec<V3<T>>,
    pub normals: Vec<V3<T>>,
    pub jac: Vec<T>,
    /// Quadrature weights for `dŝ` on the unit sphere.
    pub sphere_weights: Vec<T>,
    /// Quadrature weights for the surface measure.
    pub weights: Vec<T>,
    /// Differential of the parametrization at each node.
    pub dx: Vec<[[T; 3]; 3]>,
}

impl<T: Real> Surface<T> {
    /// Discretizes with `order` Gauss nodes in `cos θ` and `2 * order` nodes in `φ`.
    pub fn new(placement: Placement<T>, order: usize) -> Result<Self, Error> {
        if order < MIN_ORDER {
            return Err(Error::ResolutionTooLow { order, min: MIN_ORDER });
        }
        Self::with_grid(placement, order, 2 * order)
    }

    /// Discretizes on an arbitrary `n_theta x n_phi` grid.
    pub fn with_grid(placement: Placement<T>, n_theta: usize, n_phi: usize) -> Result<Self, Error> {
        placement.shape.validate()?;
        check_rotation(&placement.rotation)?;
        if n_theta < 2 || n_phi < 3 {
            return Err(Error::ResolutionTooLow { order: n_theta, min: 2 });
        }
        let (xs, ws) = gauss_legendre::<T>(n_theta);
        let two_pi = lit::<T>(2.0) * T::PI();
        let dphi = two_pi / int::<T>(n_phi);
        let n = n_theta * n_phi;
        let mut s = Self {
            placement,
            n_theta,
            n_phi,
            params: Vec::with_capacity(n),
            points: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            jac: Vec::with_capacity(n),
            sphere_weights: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            dx: Vec::with_capacity(n),
        };
        let mut ge = GeomEvaluator::new(&s.placement);
        let mut bad_jac = 0usize;
        let mut not_star = 0usize;
        let mut geoms = Vec::with_capacity(n);
        for (x, w) in xs.iter().zip(&ws) {
            let u = (T::one() - *x * *x).max(T::zero()).sqrt();
            for j in 0..n_phi {
                let phi = dphi * int::<T>(j);
                let p = [u * phi.cos(), u * phi.sin(), *x];
                let g = ge.eval(p);
                if !(g.jac > T::zero()) || !g.jac.is_finite() {
                    bad_jac += 1;
                }
                let radial = vec3::sub(g.x, s.placement.center);
                if !(vec3::dot(radial, g.normal) > T::zero()) {
                    not_star += 1;
                }
                geoms.push((p, g, *w * dphi));
            }
        }
        drop(ge);
        for (p, g, ws2) in geoms {
            s.params.push(p);
            s.points.push(g.x);
            s.normals.push(g.normal);
            s.jac.push(g.jac);
            s.sphere_weights.push(ws2);
            s.weights.push(ws2 * g.jac);
            s.dx.push(g.dx);
        }
        if bad_jac > 0 {
            return Err(Error::InvalidGeometry(format!(
                "parametrization degenerates at {bad_jac} nodes (non-positive Jacobian)"
            )));
        }
        if not_star > 0 {
            return Err(Error::InvalidGeometry(format!(
                "surface is not star-shaped about its center ({not_star} nodes fold back)"
            )));
        }
        if let Shape::PerturbedSphere { .. } = s.placement.shape {
            let dev = s.placement.shape.max_relative_perturbation(&s.params);
            if dev >= lit(0.3) {
                return Err(Error::InvalidGeometry(format!(
                    "perturbation amplitude {dev} exceeds the admissible 0.3"
                )));
            }
        }
        Ok(s)
    }

    pub fn placement(&self) -> &Placement<T> {
        &self.placement
    }

    pub fn order(&self) -> usize {
        self.n_theta
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total surface area by quadrature.
    pub fn area(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Polar angle of the parameter of node `n`.
    pub fn polar_angle(&self, n: usize) -> T {
        self.params[n][2].max(-T::one()).min(T::one()).acos()
    }

    /// Local mesh spacing at node `n` (square root of its quadrature cell).
    pub fn spacing(&self, n: usize) -> T {
        self.weights[n].sqrt()
    }

    /// Largest local spacing over the surface.
    pub fn max_spacing(&self) -> T {
        (0..self.len()).map(|n| self.spacing(n)).fold(T::zero(), T::max)
    }

    /// Tangent frame `(e1, e2)` at node `n` with `e1 x e2 = ν`.
    pub fn tangent_frame(&self, n: usize) -> (V3<T>, V3<T>) {
        let (t1, _) = tangent_frame(self.params[n]);
        let e1 = vec3::normalize(vec3::matvec(&self.dx[n], t1));
        let e2 = vec3::cross(self.normals[n], e1);
        (e1, e2)
    }

    /// Smallest distance from `x` to a node, relative to the local spacing there.
    ///
    /// Returns `(distance, spacing_at_nearest)` for the node minimizing `distance / spacing`.
    pub fn proximity(&self, x: V3<T>) -> (T, T) {
        let mut best = (T::infinity(), T::one());
        let mut ratio = T::infinity();
        for (n, p) in self.points.iter().enumerate() {
            let d = vec3::norm(vec3::sub(x, *p));
            let h = self.spacing(n);
            if d / h < ratio {
                ratio = d / h;
                best = (d, h);
            }
        }
        best
    }

    /// Same surface on the evaluation grid for this order.
    pub fn evaluation_grid(&self) -> Result<Surface<T>, Error> {
        let pe = eval_order(self.n_theta);
        Surface::with_grid(self.placement.clone(), pe, 2 * pe)
    }

    /// Signed depth of `x` (positive inside).
    pub fn depth(&self, x: V3<T>) -> T {
        self.placement.depth(x)
    }
}

/// The same surface mapped by the rotation `q` about the origin.
pub fn rotate_surface<T: Real>(surface: &Surface<T>, q: &[[T; 3]; 3]) -> Result<Surface<T>, Error> {
    check_rotation(q)?;
    let pl = surface.placement();
    let placement = Placement {
        shape: pl.shape.clone(),
        center: vec3::matvec(q, pl.center),
        rotation: vec3::matmul3(q, &pl.rotation),
    };
    let mut out = surface.clone();
    out.placement = placement;
    for n in 0..out.len() {
        out.points[n] = vec3::matvec(q, surface.points[n]);
        out.normals[n] = vec3::matvec(q, surface.normals[n]);
        out.dx[n] = vec3::matmul3(q, &surface.dx[n]);
    }
    Ok(out)
}

/// Minimal node-to-node distance between two surfaces.
pub fn min_separation<T: Real>(a: &Surface<T>, b: &Surface<T>) -> T {
    let mut best = T::infinity();
    for p in &a.points {
        for q in &b.points {
            best = best.min(vec3::norm(vec3::sub(*p, *q)));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shape::Mode;
    use std::f64::consts::PI;

    fn sphere(r: f64) -> Placement<f64> {
        Placement::new(Shape::Sphere { radius: r }, [0.0; 3])
    }

    #[test]
    fn unit_sphere_area() {
        let s = Surface::new(sphere(1.0), 16).unwrap();
        assert!((s.area() - 4.0 * PI).abs() < 1e-10);
        for n in 0..s.len() {
            assert!((vec3::norm(s.points[n]) - 1.0).abs() < 1e-14);
            assert!((vec3::dot(s.normals[n], s.points[n]) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn prolate_spheroid_area() {
        let pl = Placement::new(Shape::Ellipsoid { semi_axes: [1.0, 1.0, 2.0] }, [0.0; 3]);
        let s = Surface::new(pl, 24).unwrap();
        let (a, c): (f64, f64) = (1.0, 2.0);
        let e = (1.0 - a * a / (c * c)).sqrt();
        let exact = 2.0 * PI * a * a * (1.0 + c / (a * e) * e.asin());
        assert!((s.area() - exact).abs() < 1e-8, "{} vs {}", s.area(), exact);
    }

    #[test]
    fn low_order_rejected() {
        assert!(matches!(Surface::new(sphere(1.0), 6), Err(Error::ResolutionTooLow { .. })));
    }

    #[test]
    fn large_perturbation_rejected() {
        let pl = Placement::new(
            Shape::PerturbedSphere { radius: 1.0, modes: vec![Mode { l: 2, m: 0, amplitude: 0.6 }] },
            [0.0; 3],
        );
        assert!(Surface::new(pl, 12).is_err());
        let ok = Placement::new(
            Shape::PerturbedSphere { radius: 1.0, modes: vec![Mode { l: 2, m: 0, amplitude: 0.1 }] },
            [0.0; 3],
        );
        assert!(Surface::new(ok, 12).is_ok());
    }

    #[test]
    fn rotation_about_axis_by_grid_step_permutes_nodes() {
        let s = Surface::new(sphere(1.5), 10).unwrap();
        let a = 2.0 * PI / 20.0;
        let q = [[a.cos(), -a.sin(), 0.0], [a.sin(), a.cos(), 0.0], [0.0, 0.0, 1.0]];
        let r = rotate_surface(&s, &q).unwrap();
        for p in &r.points {
            let hit = s.points.iter().any(|x| vec3::norm(vec3::sub(*x, *p)) < 1e-12);
            assert!(hit);
        }
        assert!((r.area() - s.area()).abs() < 1e-12);
        let refl = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(rotate_surface(&s, &refl).is_err());
    }

    #[test]
    fn rotated_nodes_and_normals_follow_rotation() {
        let pl = Placement::new(Shape::Ellipsoid { semi_axes: [1.0, 1.3, 0.8] }, [0.2, 0.0, 0.1]);
        let s = Surface::new(pl, 10).unwrap();
        let (c, sn) = (0.3f64.cos(), 0.3f64.sin());
        let q = [[1.0, 0.0, 0.0], [0.0, c, -sn], [0.0, sn, c]];
        let r = rotate_surface(&s, &q).unwrap();
        for n in 0..s.len() {
            let p = vec3::matvec(&q, s.points[n]);
            let v = vec3::matvec(&q, s.normals[n]);
            assert!(vec3::norm(vec3::sub(p, r.points[n])) < 1e-14);
            assert!(vec3::norm(vec3::sub(v, r.normals[n])) < 1e-14);
            assert_eq!(s.weights[n], r.weights[n]);
        }
    }

    #[test]
    fn depth_sign() {
        let pl = Placement::new(Shape::Ellipsoid { semi_axes: [1.0, 2.0, 1.0] }, [1.0, 0.0, 0.0]);
        assert!(pl.depth([1.0, 1.5, 0.0]) > 0.0);
        assert!(pl.depth([1.0, 2.5, 0.0]) < 0.0);
    }
}
