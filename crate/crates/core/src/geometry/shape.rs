//! Closed star-shaped surfaces parametrized over the unit sphere.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::{lit, Real};
use crate::special::ShEvaluator;
use crate::vec3::{self, V3};

/// Reference shape before placement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape<T> {
    Sphere { radius: T },
    Ellipsoid { semi_axes: [T; 3] },
    /// `r(ŝ) = radius * (1 + Σ c_lm Y_lm(ŝ))` with real orthonormal harmonics.
    PerturbedSphere { radius: T, modes: Vec<Mode<T>> },
}

/// One harmonic term of a perturbed sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode<T> {
    pub l: usize,
    pub m: i64,
    pub amplitude: T,
}

/// Local differential data of the parametrization at one parameter point.
#[derive(Clone, Copy, Debug)]
pub struct PointGeom<T> {
    pub x: V3<T>,
    /// Matrix whose action on tangent vectors of `S²` is the differential.
    pub dx: [[T; 3]; 3],
    pub normal: V3<T>,
    /// Area ratio between the surface and the unit sphere.
    pub jac: T,
}

/// A shape placed in space: `X(ŝ) = center + Q X₀(ŝ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Placement<T> {
    pub shape: Shape<T>,
    pub center: V3<T>,
    pub rotation: [[T; 3]; 3],
}

/// Orthonormal tangent pair `(t1, t2)` at `s` with `t1 x t2 = s`.
pub fn tangent_frame<T: Real>(s: V3<T>) -> (V3<T>, V3<T>) {
    let rho = (s[0] * s[0] + s[1] * s[1]).sqrt();
    let (cp, sp) = if rho > T::zero() {
        (s[0] / rho, s[1] / rho)
    } else {
        (T::one(), T::zero())
    };
    let t1 = [s[2] * cp, s[2] * sp, -rho];
    let t2 = [-sp, cp, T::zero()];
    (t1, t2)
}

impl<T: Real> Shape<T> {
    /// Checks parameters of the reference shape.
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::InvalidGeometry(m.to_string()));
        match self {
            Shape::Sphere { radius } => {
                if !(*radius > T::zero()) || !radius.is_finite() {
                    return bad("sphere radius must be positive and finite");
                }
            }
            Shape::Ellipsoid { semi_axes } => {
                if semi_axes.iter().any(|a| !(*a > T::zero()) || !a.is_finite()) {
                    return bad("ellipsoid semi-axes must be positive and finite");
                }
            }
            Shape::PerturbedSphere { radius, modes } => {
                if !(*radius > T::zero()) || !radius.is_finite() {
                    return bad("perturbed sphere radius must be positive and finite");
                }
                for md in modes {
                    if md.m.unsigned_abs() as usize > md.l || !md.amplitude.is_finite() {
                        return bad("perturbation mode needs |m| <= l and finite amplitude");
                    }
                }
            }
        }
        Ok(())
    }

    fn l_max(&self) -> usize {
        match self {
            Shape::PerturbedSphere { modes, .. } => modes.iter().map(|m| m.l).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Radial profile `ρ(ŝ)` and its surface gradient for perturbed spheres.
    fn radial(&self, ev: &mut ShEvaluator<T>, s: V3<T>) -> (T, V3<T>) {
        match self {
            Shape::PerturbedSphere { radius, modes } => {
                ev.eval(s);
                let mut rho = T::one();
                let mut g = [T::zero(); 3];
                for md in modes {
                    let k = crate::special::sh_index(md.l, md.m);
                    rho = rho + md.amplitude * ev.y[k];
                    for i in 0..3 {
                        g[i] = g[i] + md.amplitude * ev.grad[k][i];
                    }
                }
                (*radius * rho, vec3::scale(*radius, g))
            }
            Shape::Sphere { radius } => (*radius, [T::zero(); 3]),
            Shape::Ellipsoid { .. } => unreachable!("ellipsoids are not radial"),
        }
    }

    /// Largest relative deviation of a perturbed sphere from its base radius,
    /// sampled at the given directions.
    pub fn max_relative_perturbation(&self, dirs: &[V3<T>]) -> T {
        match self {
            Shape::PerturbedSphere { radius, .. } => {
                let mut ev = ShEvaluator::new(self.l_max());
                dirs.iter()
                    .map(|&s| ((self.radial(&mut ev, s).0 - *radius) / *radius).abs())
                    .fold(T::zero(), T::max)
            }
            _ => T::zero(),
        }
    }

    /// Distance from the reference origin to the surface along the unit direction `d`.
    pub fn radial_extent(&self, d: V3<T>) -> T {
        match self {
            Shape::Sphere { radius } => *radius,
            Shape::Ellipsoid { semi_axes } => {
                let q = (0..3).map(|i| (d[i] / semi_axes[i]).powi(2)).sum::<T>();
                T::one() / q.sqrt()
            }
            Shape::PerturbedSphere { .. } => {
                let mut ev = ShEvaluator::new(self.l_max());
                self.radial(&mut ev, d).0
            }
        }
    }
}

/// Evaluator of placed-shape geometry that caches harmonic workspaces.
pub struct GeomEvaluator<'a, T: Real> {
    placement: &'a Placement<T>,
    ev: ShEvaluator<T>,
}

impl<'a, T: Real> GeomEvaluator<'a, T> {
    pub fn new(placement: &'a Placement<T>) -> Self {
        Self { placement, ev: ShEvaluator::new(placement.shape.l_max()) }
    }

    pub fn eval(&mut self, s: V3<T>) -> PointGeom<T> {
        let p = self.placement;
        let (x0, dx0) = match &p.shape {
            Shape::Sphere { radius } => {
                let r = *radius;
                let mut m = [[T::zero(); 3]; 3];
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] = r;
                }
                (vec3::scale(r, s), m)
            }
            Shape::Ellipsoid { semi_axes: a } => {
                let mut m = [[T::zero(); 3]; 3];
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] = a[i];
                }
                ([a[0] * s[0], a[1] * s[1], a[2] * s[2]], m)
            }
            Shape::PerturbedSphere { .. } => {
                let (rho, g) = p.shape.radial(&mut self.ev, s);
                let mut m = [[T::zero(); 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        m[i][j] = s[i] * g[j];
                    }
                    m[i][i] = m[i][i] + rho;
                }
                (vec3::scale(rho, s), m)
            }
        };
        let x = vec3::add(p.center, vec3::matvec(&p.rotation, x0));
        let dx = vec3::matmul3(&p.rotation, &dx0);
        let (t1, t2) = tangent_frame(s);
        let n = vec3::cross(vec3::matvec(&dx, t1), vec3::matvec(&dx, t2));
        let jac = vec3::norm(n);
        PointGeom { x, dx, normal: vec3::scale(T::one() / jac, n), jac }
    }
}

impl<T: Real> Placement<T> {
    pub fn new(shape: Shape<T>, center: V3<T>) -> Self {
        Self { shape, center, rotation: vec3::identity3() }
    }

    /// Distance from the placement center to the surface along direction `d`.
    pub fn radial_extent(&self, d: V3<T>) -> T {
        let local = vec3::matvec_t(&self.rotation, vec3::normalize(d));
        self.shape.radial_extent(local)
    }

    /// Signed depth of `x`: positive inside, negative outside, measured along the ray from the center.
    pub fn depth(&self, x: V3<T>) -> T {
        let r = vec3::sub(x, self.center);
        let dist = vec3::norm(r);
        if dist == T::zero() {
            return self.radial_extent([T::zero(), T::zero(), T::one()]);
        }
        self.radial_extent(r) - dist
    }

    /// True for a sphere centered at the origin (up to `tol`).
    pub fn is_centered_sphere(&self, tol: T) -> Option<T> {
        match self.shape {
            Shape::Sphere { radius } if vec3::norm(self.center) <= tol => Some(radius),
            _ => None,
        }
    }
}

/// Checks that `q` is a proper rotation.
pub fn check_rotation<T: Real>(q: &[[T; 3]; 3]) -> Result<(), Error> {
    let qtq = vec3::matmul3(&vec3::transpose3(q), q);
    let mut dev = T::zero();
    for (i, row) in qtq.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let e = if i == j { T::one() } else { T::zero() };
            dev = dev.max((*v - e).abs());
        }
    }
    let det = vec3::dot(q[0], vec3::cross(q[1], q[2]));
    let tol = lit::<T>(1e-12).max(T::EPS * lit(64.0));
    if dev > tol || (det - T::one()).abs() > tol {
        return Err(Error::InvalidGeometry(format!(
            "matrix is not a proper rotation (orthogonality defect {dev:e}, determinant {det})"
        )));
    }
    Ok(())
}
