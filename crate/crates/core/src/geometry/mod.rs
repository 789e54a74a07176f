//! Surfaces, quadrature grids and spectral density spaces.

pub mod shape;
pub mod spectral;
pub mod surface;

pub use shape::{check_rotation, tangent_frame, GeomEvaluator, Mode, Placement, PointGeom, Shape};
pub use spectral::{
    degree_for_order, divergence_map, surface_divergence, tangential_count, SpectralSpace,
};
pub use surface::{eval_order, min_separation, rotate_surface, Surface, MIN_ORDER};

use crate::scalar::Real;
use crate::vec3::V3;

/// Rotation `R_z(φ) R_y(θ)` taking the north pole to the unit vector `s`.
pub fn pole_rotation<T: Real>(s: V3<T>) -> [[T; 3]; 3] {
    let rho = (s[0] * s[0] + s[1] * s[1]).sqrt();
    let (cp, sp) = if rho > T::zero() { (s[0] / rho, s[1] / rho) } else { (T::one(), T::zero()) };
    let (ct, st) = (s[2], rho);
    [
        [cp * ct, -sp, cp * st],
        [sp * ct, cp, sp * st],
        [-st, T::zero(), ct],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3;

    #[test]
    fn pole_rotation_maps_north_pole() {
        let s = vec3::normalize([0.3f64, -0.4, -0.2]);
        let r = pole_rotation(s);
        let p = vec3::matvec(&r, [0.0, 0.0, 1.0]);
        assert!(vec3::norm(vec3::sub(p, s)) < 1e-15);
        assert!(check_rotation(&r).is_ok());
    }
}
