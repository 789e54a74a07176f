//! Special functions: quadrature rules, spherical harmonics, spherical Bessel functions.

pub mod bessel;
pub mod gauss;
pub mod harmonics;

pub use bessel::{riccati_derivative, spherical_hn1, spherical_jn};
pub use gauss::gauss_legendre;
pub use harmonics::{sh_count, sh_degree_order, sh_index, ShEvaluator};
