//! Layer potentials and boundary operators on parametrized surfaces.
//!
//! Weakly singular surface integrals are computed with a polar product rule
//! centered at the target, with the density bases evaluated at the rotated nodes.
//! Hypersingular parts are avoided by writing `curl curl = k² + ∇ Div` with the
//! divergence taken spectrally on the density.

pub mod bank;
pub mod evaluate;
pub mod grid;
pub mod laplace;
pub mod operators;

pub use bank::{banks, Bank};
pub use evaluate::{DensitySource, FarIntegrals, ScalPotentials, TanPotentials};
pub use grid::{PolarRule, Scratch, SourceGrid, SurfaceSource};
pub use laplace::shat_matrix;
pub use operators::{apply3, cross_matrix, p_matrix, r_matrix, M3};

#[cfg(test)]
mod tests;
