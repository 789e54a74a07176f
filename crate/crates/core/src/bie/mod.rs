//! The coupled boundary integral system for the layered scattering problem.
//!
//! Unknowns are the interface densities `a`, `b`, the conducting density `c` on `Γ₁`,
//! and the impedance densities `d`, `ψ` on `Γ₂`. The fields are
//!
//! ```text
//! E = (λ_H k₀/k₁) curl ∫a Φ₀ + λ_E curl curl ∫b Φ₀                     in Ω₀
//! F = curl ∫a Φ₁ + curl curl ∫b Φ₁ + curl ∫c Φ₁ + (i/k₁²) curl curl ∫(ν×Ŝ²c) Φ₁
//!   + ∫d Φ₁ + iλ curl ∫(ν×Ŝ²d) Φ₁ + ∇∫ψ Φ₁ + iλ ∫νψ Φ₁                  in Ω₁
//! ```

mod layout;
mod rows;
mod solution;
mod system;

pub use layout::{Group, Layout};
pub use solution::{
    solve_direct, BoundaryResiduals, DensitySet, EnergyFlux, LayerField, Region, Solution, SolveDiagnostics,
};
pub use system::{Assembly, AssemblyInfo, Discretization, Options};
