//! Tolerance manifest.
//!
//! Every numerical threshold used by the verification harness and the
//! acceptance suite lives here, so a reviewer can audit them in one place.

/// Far-field agreement with the analytic series, order 24.
pub const MIE_FARFIELD: f64 = 1e-3;

/// Wall-clock budget in seconds for one order-24 solve of the homogeneous-limit scene.
pub const SOLVE_SECONDS: f64 = 60.0;

/// Mixed reciprocity residual at order 24.
pub const RECIPROCITY: f64 = 1e-4;

/// Minimum residual reduction from order 12 to order 24.
pub const RECIPROCITY_DECREASE: f64 = 4.0;

/// Density norm produced by vanishing boundary data.
pub const ZERO_TRACE_DENSITY: f64 = 1e-10;

/// One-sided bound on the normalized energy functional of the exterior field.
pub const ENERGY_SIGN: f64 = 1e-8;

/// Admissible band for `e(2r)/e(r)` in the radiation check.
pub const RADIATION_RATIO: (f64, f64) = (0.3, 0.7);

/// Radial component of the far-field pattern relative to its size.
pub const FARFIELD_TANGENTIAL: f64 = 1e-10;

/// Rotation equivariance of the boundary-integral far field.
pub const EQUIVARIANCE_BIE: f64 = 1e-4;

/// Rotation equivariance of the analytic series.
pub const EQUIVARIANCE_ORACLE: f64 = 1e-10;

/// Ratio between the discrimination distance and the reciprocity floor.
pub const DISCRIMINATION_FACTOR: f64 = 10.0;

/// `Ŝ 1 = 2` on the unit sphere.
pub const SHAT_CONSTANT: f64 = 1e-8;

/// `R ∘ R = -I` on tangential fields.
pub const ROTATION_SQUARE: f64 = 1e-12;

/// First transmission block vanishes for identical layers.
pub const MATCHED_LAYER_BLOCK: f64 = 1e-12;

/// Jump of the magnetic potential across a sphere, order 24.
pub const JUMP_RELATION: f64 = 1e-4;

/// Transmission residual at points off the quadrature grid, relative to the data.
pub const TRANSMISSION_RESIDUAL: f64 = 1e-4;

/// Homogeneous layer against an independent single-surface solve.
pub const SINGLE_SURFACE: f64 = 1e-6;

/// Analytic series: relative size of the last retained terms.
pub const SERIES_TAIL: f64 = 1e-12;

/// Condition estimate above which a near-resonance warning is attached to the solve.
pub const CONDITION_WARNING: f64 = 1e12;

/// Condition estimate above which the system is declared singular.
pub const MAX_CONDITION: f64 = 1e14;

/// Minimal distance of evaluation points and sources from a surface, in local mesh spacings
/// of the evaluation grid.
pub const SOURCE_MIN_SPACINGS: f64 = 3.0;
