//! Verification harness: identity checks, far-field patterns, scene files and reports.

pub mod checks;
pub mod pattern;
pub mod report;
pub mod scene_file;
pub mod suite;

pub use pattern::{farfield_distance, DirectionGrid, FarFieldPattern, PatternMeta};
pub use report::{CheckResult, Criterion, VerificationReport};
pub use scene_file::{load_scene, scene_hash, SceneFile};
pub use suite::{convergence_table, run_checks, CheckKind, ConvergenceRow};
