pub mod bie;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod media;
pub mod mie;
pub mod potentials;
pub mod scalar;
pub mod special;
pub mod tolerances;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instantiations.
pub type Scene64 = media::Scene<f64>;
pub type WaveNumbers64 = media::WaveNumbers<f64>;
pub type Partition64 = media::Partition<f64>;
pub type Placement64 = geometry::Placement<f64>;
pub type Shape64 = geometry::Shape<f64>;
pub type Incident64 = fields::Incident<f64>;
pub type Assembly64 = bie::Assembly<f64>;
pub type Solution64 = bie::Solution<f64>;
pub type MieScene64 = mie::MieScene<f64>;
