//! Scene files.
//!
//! ```toml
//! order = 16
//!
//! [media]              # or kind = "physical" with omega, [media.outer], [media.inner]
//! kind = "direct"
//! k0 = 1.0
//! k1 = [2.0, 0.0]      # complex numbers are [re, im] or a plain real
//! lambda_e = 0.5
//! lambda_h = 1.0
//!
//! [interface]
//! kind = "sphere"      # sphere | ellipsoid | perturbed_sphere
//! radius = 2.0
//! center = [0.0, 0.0, 0.0]
//!
//! [obstacle]
//! kind = "ellipsoid"
//! semi_axes = [1.0, 0.8, 0.9]
//!
//! [boundary]
//! kind = "cap"         # pec | impedance | cap
//! polar_angle = 1.2
//! lambda = 1.0
//! ```

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::geometry::{check_rotation, Placement, Shape};
use crate::media::{derive_wavenumbers, Medium, MediumParams, Partition, Scene, WaveNumbers};
use crate::vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexDto {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexDto {
    fn value(self) -> C {
        match self {
            ComplexDto::Real(x) => C::new(x, 0.0),
            ComplexDto::Pair([a, b]) => C::new(a, b),
        }
    }

    fn from(z: C) -> Self {
        ComplexDto::Pair([z.re, z.im])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuterMedium {
    pub epsilon: f64,
    pub mu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerMedium {
    pub epsilon: f64,
    pub mu: f64,
    #[serde(default)]
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MediaDto {
    Direct { k0: f64, k1: ComplexDto, lambda_e: ComplexDto, lambda_h: ComplexDto },
    Physical { omega: f64, outer: OuterMedium, inner: InnerMedium },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDto {
    #[serde(flatten)]
    pub shape: Shape<f64>,
    #[serde(default)]
    pub center: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[[f64; 3]; 3]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryDto {
    Pec,
    Impedance { lambda: f64 },
    /// Conducting where the polar parameter angle is below `polar_angle`.
    Cap { polar_angle: f64, lambda: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub order: usize,
    pub media: MediaDto,
    pub interface: SurfaceDto,
    pub obstacle: SurfaceDto,
    pub boundary: BoundaryDto,
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &std::path::Path) -> Result<Self, Error> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scene files always serialize")
    }

    pub fn from_scene(scene: &Scene<f64>) -> Self {
        let m = &scene.media;
        let surf = |p: &Placement<f64>| SurfaceDto {
            shape: p.shape.clone(),
            center: p.center,
            rotation: if p.rotation == vec3::identity3() { None } else { Some(p.rotation) },
        };
        let part = &scene.partition;
        let boundary = if part.is_all_pec() {
            BoundaryDto::Pec
        } else if part.is_all_impedance() {
            BoundaryDto::Impedance { lambda: part.impedance }
        } else {
            BoundaryDto::Cap { polar_angle: part.pec_cap, lambda: part.impedance }
        };
        SceneFile {
            order: scene.order,
            media: MediaDto::Direct {
                k0: m.k0,
                k1: ComplexDto::from(m.k1),
                lambda_e: ComplexDto::from(m.lambda_e),
                lambda_h: ComplexDto::from(m.lambda_h),
            },
            interface: surf(&scene.interface),
            obstacle: surf(&scene.obstacle),
            boundary,
        }
    }

    /// Builds the scene; structural checks only, nesting is verified on discretization.
    pub fn to_scene(&self) -> Result<Scene<f64>, Error> {
        let media = match self.media {
            MediaDto::Direct { k0, k1, lambda_e, lambda_h } => {
                WaveNumbers::direct(k0, k1.value(), lambda_e.value(), lambda_h.value())?
            }
            MediaDto::Physical { omega, outer, inner } => derive_wavenumbers(&MediumParams {
                omega,
                outer: Medium { epsilon: outer.epsilon, mu: outer.mu, sigma: 0.0 },
                inner: Medium { epsilon: inner.epsilon, mu: inner.mu, sigma: inner.sigma },
            })?,
        };
        let place = |s: &SurfaceDto| -> Result<Placement<f64>, Error> {
            s.shape.validate()?;
            let mut p = Placement::new(s.shape.clone(), s.center);
            if let Some(r) = s.rotation {
                check_rotation(&r)?;
                p.rotation = r;
            }
            Ok(p)
        };
        let partition = match self.boundary {
            BoundaryDto::Pec => Partition::all_pec(),
            BoundaryDto::Impedance { lambda } => Partition::all_impedance(lambda),
            BoundaryDto::Cap { polar_angle, lambda } => Partition::cap(polar_angle, lambda),
        };
        partition.check()?;
        Ok(Scene {
            interface: place(&self.interface)?,
            obstacle: place(&self.obstacle)?,
            media,
            partition,
            order: self.order,
        })
    }
}

/// Reads and builds a scene file.
pub fn load_scene(path: &std::path::Path) -> Result<Scene<f64>, Error> {
    SceneFile::read(path)?.to_scene()
}

/// Short content hash of a scene in its canonical direct-wavenumber form.
pub fn scene_hash(scene: &Scene<f64>) -> String {
    let text = SceneFile::from_scene(scene).to_toml();
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAYERED: &str = r#"
order = 12

[media]
kind = "direct"
k0 = 1.0
k1 = [2.0, 0.0]
lambda_e = 0.5
lambda_h = 1.0

[interface]
kind = "sphere"
radius = 2.0

[obstacle]
kind = "ellipsoid"
semi_axes = [1.0, 0.8, 0.9]
center = [0.1, 0.0, 0.0]

[boundary]
kind = "cap"
polar_angle = 1.2
lambda = 0.5
"#;

    #[test]
    fn parses_and_round_trips() {
        let f = SceneFile::parse(LAYERED).unwrap();
        let scene = f.to_scene().unwrap();
        assert_eq!(scene.order, 12);
        assert_eq!(scene.obstacle.center, [0.1, 0.0, 0.0]);
        assert_eq!(scene.partition, Partition::cap(1.2, 0.5));
        let again = SceneFile::parse(&SceneFile::from_scene(&scene).to_toml()).unwrap().to_scene().unwrap();
        assert_eq!(again, scene);
        assert_eq!(scene_hash(&again), scene_hash(&scene));
    }

    #[test]
    fn physical_media_match_direct_form() {
        let text = LAYERED.replace(
            "kind = \"direct\"\nk0 = 1.0\nk1 = [2.0, 0.0]\nlambda_e = 0.5\nlambda_h = 1.0",
            "kind = \"physical\"\nomega = 1.0\nouter = { epsilon = 1.0, mu = 1.0 }\ninner = { epsilon = 4.0, mu = 1.0 }",
        );
        let a = SceneFile::parse(&text).unwrap().to_scene().unwrap();
        let b = SceneFile::parse(LAYERED).unwrap().to_scene().unwrap();
        assert!((a.media.k1 - b.media.k1).norm() < 1e-15);
        assert!((a.media.lambda_e - b.media.lambda_e).norm() < 1e-15);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(SceneFile::parse(&LAYERED.replace("order = 12", "order = 12\ncolour = 3")), Err(Error::Parse(_))));
        assert!(SceneFile::parse(&LAYERED.replace("radius = 2.0", "radius = 2.0\nwobble = 1")).is_err());
        assert!(SceneFile::parse(&LAYERED.replace("lambda_h = 1.0", "lambda_h = 3.0")).unwrap().to_scene().is_err());
        assert!(SceneFile::parse("order = ").is_err());
    }

    #[test]
    fn hash_distinguishes_scenes() {
        let a = SceneFile::parse(LAYERED).unwrap().to_scene().unwrap();
        let b = a.with_order(16);
        assert_ne!(scene_hash(&a), scene_hash(&b));
        assert_eq!(scene_hash(&a).len(), 16);
    }
}
