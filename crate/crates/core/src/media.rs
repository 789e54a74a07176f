//! Material parameters, derived wave numbers and scene definitions.

use num_complex::Complex;

use crate::error::Error;
use crate::geometry::{min_separation, Placement, Surface};
use crate::scalar::{lit, sqrt_upper, Real};

/// Permittivity, permeability and conductivity of one layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Medium<T> {
    pub epsilon: T,
    pub mu: T,
    pub sigma: T,
}

/// Physical description of the two layers at a fixed frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediumParams<T> {
    pub omega: T,
    pub outer: Medium<T>,
    pub inner: Medium<T>,
}

/// Wave numbers and transmission coefficients used by the solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveNumbers<T> {
    pub k0: T,
    pub k1: Complex<T>,
    pub lambda_e: Complex<T>,
    pub lambda_h: Complex<T>,
}

impl<T: Real> WaveNumbers<T> {
    /// `k0` as a complex number.
    pub fn k0c(&self) -> Complex<T> {
        Complex::new(self.k0, T::zero())
    }

    /// Validates directly specified coefficients.
    pub fn direct(
        k0: T,
        k1: Complex<T>,
        lambda_e: Complex<T>,
        lambda_h: Complex<T>,
    ) -> Result<Self, Error> {
        let w = Self { k0, k1, lambda_e, lambda_h };
        w.check()?;
        Ok(w)
    }

    pub fn check(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::InvalidMedium(m));
        if !(self.k0 > T::zero()) || !self.k0.is_finite() {
            return bad(format!("k0 must be real and positive, got {}", self.k0));
        }
        if !(self.k1.re > T::zero()) || self.k1.im < T::zero() || !self.k1.norm().is_finite() {
            return bad(format!("k1 needs Re k1 > 0 and Im k1 >= 0, got {}", self.k1));
        }
        if self.lambda_e.norm() == T::zero() || self.lambda_h.norm() == T::zero() {
            return bad("transmission coefficients must be nonzero".into());
        }
        let prod = self.lambda_e * self.lambda_h;
        let target = self.k0c() / self.k1;
        if (prod - target).norm() > lit::<T>(1e-10).max(T::EPS * lit(100.0)) * target.norm() {
            return bad(format!(
                "coefficients violate lambda_E * lambda_H = k0 / k1 ({prod} vs {target})"
            ));
        }
        Ok(())
    }

    /// Homogeneous background: `k1 = k0` and unit transmission coefficients.
    pub fn homogeneous(k0: T) -> Self {
        let one = Complex::new(T::one(), T::zero());
        Self { k0, k1: Complex::new(k0, T::zero()), lambda_e: one, lambda_h: one }
    }
}

/// Derives wave numbers and transmission coefficients from material parameters.
pub fn derive_wavenumbers<T: Real>(p: &MediumParams<T>) -> Result<WaveNumbers<T>, Error> {
    let bad = |m: &str| Err(Error::InvalidMedium(m.to_string()));
    let finite = [p.omega, p.outer.epsilon, p.outer.mu, p.outer.sigma, p.inner.epsilon, p.inner.mu, p.inner.sigma];
    if finite.iter().any(|v| !v.is_finite()) {
        return bad("material parameters must be finite");
    }
    if !(p.omega > T::zero()) {
        return bad("frequency must be positive");
    }
    if !(p.outer.epsilon > T::zero()) || !(p.outer.mu > T::zero()) {
        return bad("outer permittivity and permeability must be positive");
    }
    if p.outer.sigma != T::zero() {
        return bad("outer layer must be lossless");
    }
    if !(p.inner.mu > T::zero()) {
        return bad("inner permeability must be positive");
    }
    if p.inner.sigma < T::zero() || p.inner.epsilon < T::zero() {
        return bad("inner permittivity and conductivity must be non-negative");
    }
    let eps1 = Complex::new(p.inner.epsilon, p.inner.sigma / p.omega);
    if eps1.norm() == T::zero() {
        return bad("complex inner permittivity vanishes");
    }
    let k0 = p.omega * (p.outer.epsilon * p.outer.mu).sqrt();
    let k1 = sqrt_upper(eps1 * p.inner.mu) * p.omega;
    let lambda_e = sqrt_upper(Complex::new(p.outer.epsilon, T::zero()) / eps1);
    let lambda_h = Complex::new((p.outer.mu / p.inner.mu).sqrt(), T::zero());
    let w = WaveNumbers { k0, k1, lambda_e, lambda_h };
    w.check()?;
    Ok(w)
}

/// Split of the obstacle into the conducting part `Γ₁` and the impedance part `Γ₂`.
///
/// A node of the obstacle grid belongs to `Γ₁` when the polar angle of its
/// parameter is below `pec_cap`; `π` gives a fully conducting obstacle and `0`
/// a fully impedance one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partition<T> {
    pub pec_cap: T,
    /// Impedance `λ > 0` on `Γ₂`.
    pub impedance: T,
}

impl<T: Real> Partition<T> {
    pub fn all_pec() -> Self {
        Self { pec_cap: T::PI(), impedance: T::one() }
    }

    pub fn all_impedance(impedance: T) -> Self {
        Self { pec_cap: T::zero(), impedance }
    }

    pub fn cap(pec_cap: T, impedance: T) -> Self {
        Self { pec_cap, impedance }
    }

    pub fn check(&self) -> Result<(), Error> {
        if !(self.pec_cap >= T::zero() && self.pec_cap <= T::PI()) {
            return Err(Error::InvalidPartition(format!(
                "cap angle {} outside [0, pi]",
                self.pec_cap
            )));
        }
        if !self.is_all_pec() && !(self.impedance > T::zero() && self.impedance.is_finite()) {
            return Err(Error::InvalidPartition("impedance must be positive".into()));
        }
        Ok(())
    }

    pub fn is_all_pec(&self) -> bool {
        self.pec_cap >= T::PI()
    }

    pub fn is_all_impedance(&self) -> bool {
        self.pec_cap <= T::zero()
    }

    /// Whether the obstacle point with parameter `s` belongs to `Γ₁`.
    pub fn is_pec_at(&self, s: crate::vec3::V3<T>) -> bool {
        let theta = s[2].max(-T::one()).min(T::one()).acos();
        self.is_all_pec() || (!self.is_all_impedance() && theta < self.pec_cap)
    }

    /// Indices of the conducting and impedance nodes of the obstacle grid.
    pub fn split(&self, obstacle: &Surface<T>) -> (Vec<usize>, Vec<usize>) {
        let mut g1 = Vec::new();
        let mut g2 = Vec::new();
        for n in 0..obstacle.len() {
            if self.is_pec_at(obstacle.params[n]) {
                g1.push(n);
            } else {
                g2.push(n);
            }
        }
        (g1, g2)
    }
}

/// Complete description of a scattering configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene<T> {
    /// Interface `S₀` between the outer layer and the inner layer.
    pub interface: Placement<T>,
    /// Obstacle boundary `S₁`.
    pub obstacle: Placement<T>,
    pub media: WaveNumbers<T>,
    pub partition: Partition<T>,
    /// Quadrature order (Gauss nodes in the polar direction).
    pub order: usize,
}

/// A scene with its surfaces discretized.
#[derive(Clone, Debug)]
pub struct DiscreteScene<T: Real> {
    pub scene: Scene<T>,
    pub s0: Surface<T>,
    pub s1: Surface<T>,
    pub gamma1: Vec<usize>,
    pub gamma2: Vec<usize>,
}

impl<T: Real> Scene<T> {
    /// Same scene at another quadrature order.
    pub fn with_order(&self, order: usize) -> Self {
        Self { order, ..self.clone() }
    }

    /// Builds the surfaces and checks the scene.
    pub fn discretize(&self) -> Result<DiscreteScene<T>, Error> {
        self.media.check()?;
        self.partition.check()?;
        let s0 = Surface::new(self.interface.clone(), self.order)?;
        let s1 = Surface::new(self.obstacle.clone(), self.order)?;
        let mut problems = Vec::new();
        let outside = s1.points.iter().filter(|x| !(s0.depth(**x) > T::zero())).count();
        if outside > 0 {
            problems.push(format!("{outside} obstacle nodes are not inside the interface"));
        }
        let sep = min_separation(&s0, &s1);
        if !(sep > T::zero()) {
            problems.push("interface and obstacle touch".to_string());
        }
        if !problems.is_empty() {
            return Err(Error::SceneValidation(problems));
        }
        let (gamma1, gamma2) = self.partition.split(&s1);
        Ok(DiscreteScene { scene: self.clone(), s0, s1, gamma1, gamma2 })
    }
}

/// Validates a scene, reporting every violated condition.
pub fn validate_scene<T: Real>(scene: &Scene<T>) -> Result<(), Error> {
    let mut problems = Vec::new();
    for (name, pl) in [("interface", &scene.interface), ("obstacle", &scene.obstacle)] {
        if let Err(e) = pl.shape.validate() {
            problems.push(format!("{name}: {e}"));
        }
    }
    if let Err(e) = scene.media.check() {
        problems.push(e.to_string());
    }
    if let Err(e) = scene.partition.check() {
        problems.push(e.to_string());
    }
    if scene.order < crate::geometry::MIN_ORDER {
        problems.push(format!("quadrature order {} below {}", scene.order, crate::geometry::MIN_ORDER));
    }
    if problems.is_empty() {
        match scene.discretize() {
            Ok(_) => {}
            Err(Error::SceneValidation(p)) => problems.extend(p),
            Err(e) => problems.push(e.to_string()),
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::SceneValidation(problems))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;

    fn params(sigma1: f64, mu1: f64) -> MediumParams<f64> {
        MediumParams {
            omega: 1.0,
            outer: Medium { epsilon: 1.0, mu: 1.0, sigma: 0.0 },
            inner: Medium { epsilon: 4.0, mu: mu1, sigma: sigma1 },
        }
    }

    #[test]
    fn lossless_layer_coefficients() {
        let w = derive_wavenumbers(&params(0.0, 1.0)).unwrap();
        assert!((w.k0 - 1.0).abs() < 1e-15);
        assert!((w.k1 - Complex::new(2.0, 0.0)).norm() < 1e-15);
        assert!((w.lambda_e - Complex::new(0.5, 0.0)).norm() < 1e-15);
        assert!((w.lambda_h - Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lossy_branch() {
        let w = derive_wavenumbers(&params(1.0, 1.0)).unwrap();
        assert!(w.k1.re > 0.0 && w.k1.im > 0.0);
        let prod = w.lambda_e * w.lambda_h;
        assert!((prod - Complex::new(w.k0, 0.0) / w.k1).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_media() {
        assert!(derive_wavenumbers(&params(0.0, 0.0)).is_err());
        let mut p = params(0.0, 1.0);
        p.omega = 0.0;
        assert!(derive_wavenumbers(&p).is_err());
        let mut p = params(0.0, 1.0);
        p.inner.epsilon = 0.0;
        assert!(matches!(derive_wavenumbers(&p), Err(Error::InvalidMedium(_))));
        assert!(WaveNumbers::direct(1.0, Complex::new(2.0, 0.0), Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn scene_validation_reports_all_problems() {
        let scene = Scene {
            interface: Placement::new(Shape::Sphere { radius: 1.0 }, [0.0; 3]),
            obstacle: Placement::new(Shape::Sphere { radius: 1.5 }, [0.0; 3]),
            media: WaveNumbers::homogeneous(1.0),
            partition: Partition::cap(4.0, 1.0),
            order: 8,
        };
        match validate_scene(&scene) {
            Err(Error::SceneValidation(p)) => assert!(!p.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
        let scene = Scene { partition: Partition::all_pec(), ..scene };
        match validate_scene(&scene) {
            Err(Error::SceneValidation(p)) => assert!(p[0].contains("not inside")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn partition_extremes() {
        let s = Surface::new(Placement::new(Shape::Sphere { radius: 1.0 }, [0.0; 3]), 8).unwrap();
        let (a, b) = Partition::<f64>::all_pec().split(&s);
        assert_eq!((a.len(), b.len()), (s.len(), 0));
        let (a, b) = Partition::all_impedance(1.0).split(&s);
        assert_eq!((a.len(), b.len()), (0, s.len()));
        let (a, b) = Partition::cap(std::f64::consts::FRAC_PI_2, 1.0).split(&s);
        assert_eq!(a.len(), b.len());
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort();
        assert_eq!(all, (0..s.len()).collect::<Vec<_>>());
    }
}
