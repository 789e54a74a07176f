//! Fundamental solutions, incident fields and boundary data.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::media::{DiscreteScene, WaveNumbers};
use crate::scalar::{lit, Real};
use crate::vec3::{self, C3, V3};

/// `Φ_k(r) = e^{ikr} / (4π r)` together with `g` such that `∇_x Φ = g (x - y)`.
#[inline]
pub fn phi_g<T: Real>(k: Complex<T>, r: T) -> (Complex<T>, Complex<T>) {
    let four_pi_r = lit::<T>(4.0) * T::PI() * r;
    let ikr = Complex::new(-k.im * r, k.re * r);
    let e = ikr.exp() / four_pi_r;
    let g = e * (ikr - T::one()) / (r * r);
    (e, g)
}

/// Like [`phi_g`], also returning `h` with `Hess_x Φ = g I + h (x-y)(x-y)ᵀ`.
#[inline]
pub fn phi_g_h<T: Real>(k: Complex<T>, r: T) -> (Complex<T>, Complex<T>, Complex<T>) {
    let (e, g) = phi_g(k, r);
    let ikr = Complex::new(-k.im * r, k.re * r);
    let r2 = r * r;
    let h = e * (Complex::new(lit(3.0), T::zero()) - ikr * lit::<T>(3.0) + ikr * ikr) / (r2 * r2);
    (e, g, h)
}

/// Fundamental solution of the Helmholtz equation.
pub fn phi<T: Real>(k: Complex<T>, x: V3<T>, y: V3<T>) -> Complex<T> {
    phi_g(k, vec3::norm(vec3::sub(x, y))).0
}

/// Gradient of `Φ_k(x, y)` with respect to `x`.
pub fn grad_phi<T: Real>(k: Complex<T>, x: V3<T>, y: V3<T>) -> C3<T> {
    let d = vec3::sub(x, y);
    let (_, g) = phi_g(k, vec3::norm(d));
    vec3::rscale(g, d)
}

/// Hessian of `Φ_k(x, y)` with respect to `x`.
pub fn hess_phi<T: Real>(k: Complex<T>, x: V3<T>, y: V3<T>) -> [C3<T>; 3] {
    let d = vec3::sub(x, y);
    let (_, g, h) = phi_g_h(k, vec3::norm(d));
    let mut m = [vec3::czero(); 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = h * (d[i] * d[j]);
        }
        m[i][i] = m[i][i] + g;
    }
    m
}

/// Region containing a dipole source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    /// Exterior `Ω₀`.
    Outer,
    /// Layer `Ω₁` between interface and obstacle.
    Inner,
}

/// Incident wave driving the problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Incident<T> {
    /// `E = i k₀ (d × q) × d e^{ik₀ x·d}`, `H = i k₀ d × q e^{ik₀ x·d}`.
    PlaneWave { direction: V3<T>, polarization: V3<T> },
    /// `E = (i/k) curl curl (p Φ_k(·, z))`, `H = curl (p Φ_k(·, z))` with `k` of the source layer.
    Dipole { position: V3<T>, moment: V3<T>, layer: Layer },
}

/// Incident electric and magnetic field at one point.
#[derive(Clone, Copy, Debug)]
pub struct FieldPair<T> {
    pub e: C3<T>,
    pub h: C3<T>,
}

impl<T: Real> Incident<T> {
    /// Plane wave with validated direction and polarization.
    pub fn plane_wave(direction: V3<T>, polarization: V3<T>) -> Result<Self, Error> {
        let tol = lit::<T>(1e-12).max(T::EPS * lit(16.0));
        if (vec3::norm(direction) - T::one()).abs() > tol {
            return Err(Error::InvalidIncident("direction must be a unit vector".into()));
        }
        let qn = vec3::norm(polarization);
        if !(qn > T::zero()) || vec3::norm(vec3::cross(direction, polarization)) <= tol * qn {
            return Err(Error::InvalidIncident("polarization is parallel to the direction".into()));
        }
        Ok(Incident::PlaneWave { direction, polarization })
    }

    pub fn dipole(position: V3<T>, moment: V3<T>, layer: Layer) -> Result<Self, Error> {
        if !(vec3::norm(moment) > T::zero()) {
            return Err(Error::InvalidIncident("dipole moment must be nonzero".into()));
        }
        Ok(Incident::Dipole { position, moment, layer })
    }

    /// True for a dipole inside the layer.
    pub fn is_inner(&self) -> bool {
        matches!(self, Incident::Dipole { layer: Layer::Inner, .. })
    }

    /// Wave number of the medium carrying the incident field.
    pub fn wavenumber(&self, media: &WaveNumbers<T>) -> Complex<T> {
        match self {
            Incident::Dipole { layer: Layer::Inner, .. } => media.k1,
            _ => media.k0c(),
        }
    }

    pub fn eval(&self, media: &WaveNumbers<T>, x: V3<T>) -> FieldPair<T> {
        match *self {
            Incident::PlaneWave { direction: d, polarization: q } => {
                let k = media.k0;
                let ik = Complex::new(T::zero(), k);
                let phase = (ik * vec3::dot(x, d)).exp();
                let h = vec3::cross(d, q);
                let e = vec3::cross(h, d);
                FieldPair { e: vec3::rscale(ik * phase, e), h: vec3::rscale(ik * phase, h) }
            }
            Incident::Dipole { position, moment, .. } => {
                let k = self.wavenumber(media);
                let dvec = vec3::sub(x, position);
                let (e0, g, h) = phi_g_h(k, vec3::norm(dvec));
                let dp = vec3::dot(dvec, moment);
                let mut ev = vec3::czero();
                for i in 0..3 {
                    ev[i] = (k * k * e0 + g) * moment[i] + h * (dvec[i] * dp);
                }
                let ev = vec3::cscale(Complex::<T>::i() / k, ev);
                let hv = vec3::crcross(vec3::rscale(g, dvec), moment);
                FieldPair { e: ev, h: hv }
            }
        }
    }
}

/// Boundary data `T₁, T₂` on the interface and `T₃, T₄` on the obstacle.
#[derive(Clone, Debug)]
pub struct TraceData<T> {
    pub t1: Vec<C3<T>>,
    pub t2: Vec<C3<T>>,
    pub t3: Vec<C3<T>>,
    pub t4: Vec<C3<T>>,
}

/// Checks that a dipole lies in its declared layer and away from both surfaces.
pub fn check_source<T: Real>(incident: &Incident<T>, disc: &DiscreteScene<T>, min_spacings: T) -> Result<(), Error> {
    if let Incident::Dipole { position, layer, .. } = incident {
        let in0 = disc.s0.depth(*position) > T::zero();
        let in1 = disc.s1.depth(*position) > T::zero();
        match layer {
            Layer::Outer if in0 => {
                return Err(Error::WrongRegion("outer dipole lies inside the interface".into()))
            }
            Layer::Inner if !in0 || in1 => {
                return Err(Error::WrongRegion("inner dipole must lie between interface and obstacle".into()))
            }
            _ => {}
        }
        for (name, s) in [("interface", &disc.s0), ("obstacle", &disc.s1)] {
            let fine = s.evaluation_grid()?;
            let (d, h) = fine.proximity(*position);
            if d < min_spacings * h {
                return Err(Error::NearSurface {
                    surface: name,
                    distance: d.to_f64().unwrap_or(0.0),
                    required: (min_spacings * h).to_f64().unwrap_or(0.0),
                });
            }
        }
    }
    Ok(())
}

/// `(T₁, T₂)` at an interface point with normal `nu`.
pub fn interface_traces_at<T: Real>(incident: &Incident<T>, media: &WaveNumbers<T>, x: V3<T>, nu: V3<T>) -> (C3<T>, C3<T>) {
    let f = incident.eval(media, x);
    let (ne, nh) = (vec3::rccross(nu, f.e), vec3::rccross(nu, f.h));
    if incident.is_inner() {
        (vec3::cscale(media.lambda_e, ne), vec3::cscale(media.lambda_h, nh))
    } else {
        let m = -Complex::new(T::one(), T::zero());
        (vec3::cscale(m, ne), vec3::cscale(m, nh))
    }
}

/// `(T₃, T₄)` at an obstacle point with normal `nu`; both vanish unless the source is in the layer.
pub fn obstacle_traces_at<T: Real>(
    incident: &Incident<T>,
    media: &WaveNumbers<T>,
    lambda: T,
    x: V3<T>,
    nu: V3<T>,
) -> (C3<T>, C3<T>) {
    if !incident.is_inner() {
        return (vec3::czero(), vec3::czero());
    }
    obstacle_traces_of(incident.eval(media, x), media.k1, lambda, nu)
}

/// `T₃ = −ν×E`, `T₄ = (λ/k)(ν×E)×ν − ν×H` for a field `(E, H)` of wave number `k`.
pub fn obstacle_traces_of<T: Real>(f: FieldPair<T>, k: Complex<T>, lambda: T, nu: V3<T>) -> (C3<T>, C3<T>) {
    let ne = vec3::rccross(nu, f.e);
    let nh = vec3::rccross(nu, f.h);
    let ratio = Complex::new(lambda, T::zero()) / k;
    let t3 = vec3::cscale(-Complex::new(T::one(), T::zero()), ne);
    let t4 = vec3::csub(vec3::cscale(ratio, vec3::crcross(ne, nu)), nh);
    (t3, t4)
}

/// Boundary data generated by an incident field on the discretized scene.
pub fn incident_traces<T: Real>(incident: &Incident<T>, disc: &DiscreteScene<T>) -> Result<TraceData<T>, Error> {
    check_source(incident, disc, lit(crate::tolerances::SOURCE_MIN_SPACINGS))?;
    let media = &disc.scene.media;
    let lambda = disc.scene.partition.impedance;
    let mut tr = TraceData {
        t1: Vec::with_capacity(disc.s0.len()),
        t2: Vec::with_capacity(disc.s0.len()),
        t3: Vec::with_capacity(disc.s1.len()),
        t4: Vec::with_capacity(disc.s1.len()),
    };
    for n in 0..disc.s0.len() {
        let (t1, t2) = interface_traces_at(incident, media, disc.s0.points[n], disc.s0.normals[n]);
        tr.t1.push(t1);
        tr.t2.push(t2);
    }
    for n in 0..disc.s1.len() {
        let (t3, t4) = obstacle_traces_at(incident, media, lambda, disc.s1.points[n], disc.s1.normals[n]);
        tr.t3.push(t3);
        tr.t4.push(t4);
    }
    Ok(tr)
}
