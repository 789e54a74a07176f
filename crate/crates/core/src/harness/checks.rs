//! Identity checks on solved scenes.

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bie::{Assembly, Group, Options, Region, Solution};
use crate::error::Error;
use crate::fields::{check_source, Incident, Layer};
use crate::geometry::{degree_for_order, Placement, Shape, SpectralSpace, Surface};
use crate::harness::pattern::{farfield_distance, DirectionGrid, FarFieldPattern, PatternMeta};
use crate::media::Scene;
use crate::mie::MieScene;
use crate::potentials::{r_matrix, shat_matrix, SurfaceSource};
use crate::tolerances;
use crate::vec3::{self, C3, V3};

pub type Rotation = [[f64; 3]; 3];

/// Describes an incident field in the form accepted on the command line.
pub fn describe_incident(inc: &Incident<f64>) -> String {
    let v = |a: V3<f64>| format!("{},{},{}", a[0], a[1], a[2]);
    match *inc {
        Incident::PlaneWave { direction, polarization } => format!("plane:{}:{}", v(direction), v(polarization)),
        Incident::Dipole { position, moment, layer } => {
            let l = if layer == Layer::Outer { "outer" } else { "inner" };
            format!("dipole:{l}:{}:{}", v(position), v(moment))
        }
    }
}

/// Parses `plane:dx,dy,dz:qx,qy,qz` or `dipole:outer|inner:zx,zy,zz:px,py,pz`.
///
/// Plane-wave directions are normalized unless already of unit length.
pub fn parse_incident(spec: &str) -> Result<Incident<f64>, Error> {
    let bad = || Error::Parse(format!("malformed incident {spec:?}; expected plane:d:q or dipole:layer:z:p"));
    let vec = |s: &str| -> Result<V3<f64>, Error> {
        let v: Vec<f64> = s.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        <[f64; 3]>::try_from(v).map_err(|_| bad())
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["plane", d, q] => {
            let d = vec(d)?;
            let d = if (vec3::norm(d) - 1.0).abs() <= 1e-14 { d } else { vec3::normalize(d) };
            Incident::plane_wave(d, vec(q)?)
        }
        ["dipole", layer, z, p] => {
            let layer = match *layer {
                "outer" => Layer::Outer,
                "inner" => Layer::Inner,
                _ => return Err(bad()),
            };
            Incident::dipole(vec(z)?, vec(p)?, layer)
        }
        _ => Err(bad()),
    }
}

/// Far-field pattern of a solution on `grid`.
pub fn solution_pattern(sol: &Solution<f64>, grid: DirectionGrid, meta: PatternMeta) -> Result<FarFieldPattern, Error> {
    FarFieldPattern::sample(grid, meta, |x| sol.far_field(x))
}

/// Far-field pattern of the series solution for a plane wave.
pub fn oracle_pattern(scene: &Scene<f64>, d: V3<f64>, q: V3<f64>, grid: DirectionGrid, meta: PatternMeta) -> Result<FarFieldPattern, Error> {
    let mie = MieScene::from_scene(scene)?;
    let coef = mie.coefficients(d, q)?;
    FarFieldPattern::sample(grid, meta, |x| Ok(mie.farfield(&coef, x)))
}

fn unit(rng: &mut ChaCha8Rng) -> V3<f64> {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = vec3::norm(v);
        if n > 0.1 && n <= 1.0 {
            return vec3::scale(1.0 / n, v);
        }
    }
}

/// Unit vector orthogonal to `d`, drawn from `rng`.
pub fn random_polarization(rng: &mut ChaCha8Rng, d: V3<f64>) -> V3<f64> {
    vec3::normalize(vec3::cross(d, unit(rng)))
}

/// Uniformly distributed rotation (unit quaternion from three uniforms).
pub fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation {
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let tau = 2.0 * std::f64::consts::PI;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (a * (tau * u2).sin(), a * (tau * u2).cos(), b * (tau * u3).sin(), b * (tau * u3).cos());
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// Seeded point of the exterior or of the layer, at admissible distance from the surfaces.
///
/// Exterior points lie between 1.5 and 2.5 interface radii from its center along a
/// random ray; layer points on a random ray between obstacle and interface.
pub fn probe_point(asm: &Assembly<f64>, layer: Layer, seed: u64) -> Result<V3<f64>, Error> {
    let sh = &*asm.shared;
    let scene = &sh.disc.scene;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let u = unit(&mut rng);
        let x = match layer {
            Layer::Outer => {
                let c = scene.interface.center;
                vec3::add(c, vec3::scale(scene.interface.radial_extent(u) * rng.gen_range(1.5..2.5), u))
            }
            Layer::Inner => {
                let c = scene.obstacle.center;
                let r1 = scene.obstacle.radial_extent(u);
                let far = ray_exit(&scene.interface, c, u);
                vec3::add(c, vec3::scale(r1 + (far - r1) * rng.gen_range(0.4..0.6), u))
            }
        };
        let region = if layer == Layer::Outer { Region::Exterior } else { Region::Layer };
        let probe = Incident::dipole(x, [1.0, 0.0, 0.0], layer)?;
        if sh.check_point(x, region).is_ok() && check_source(&probe, &sh.disc, tolerances::SOURCE_MIN_SPACINGS).is_ok() {
            return Ok(x);
        }
    }
    Err(Error::WrongRegion(format!("no admissible {layer:?} probe point found")))
}

/// Distance from `c` along `u` to the boundary of a star-shaped placement, by bisection.
fn ray_exit(p: &Placement<f64>, c: V3<f64>, u: V3<f64>) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while p.depth(vec3::add(c, vec3::scale(hi, u))) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if p.depth(vec3::add(c, vec3::scale(m, u))) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Both sides of one mixed reciprocity identity.
#[derive(Clone, Copy, Debug)]
pub struct Reciprocity {
    /// `4π q·E^∞(−d; z, p)`.
    pub lhs: C,
    /// `p·E^s(z; d, q)`, or `λ_E λ_H p·F(z; d, q)` for a layer point.
    pub rhs: C,
}

impl Reciprocity {
    pub fn residual(&self) -> f64 {
        let s = self.lhs.norm().max(self.rhs.norm());
        if s == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).norm() / s
        }
    }
}

/// Mixed reciprocity between the plane wave `(d, q)` and the dipole `(z, p)`.
pub fn check_mixed_reciprocity(
    asm: &Assembly<f64>,
    d: V3<f64>,
    q: V3<f64>,
    z: V3<f64>,
    p: V3<f64>,
    layer: Layer,
) -> Result<Reciprocity, Error> {
    let plane = Incident::plane_wave(d, q)?;
    let dipole = Incident::dipole(z, p, layer)?;
    check_source(&dipole, &asm.shared.disc, tolerances::SOURCE_MIN_SPACINGS)?;
    let sp = asm.solve_incident(&plane)?;
    let sd = asm.solve_incident(&dipole)?;
    let far = sd.far_field(vec3::scale(-1.0, d))?;
    let lhs = C::new(4.0 * std::f64::consts::PI, 0.0) * vec3::rcdot(q, far);
    let rhs = match layer {
        Layer::Outer => vec3::rcdot(p, sp.scattered(z)?.e),
        Layer::Inner => {
            let m = &asm.shared.disc.scene.media;
            m.lambda_e * m.lambda_h * vec3::rcdot(p, sp.layer_total(z, &plane)?.e)
        }
    };
    Ok(Reciprocity { lhs, rhs })
}

/// Seeded reciprocity probe: random plane wave, random dipole at a probe point.
pub fn seeded_reciprocity(asm: &Assembly<f64>, layer: Layer, seed: u64) -> Result<Reciprocity, Error> {
    let z = probe_point(asm, layer, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let d = unit(&mut rng);
    let q = random_polarization(&mut rng, d);
    let p = unit(&mut rng);
    check_mixed_reciprocity(asm, d, q, z, p, layer)
}

/// Normalized `Re ∫_{S₀} ν×E·H̄ ds` of the total exterior field.
pub fn check_energy_inequality(sol: &Solution<f64>, incident: &Incident<f64>) -> Result<f64, Error> {
    Ok(sol.energy_flux(incident)?.normalized())
}

/// Largest distance of the interface from its center, sampled on its own nodes, doubled.
pub fn scene_diameter(scene: &Scene<f64>) -> Result<f64, Error> {
    let s = Surface::new(scene.interface.clone(), 8)?;
    let c = scene.interface.center;
    Ok(2.0 * s.points.iter().map(|x| vec3::norm(vec3::sub(*x, c))).fold(0.0, f64::max))
}

/// Far-field consistency along one direction.
#[derive(Clone, Debug)]
pub struct Radiation {
    pub radii: Vec<f64>,
    /// `‖r e^{−ik₀r} E^s(r x̂) − E^∞(x̂)‖ / ‖E^∞(x̂)‖`.
    pub errors: Vec<f64>,
    /// `r ‖H^s × x̂ − E^s‖ / ‖E^∞(x̂)‖`.
    pub silver_muller: Vec<f64>,
}

impl Radiation {
    pub fn ratios(&self) -> Vec<f64> {
        self.errors.windows(2).map(|w| if w[0] == 0.0 { 0.0 } else { w[1] / w[0] }).collect()
    }
}

/// Compares the scattered field at the given multiples of the scene diameter with the
/// far-field pattern.
pub fn check_radiation_asymptotics(sol: &Solution<f64>, xhat: V3<f64>, diameters: &[f64]) -> Result<Radiation, Error> {
    let scene = &sol.shared.disc.scene;
    let diam = scene_diameter(scene)?;
    if diameters.iter().any(|m| *m < 10.0) {
        return Err(Error::WrongRegion("radiation radii must be at least ten scene diameters".into()));
    }
    let xhat = vec3::normalize(xhat);
    let k0 = scene.media.k0;
    let far = sol.far_field(xhat)?;
    let scale = vec3::cnorm(far);
    let mut out = Radiation { radii: Vec::new(), errors: Vec::new(), silver_muller: Vec::new() };
    for m in diameters {
        let r = m * diam;
        let f = sol.scattered(vec3::scale(r, xhat))?;
        let phase = C::new(0.0, -k0 * r).exp() * r;
        let e = vec3::csub(vec3::cscale(phase, f.e), far);
        let sm = vec3::csub(vec3::crcross(f.h, xhat), f.e);
        let norm = |v: f64| if scale == 0.0 { 0.0 } else { v / scale };
        out.radii.push(r);
        out.errors.push(norm(vec3::cnorm(e)));
        out.silver_muller.push(norm(r * vec3::cnorm(sm)));
    }
    Ok(out)
}

fn concentric_spheres(scene: &Scene<f64>) -> Result<(), Error> {
    let tol = 1e-12;
    if scene.interface.is_centered_sphere(tol).is_none() || scene.obstacle.is_centered_sphere(tol).is_none() {
        return Err(Error::InvalidGeometry("equivariance needs concentric spheres centered at the origin".into()));
    }
    Ok(())
}

fn equivariance_residual<F>(q_rot: &Rotation, d: V3<f64>, q: V3<f64>, grid: &DirectionGrid, mut far: F) -> Result<f64, Error>
where
    F: FnMut(V3<f64>, V3<f64>, &[V3<f64>]) -> Result<Vec<C3<f64>>, Error>,
{
    let dirs = grid.directions();
    let rdirs: Vec<V3<f64>> = dirs.iter().map(|x| vec3::matvec(q_rot, *x)).collect();
    let base = far(d, q, &dirs)?;
    let rot = far(vec3::matvec(q_rot, d), vec3::matvec(q_rot, q), &rdirs)?;
    let scale = base.iter().map(|v| vec3::cnorm(*v)).fold(0.0, f64::max);
    let worst = base
        .iter()
        .zip(&rot)
        .map(|(b, r)| vec3::cnorm(vec3::csub(*r, vec3::rmat_c(q_rot, *b))))
        .fold(0.0, f64::max);
    Ok(if scale == 0.0 { worst } else { worst / scale })
}

/// `max ‖E^∞(Qx̂; Qd, Qq) − Q E^∞(x̂; d, q)‖ / max ‖E^∞‖` from two solves.
pub fn check_rotation_equivariance(asm: &Assembly<f64>, q_rot: &Rotation, d: V3<f64>, q: V3<f64>, grid: &DirectionGrid) -> Result<f64, Error> {
    concentric_spheres(&asm.shared.disc.scene)?;
    crate::geometry::check_rotation(q_rot)?;
    equivariance_residual(q_rot, d, q, grid, |d, q, dirs| {
        let sol = asm.solve_incident(&Incident::plane_wave(d, q)?)?;
        dirs.iter().map(|x| sol.far_field(*x)).collect()
    })
}

/// The same residual for the series solution.
pub fn check_oracle_equivariance(scene: &Scene<f64>, q_rot: &Rotation, d: V3<f64>, q: V3<f64>, grid: &DirectionGrid) -> Result<f64, Error> {
    concentric_spheres(scene)?;
    crate::geometry::check_rotation(q_rot)?;
    let mie = MieScene::from_scene(scene)?;
    equivariance_residual(q_rot, d, q, grid, |d, q, dirs| {
        let c = mie.coefficients(d, q)?;
        Ok(dirs.iter().map(|x| mie.farfield(&c, *x)).collect())
    })
}

/// Relative distance between the two-layer far field of a transparent layer and an
/// independently assembled single-surface solve.
pub fn check_single_surface(full: &Assembly<f64>, d: V3<f64>, q: V3<f64>, grid: &DirectionGrid) -> Result<f64, Error> {
    let scene = &full.shared.disc.scene;
    let m = &scene.media;
    let one = C::new(1.0, 0.0);
    if (m.k1 - m.k0c()).norm() > 1e-14 * m.k0 || (m.lambda_e - one).norm() > 1e-14 {
        return Err(Error::InvalidMedium("the single-surface comparison needs identical layers".into()));
    }
    let single = Assembly::new(full.shared.disc.clone(), Options { obstacle_only: true, ..Default::default() })?;
    let inc = Incident::plane_wave(d, q)?;
    let a = solution_pattern(&full.solve_incident(&inc)?, grid.clone(), PatternMeta::default())?;
    let b = solution_pattern(&single.solve_incident(&inc)?, grid.clone(), PatternMeta::default())?;
    farfield_distance(&a, &b)
}

/// `|Ŝ1 − 2|` on the unit sphere at quadrature order `order`.
pub fn check_shat_constant(order: usize) -> Result<f64, Error> {
    let pl = Placement::new(Shape::Sphere { radius: 1.0 }, [0.0; 3]);
    let s = Surface::new(pl.clone(), order)?;
    let l = degree_for_order(order);
    let space = SpectralSpace::new(&s, l);
    let src = SurfaceSource::new(pl, order, l, false);
    let idx: Vec<usize> = (0..s.len()).collect();
    let m = shat_matrix(&src, &s, &space, &idx);
    let mut worst: f64 = 0.0;
    for i in 0..m.rows() {
        let v: f64 = m.row(i).iter().sum();
        worst = worst.max((v - 2.0).abs());
    }
    Ok(worst)
}

/// `max |R R v + v|` over seeded tangential fields on a sphere.
pub fn check_rotation_square(seed: u64) -> Result<f64, Error> {
    let s = Surface::new(Placement::new(Shape::Sphere { radius: 1.0 }, [0.0; 3]), 8)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for n in 0..s.len() {
        let nu = s.normals[n];
        let (t1, t2) = s.tangent_frame(n);
        let v = vec3::add(vec3::scale(rng.gen_range(-1.0..1.0), t1), vec3::scale(rng.gen_range(-1.0..1.0), t2));
        let r = r_matrix(nu);
        let rrv = vec3::matvec(&r, vec3::matvec(&r, v));
        worst = worst.max(vec3::norm(vec3::add(rrv, v)));
    }
    Ok(worst)
}

/// Largest entry of the first transmission block multiplying `a` at the interface nodes,
/// for a scene whose layers have equal wave numbers.
pub fn check_matched_layer_block(scene: &Scene<f64>) -> Result<f64, Error> {
    let m = &scene.media;
    if (m.k1 - m.k0c()).norm() > 1e-14 * m.k0 {
        return Err(Error::InvalidMedium("the matched-layer check needs k₀ = k₁".into()));
    }
    let sh = crate::bie::Discretization::new(scene.discretize()?, Options::default())?;
    let r = sh.layout.range(Group::A).expect("interface unknowns present");
    let mut worst: f64 = 0.0;
    for s in &sh.disc.s0.params {
        let (_, _, rows) = sh.interface_rows_at(*s)?;
        for i in 0..3 {
            worst = rows.row(i)[r.clone()].iter().map(|z| z.norm()).fold(worst, f64::max);
        }
    }
    Ok(worst)
}

/// Relative far-field distance between the solutions of two scenes for one plane wave.
pub fn check_discrimination(a: &Assembly<f64>, b: &Assembly<f64>, d: V3<f64>, q: V3<f64>, grid: &DirectionGrid) -> Result<f64, Error> {
    let inc = Incident::plane_wave(d, q)?;
    let pa = solution_pattern(&a.solve_incident(&inc)?, grid.clone(), PatternMeta::default())?;
    let pb = solution_pattern(&b.solve_incident(&inc)?, grid.clone(), PatternMeta::default())?;
    farfield_distance(&pa, &pb)
}
