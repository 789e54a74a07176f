//! Solved densities and the fields they generate.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex;
use rayon::prelude::*;

use crate::bie::layout::Group;
use crate::bie::system::{Assembly, Discretization};
use crate::error::Error;
use crate::fields::{incident_traces, interface_traces_at, obstacle_traces_at, obstacle_traces_of, FieldPair, Incident, TraceData};
use crate::geometry::{SpectralSpace, Surface};
use crate::potentials::DensitySource;
use crate::scalar::{lit, Real};
use crate::tolerances;
use crate::vec3::{self, C3, V3};

/// Nodal densities. `c`, `d` and `psi` are stored on all obstacle nodes and vanish
/// off their patches.
#[derive(Clone, Debug)]
pub struct DensitySet<T> {
    pub a: Vec<C3<T>>,
    pub b: Vec<C3<T>>,
    pub c: Vec<C3<T>>,
    pub d: Vec<C3<T>>,
    pub psi: Vec<Complex<T>>,
}

impl<T: Real> DensitySet<T> {
    /// Largest pointwise magnitude over all densities.
    pub fn max_norm(&self) -> T {
        let t = |v: &[C3<T>]| v.iter().map(|x| vec3::cnorm(*x)).fold(T::zero(), T::max);
        let s = self.psi.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        t(&self.a).max(t(&self.b)).max(t(&self.c)).max(t(&self.d)).max(s)
    }

    /// Largest normal component relative to the largest magnitude.
    pub fn max_normal_component(&self, s0: &Surface<T>, s1: &Surface<T>) -> T {
        let mut worst = T::zero();
        for (v, s) in [(&self.a, s0), (&self.b, s0), (&self.c, s1), (&self.d, s1)] {
            for (x, nu) in v.iter().zip(&s.normals) {
                worst = worst.max(vec3::rcdot(*nu, *x).norm());
            }
        }
        worst
    }
}

#[derive(Clone, Debug)]
pub struct SolveDiagnostics {
    /// `‖Zy − r‖ / ‖r‖` for the reduced system.
    pub residual: f64,
    pub condition: f64,
    pub unknowns: usize,
    pub nodal_unknowns: usize,
    pub assembly_seconds: f64,
    pub factor_seconds: f64,
    pub solve_seconds: f64,
    pub warnings: Vec<String>,
}

/// Field in the layer: `F`, `G = curl F / (ik₁)` and `div F`.
#[derive(Clone, Copy, Debug)]
pub struct LayerField<T> {
    pub f: C3<T>,
    pub g: C3<T>,
    pub div_f: Complex<T>,
}

/// Region of an evaluation point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Exterior,
    Layer,
}

/// Net power flux `Re ∫_{S₀} ν × E · H̄ ds` of the total exterior field.
#[derive(Clone, Copy, Debug)]
pub struct EnergyFlux {
    pub value: f64,
    /// `‖ν × E‖ ‖ν × H‖` in `L²(S₀)`.
    pub scale: f64,
}

impl EnergyFlux {
    pub fn normalized(&self) -> f64 {
        if self.scale > 0.0 {
            self.value / self.scale
        } else {
            self.value
        }
    }
}

/// Boundary-condition residuals at probe points, each relative to the size of its data.
#[derive(Clone, Copy, Debug, Default)]
pub struct BoundaryResiduals {
    pub interface_e: f64,
    pub interface_h: f64,
    pub conducting: f64,
    pub impedance: f64,
    pub divergence: f64,
    pub probes: usize,
}

impl BoundaryResiduals {
    pub fn max(&self) -> f64 {
        [self.interface_e, self.interface_h, self.conducting, self.impedance, self.divergence]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Densities of a solved problem with their field evaluators.
pub struct Solution<T: Real> {
    pub shared: Arc<Discretization<T>>,
    pub densities: DensitySet<T>,
    pub coefficients: Vec<Complex<T>>,
    pub diagnostics: SolveDiagnostics,
    outer: DensitySource<T>,
    inner: DensitySource<T>,
}

impl<T: Real> Discretization<T> {
    /// Boundary data of an incident field on the nodes of this discretization.
    pub fn traces(&self, incident: &Incident<T>) -> Result<TraceData<T>, Error> {
        if !self.options.obstacle_only {
            return incident_traces(incident, &self.disc);
        }
        if incident.is_inner() {
            return Err(Error::InvalidIncident("the obstacle-only model has no layer source".into()));
        }
        let s1 = &self.disc.s1;
        let (t3, t4) = (0..s1.len()).map(|n| self.obstacle_data(incident, s1.points[n], s1.normals[n])).unzip();
        Ok(TraceData { t1: Vec::new(), t2: Vec::new(), t3, t4 })
    }

    fn obstacle_data(&self, incident: &Incident<T>, x: V3<T>, nu: V3<T>) -> (C3<T>, C3<T>) {
        let media = &self.disc.scene.media;
        if self.options.obstacle_only {
            obstacle_traces_of(incident.eval(media, x), media.k1, self.impedance(), nu)
        } else {
            obstacle_traces_at(incident, media, self.impedance(), x, nu)
        }
    }

    fn group_coef(&self, y: &[Complex<T>], g: Group) -> Vec<Complex<T>> {
        match self.layout.range(g) {
            Some(r) => y[r].to_vec(),
            None => {
                let n = if g.is_scalar() { self.sp1.n_scal() } else { self.sp1.n_tan() };
                vec![Complex::new(T::zero(), T::zero()); n]
            }
        }
    }

    /// Checks that `x` lies in `region` and far enough from the surfaces bounding it.
    pub fn check_point(&self, x: V3<T>, region: Region) -> Result<(), Error> {
        let d0 = self.disc.s0.depth(x);
        let d1 = self.disc.s1.depth(x);
        let (ok, near): (bool, &[usize]) = match (region, self.options.obstacle_only) {
            (Region::Exterior, false) => (d0 < T::zero(), &[0]),
            (Region::Exterior, true) => (d1 < T::zero(), &[1]),
            (Region::Layer, false) => (d0 > T::zero() && d1 < T::zero(), &[0, 1]),
            (Region::Layer, true) => (false, &[]),
        };
        if !ok {
            return Err(Error::WrongRegion(format!("point {x:?} is not in the {region:?} region")));
        }
        for &w in near {
            let (d, h) = self.fine_surface(w)?.proximity(x);
            let req = lit::<T>(tolerances::SOURCE_MIN_SPACINGS) * h;
            if d < req {
                return Err(Error::NearSurface {
                    surface: if w == 0 { "interface" } else { "obstacle" },
                    distance: d.to_f64().unwrap_or(0.0),
                    required: req.to_f64().unwrap_or(0.0),
                });
            }
        }
        Ok(())
    }
}

impl<T: Real> Assembly<T> {
    /// Solves for the boundary data of `incident`.
    pub fn solve_incident(&self, incident: &Incident<T>) -> Result<Solution<T>, Error> {
        let tr = self.shared.traces(incident)?;
        self.solve(&tr)
    }

    /// Solves for given boundary data.
    pub fn solve(&self, traces: &TraceData<T>) -> Result<Solution<T>, Error> {
        let t0 = Instant::now();
        let sh = &self.shared;
        let d = &sh.disc;
        let obstacle_only = sh.options.obstacle_only;
        let n0 = if obstacle_only { 0 } else { d.s0.len() };
        if traces.t1.len() != n0 || traces.t2.len() != n0 || traces.t3.len() != d.s1.len() || traces.t4.len() != d.s1.len() {
            return Err(Error::DimensionMismatch("trace data does not match the surface grids".into()));
        }
        let two = Complex::new(lit::<T>(2.0), T::zero());
        let flat = |v: &[C3<T>], s: Complex<T>| -> Vec<Complex<T>> { v.iter().flat_map(|x| x.map(|c| c * s)).collect() };
        let pick = |v: &[C3<T>], idx: &[usize], s: Complex<T>| -> Vec<Complex<T>> {
            idx.iter().flat_map(|&n| v[n].map(|c| c * s)).collect()
        };
        let (_, k1) = sh.wavenumbers();
        let f = [
            flat(&traces.t1, two),
            flat(&traces.t2, two),
            pick(&traces.t3, &d.gamma1, two),
            pick(&traces.t4, &d.gamma2, two * Complex::<T>::i() * k1),
            vec![Complex::new(T::zero(), T::zero()); d.gamma2.len()],
        ];
        let (y, u, residual) = self.solve_blocks(&f)?;
        let unflat = |v: &[Complex<T>]| -> Vec<C3<T>> { v.chunks(3).map(|c| [c[0], c[1], c[2]]).collect() };
        let z3 = vec3::czero::<T>();
        let zc = Complex::new(T::zero(), T::zero());
        let mut c = vec![z3; d.s1.len()];
        let mut dd = vec![z3; d.s1.len()];
        let mut psi = vec![zc; d.s1.len()];
        for (j, &n) in d.gamma1.iter().enumerate() {
            c[n] = [u[2][3 * j], u[2][3 * j + 1], u[2][3 * j + 2]];
        }
        for (j, &n) in d.gamma2.iter().enumerate() {
            dd[n] = [u[3][3 * j], u[3][3 * j + 1], u[3][3 * j + 2]];
            psi[n] = u[4][j];
        }
        let densities = DensitySet {
            a: if obstacle_only { Vec::new() } else { unflat(&u[0]) },
            b: if obstacle_only { Vec::new() } else { unflat(&u[1]) },
            c,
            d: dd,
            psi,
        };
        let outer = DensitySource::new(
            sh.src0.clone(),
            vec![sh.group_coef(&y, Group::A), sh.group_coef(&y, Group::B)],
            Vec::new(),
        );
        let inner = DensitySource::new(
            sh.src1.clone(),
            [Group::C, Group::Wc, Group::D, Group::Wd].map(|g| sh.group_coef(&y, g)).to_vec(),
            vec![sh.group_coef(&y, Group::Psi)],
        );
        let diagnostics = SolveDiagnostics {
            residual: residual.to_f64().unwrap_or(f64::NAN),
            condition: self.info.condition,
            unknowns: self.info.unknowns,
            nodal_unknowns: self.info.nodal_unknowns,
            assembly_seconds: self.info.assembly_seconds,
            factor_seconds: self.info.factor_seconds,
            solve_seconds: t0.elapsed().as_secs_f64(),
            warnings: self.info.warnings.clone(),
        };
        Ok(Solution { shared: self.shared.clone(), densities, coefficients: y, diagnostics, outer, inner })
    }
}

impl<T: Real> Solution<T> {
    pub fn coefficient(&self, g: Group) -> Vec<Complex<T>> {
        self.shared.group_coef(&self.coefficients, g)
    }

    fn consts(&self) -> (Complex<T>, Complex<T>, Complex<T>, Complex<T>, Complex<T>) {
        let k = &self.shared.consts;
        (k.k0, k.k1, k.le, k.lh, k.lam)
    }

    /// `(F, G, div F)` of the obstacle densities and, unless `skip_outer`, the interface ones.
    fn ansatz_f(&self, x: V3<T>, skip_outer: bool) -> Result<LayerField<T>, Error> {
        let (_, k1, _, _, lam) = self.consts();
        let i = Complex::<T>::i();
        let (tp, sp) = self.inner.at(x, k1)?;
        let (c, wc, d, wd) = (&tp[0], &tp[1], &tp[2], &tp[3]);
        let psi = &sp[0];
        let mut f = vec3::cadd(c.curl, vec3::cscale(i / (k1 * k1), wc.curlcurl(k1)));
        f = vec3::cadd(f, d.v);
        f = vec3::cadd(f, vec3::cscale(i * lam, wd.curl));
        f = vec3::cadd(f, psi.grad);
        f = vec3::cadd(f, vec3::cscale(i * lam, psi.ns));
        let mut g = vec3::cadd(c.curlcurl(k1), vec3::cscale(i, wc.curl));
        g = vec3::cadd(g, d.curl);
        g = vec3::cadd(g, vec3::cscale(i * lam, wd.curlcurl(k1)));
        g = vec3::cadd(g, vec3::cscale(i * lam, psi.curl_ns));
        let div_f = d.div - k1 * k1 * psi.s + i * lam * psi.div_ns;
        if !skip_outer {
            let (op, _) = self.outer.at(x, k1)?;
            let (a, b) = (&op[0], &op[1]);
            f = vec3::cadd(f, vec3::cadd(a.curl, b.curlcurl(k1)));
            g = vec3::cadd(g, vec3::cadd(a.curlcurl(k1), vec3::cscale(k1 * k1, b.curl)));
        }
        Ok(LayerField { f, g: vec3::cscale(Complex::new(T::one(), T::zero()) / (i * k1), g), div_f })
    }

    /// Scattered field `(E, H)` in the exterior.
    pub fn scattered(&self, x: V3<T>) -> Result<FieldPair<T>, Error> {
        self.shared.check_point(x, Region::Exterior)?;
        if self.shared.options.obstacle_only {
            let lf = self.ansatz_f(x, true)?;
            return Ok(FieldPair { e: lf.f, h: lf.g });
        }
        let (k0, k1, le, lh, _) = self.consts();
        let (op, _) = self.outer.at(x, k0)?;
        let (a, b) = (&op[0], &op[1]);
        let fa = lh * k0 / k1;
        let e = vec3::cadd(vec3::cscale(fa, a.curl), vec3::cscale(le, b.curlcurl(k0)));
        let h = vec3::cadd(vec3::cscale(fa, a.curlcurl(k0)), vec3::cscale(le * k0 * k0, b.curl));
        let h = vec3::cscale(Complex::new(T::one(), T::zero()) / (Complex::<T>::i() * k0), h);
        Ok(FieldPair { e, h })
    }

    /// `(F, G, div F)` in the layer as given by the densities.
    pub fn layer_field(&self, x: V3<T>) -> Result<LayerField<T>, Error> {
        self.shared.check_point(x, Region::Layer)?;
        self.ansatz_f(x, false)
    }

    /// Physical total field in the layer: the density field plus the incident field of a
    /// source inside the layer.
    pub fn layer_total(&self, x: V3<T>, incident: &Incident<T>) -> Result<FieldPair<T>, Error> {
        let lf = self.layer_field(x)?;
        let mut out = FieldPair { e: lf.f, h: lf.g };
        if incident.is_inner() {
            let fi = incident.eval(&self.shared.disc.scene.media, x);
            out.e = vec3::cadd(out.e, fi.e);
            out.h = vec3::cadd(out.h, fi.h);
        }
        Ok(out)
    }

    /// Electric far-field pattern in direction `xhat`.
    pub fn far_field(&self, xhat: V3<T>) -> Result<C3<T>, Error> {
        let (k0, k1, le, lh, lam) = self.consts();
        let i = Complex::<T>::i();
        let xc = vec3::cfrom(xhat);
        let cross = |v: C3<T>| vec3::rccross(xhat, v);
        if self.shared.options.obstacle_only {
            let fi = self.inner.far(xhat, k1)?;
            let (c, wc, d, wd) = (fi.tan[0], fi.tan[1], fi.tan[2], fi.tan[3]);
            let mut e = vec3::cscale(i * k1, cross(c));
            e = vec3::csub(e, vec3::cscale(i, cross(cross(wc))));
            e = vec3::cadd(e, d);
            e = vec3::cadd(e, vec3::cscale(-lam * k1, cross(wd)));
            e = vec3::cadd(e, vec3::cscale(i * k1 * fi.scal[0], xc));
            e = vec3::cadd(e, vec3::cscale(i * lam, fi.nscal[0]));
            return Ok(e);
        }
        let fo = self.outer.far(xhat, k0)?;
        let e = vec3::cscale(lh * k0 / k1 * i * k0, cross(fo.tan[0]));
        Ok(vec3::csub(e, vec3::cscale(le * k0 * k0, cross(cross(fo.tan[1])))))
    }

    /// Exterior traces `(ν × E₊, ν × H₊)` of the scattered field at the interface nodes.
    pub fn interface_exterior_traces(&self) -> Result<(Vec<C3<T>>, Vec<C3<T>>), Error> {
        if self.shared.options.obstacle_only {
            return Err(Error::WrongRegion("the obstacle-only model has no interface".into()));
        }
        let sh = &*self.shared;
        let (k0, k1, le, lh, _) = self.consts();
        let ya = self.coefficient(Group::A);
        let yb = self.coefficient(Group::B);
        let half = Complex::new(lit::<T>(0.5), T::zero());
        let fa = lh * k0 / k1;
        let ik0 = Complex::<T>::i() * k0;
        let s0 = &sh.disc.s0;
        let out: Vec<(C3<T>, C3<T>)> = (0..s0.len())
            .into_par_iter()
            .map_init(
                || sh.src0.scratch(),
                |scratch, n| {
                    let (pg, bk) = sh.src0.on_surface_banks(scratch, s0.params[n], &[k0]);
                    let nu = pg.normal;
                    let ap = |m: &crate::linalg::CMat<T>, y: &[Complex<T>]| -> C3<T> {
                        let v = m.apply(y);
                        [v[0], v[1], v[2]]
                    };
                    let (mag, efi) = (bk[0].mag(nu), bk[0].efi(nu));
                    let (ma, mb, ea, eb) = (ap(&mag, &ya), ap(&mag, &yb), ap(&efi, &ya), ap(&efi, &yb));
                    let (a, b) = (self.densities.a[n], self.densities.b[n]);
                    let ne = vec3::cadd(vec3::cscale(fa * half, vec3::cadd(ma, a)), vec3::cscale(le * half, eb));
                    let nh = vec3::cadd(vec3::cscale(fa * half, ea), vec3::cscale(le * k0 * k0 * half, vec3::cadd(mb, b)));
                    (ne, vec3::cscale(Complex::new(T::one(), T::zero()) / ik0, nh))
                },
            )
            .collect();
        Ok(out.into_iter().unzip())
    }

    /// Power flux of the total exterior field through the interface.
    pub fn energy_flux(&self, incident: &Incident<T>) -> Result<EnergyFlux, Error> {
        let (ne, nh) = self.interface_exterior_traces()?;
        let s0 = &self.shared.disc.s0;
        let media = &self.shared.disc.scene.media;
        let mut value = T::zero();
        let (mut se, mut shh) = (T::zero(), T::zero());
        for n in 0..s0.len() {
            let nu = s0.normals[n];
            let (mut e, mut h) = (ne[n], nh[n]);
            if !incident.is_inner() {
                let fi = incident.eval(media, s0.points[n]);
                e = vec3::cadd(e, vec3::rccross(nu, fi.e));
                h = vec3::cadd(h, vec3::rccross(nu, fi.h));
            }
            let ph = vec3::crcross(h, nu);
            let w = s0.weights[n];
            value = value + w * vec3::cdot_conj(e, ph).re;
            se = se + w * vec3::cnorm_sqr(e);
            shh = shh + w * vec3::cnorm_sqr(h);
        }
        Ok(EnergyFlux {
            value: value.to_f64().unwrap_or(f64::NAN),
            scale: (se.sqrt() * shh.sqrt()).to_f64().unwrap_or(f64::NAN),
        })
    }

    /// Residuals of all boundary conditions at the nodes of a `q x 2q` probe grid.
    ///
    /// Nodal densities are carried to the probes by spectral interpolation of the
    /// highest degree the collocation grid resolves.
    pub fn boundary_residuals(&self, incident: &Incident<T>, q: usize) -> Result<BoundaryResiduals, Error> {
        let sh = &*self.shared;
        let diag = sh.diagonal();
        let (_, k1, _, _, lam) = self.consts();
        let y = &self.coefficients;
        let i = Complex::<T>::i();
        let two = Complex::new(lit::<T>(2.0), T::zero());
        let media = &sh.disc.scene.media;
        let lp = sh.disc.scene.order.saturating_sub(2).max(sh.l_max);
        let mut out = BoundaryResiduals::default();
        let ratio = |num: T, den: T| -> f64 {
            let v = if den > T::zero() { num / den } else { num };
            v.to_f64().unwrap_or(f64::NAN)
        };
        let at = |basis: &crate::linalg::CMat<T>, coef: &[Complex<T>]| -> Vec<Complex<T>> { basis.apply(coef) };
        if !sh.options.obstacle_only {
            let sp = SpectralSpace::new(&sh.disc.s0, lp);
            let ca = sp.project_tangential(&self.densities.a);
            let cb = sp.project_tangential(&self.densities.b);
            let probe = Surface::with_grid(sh.disc.scene.interface.clone(), q, 2 * q)?;
            let res: Vec<Result<[T; 4], Error>> = probe
                .params
                .par_iter()
                .map(|&s| {
                    let (x, nu, rows) = sh.interface_rows_at(s)?;
                    let (tb, _) = sh.bases_at(0, s, lp);
                    let (a, b) = (at(&tb, &ca), at(&tb, &cb));
                    let ay = rows.apply(y);
                    let (t1, t2) = interface_traces_at(incident, media, x, nu);
                    let mut r = [T::zero(); 4];
                    for c in 0..3 {
                        r[0] = r[0] + (diag[0] * a[c] + ay[c] - two * t1[c]).norm_sqr();
                        r[1] = r[1] + (two * t1[c]).norm_sqr();
                        r[2] = r[2] + (diag[1] * b[c] + ay[3 + c] - two * t2[c]).norm_sqr();
                        r[3] = r[3] + (two * t2[c]).norm_sqr();
                    }
                    Ok(r.map(|v| v.sqrt()))
                })
                .collect();
            let mut m = [T::zero(); 4];
            for r in res {
                let r = r?;
                for k in 0..4 {
                    m[k] = m[k].max(r[k]);
                }
            }
            out.interface_e = ratio(m[0], m[1]);
            out.interface_h = ratio(m[2], m[3]);
            out.probes += probe.len();
        }
        let sp = SpectralSpace::new(&sh.disc.s1, lp);
        let cc = sp.project_tangential(&self.densities.c);
        let cd = sp.project_tangential(&self.densities.d);
        let cpsi = sp.project_scalar(&self.densities.psi);
        let probe = Surface::with_grid(sh.disc.scene.obstacle.clone(), q, 2 * q)?;
        let part = sh.disc.scene.partition;
        let res: Vec<Result<(bool, [T; 4]), Error>> = probe
            .params
            .par_iter()
            .map(|&s| {
                let conducting = part.is_pec_at(s);
                let (x, nu, rows) = sh.obstacle_rows_at(s, conducting)?;
                let (tb, sb) = sh.bases_at(1, s, lp);
                let ay = rows.apply(y);
                let (t3, t4) = sh.obstacle_data(incident, x, nu);
                let mut r = [T::zero(); 4];
                if conducting {
                    let c = at(&tb, &cc);
                    for k in 0..3 {
                        r[0] = r[0] + (c[k] + ay[k] - two * t3[k]).norm_sqr();
                        r[1] = r[1] + (two * t3[k]).norm_sqr();
                    }
                } else {
                    let d = at(&tb, &cd);
                    let psi = at(&sb, &cpsi)[0];
                    for k in 0..3 {
                        let f = two * i * k1 * t4[k];
                        r[0] = r[0] + (d[k] + ay[k] - f).norm_sqr();
                        r[1] = r[1] + f.norm_sqr();
                    }
                    r[2] = (diag[4] * psi + ay[3]).norm_sqr();
                    r[3] = (i * lam * psi).norm_sqr();
                }
                Ok((conducting, r.map(|v| v.sqrt())))
            })
            .collect();
        let mut m = [[T::zero(); 4]; 2];
        for r in res {
            let (c, r) = r?;
            let slot = if c { 0 } else { 1 };
            for k in 0..4 {
                m[slot][k] = m[slot][k].max(r[k]);
            }
        }
        out.conducting = ratio(m[0][0], m[0][1]);
        out.impedance = ratio(m[1][0], m[1][1]);
        out.divergence = ratio(m[1][2], m[1][3]);
        out.probes += probe.len();
        Ok(out)
    }
}

/// Assembles and solves in one step.
pub fn solve_direct<T: Real>(
    disc: crate::media::DiscreteScene<T>,
    incident: &Incident<T>,
) -> Result<Solution<T>, Error> {
    let asm = Assembly::new(disc, Default::default())?;
    asm.solve_incident(incident)
}
