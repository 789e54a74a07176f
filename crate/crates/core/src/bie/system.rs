//! Nyström assembly of the boundary integral system and its reduced solve.
//!
//! Nodal unknowns `u_r` of the five equations enter the operators only through
//! their spectral coefficients `y = B u`, so each equation reads `D_r u_r + A_r y = f_r`.
//! Eliminating `u` gives the reduced system `(I + Σ B A / D) y = Σ B f / D`.

use std::sync::{Arc, OnceLock};
use std::time::Instant;

use num_complex::Complex;
use rayon::prelude::*;

use crate::bie::layout::{Group, Layout};
use crate::bie::rows::{conducting_rows, impedance_rows, interface_rows, RowConsts};
use crate::error::Error;
use crate::geometry::spectral::eval_weighted_basis;
use crate::geometry::{degree_for_order, tangential_count, SpectralSpace, Surface};
use crate::linalg::{CMat, Lu, RMat};
use crate::media::DiscreteScene;
use crate::potentials::{cross_matrix, shat_matrix, SurfaceSource};
use crate::scalar::{lit, Real};
use crate::special::sh_count;
use crate::tolerances;
use crate::vec3::V3;

/// Assembly options.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    /// Keep coefficient groups of empty boundary parts (they solve to zero).
    pub keep_empty_blocks: bool,
    /// Drop the interface: scattering by the obstacle alone in a homogeneous
    /// medium of wave number `k₁`.
    pub obstacle_only: bool,
}

/// Where an obstacle node enters the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Patch {
    Conducting(usize),
    Impedance(usize),
}

/// Discretization data shared by the assembly and the solutions built from it.
pub struct Discretization<T: Real> {
    pub disc: DiscreteScene<T>,
    pub options: Options,
    pub layout: Layout,
    pub l_max: usize,
    pub src0: Arc<SurfaceSource<T>>,
    pub src1: Arc<SurfaceSource<T>>,
    pub sp0: SpectralSpace<T>,
    pub sp1: SpectralSpace<T>,
    pub(crate) consts: RowConsts<T>,
    pub(crate) patches: Vec<Patch>,
    fine: [OnceLock<Surface<T>>; 2],
}

impl<T: Real> Discretization<T> {
    pub fn new(disc: DiscreteScene<T>, options: Options) -> Result<Self, Error> {
        let p = disc.scene.order;
        let l_max = degree_for_order(p);
        let nt = tangential_count(l_max);
        let ns = sh_count(l_max);
        if options.obstacle_only {
            let m = &disc.scene.media;
            if (m.k1 - m.k0c()).norm() > lit::<T>(1e-12) * m.k0 {
                return Err(Error::InvalidMedium("the obstacle-only model needs k0 = k1".into()));
            }
        }
        let has_g1 = !disc.gamma1.is_empty() || options.keep_empty_blocks;
        let has_g2 = !disc.gamma2.is_empty() || options.keep_empty_blocks;
        let mut groups = Vec::new();
        if !options.obstacle_only {
            groups.extend([Group::A, Group::B]);
        }
        if has_g1 {
            groups.extend([Group::C, Group::Wc]);
        }
        if has_g2 {
            groups.extend([Group::D, Group::Wd, Group::Psi]);
        }
        let layout = Layout::new(nt, ns, &groups);
        let src0 = Arc::new(SurfaceSource::new(disc.scene.interface.clone(), p, l_max, false));
        let src1 = Arc::new(SurfaceSource::new(disc.scene.obstacle.clone(), p, l_max, has_g2));
        let sp0 = SpectralSpace::new(&disc.s0, l_max);
        let sp1 = SpectralSpace::new(&disc.s1, l_max);
        let consts = RowConsts::new(&disc.scene.media, disc.scene.partition.impedance);
        let mut patches = vec![Patch::Conducting(0); disc.s1.len()];
        for (j, &n) in disc.gamma1.iter().enumerate() {
            patches[n] = Patch::Conducting(j);
        }
        for (j, &n) in disc.gamma2.iter().enumerate() {
            patches[n] = Patch::Impedance(j);
        }
        Ok(Self { disc, options, layout, l_max, src0, src1, sp0, sp1, consts, patches, fine: Default::default() })
    }

    /// Sizes of the five nodal blocks.
    pub fn block_sizes(&self) -> [usize; 5] {
        let n0 = if self.options.obstacle_only { 0 } else { 3 * self.disc.s0.len() };
        let (g1, g2) = (self.disc.gamma1.len(), self.disc.gamma2.len());
        [n0, n0, 3 * g1, 3 * g2, g2]
    }

    pub fn diagonal(&self) -> [Complex<T>; 5] {
        self.consts.diagonal()
    }

    /// Evaluation grid of the interface (0) or obstacle (1), built on first use.
    pub fn fine_surface(&self, which: usize) -> Result<&Surface<T>, Error> {
        if let Some(s) = self.fine[which].get() {
            return Ok(s);
        }
        let base = if which == 0 { &self.disc.s0 } else { &self.disc.s1 };
        let s = base.evaluation_grid()?;
        Ok(self.fine[which].get_or_init(|| s))
    }

    pub fn wavenumbers(&self) -> (Complex<T>, Complex<T>) {
        (self.consts.k0, self.consts.k1)
    }

    pub fn impedance(&self) -> T {
        self.consts.lam.re
    }

    /// Tangential (`3 x n_tan`) and scalar (`1 x n_scal`) bases of degree `l` at a
    /// parameter point of the interface (0) or obstacle (1).
    pub(crate) fn bases_at(&self, which: usize, s: V3<T>, l: usize) -> (CMat<T>, CMat<T>) {
        let src = if which == 0 { &self.src0 } else { &self.src1 };
        let pg = src.geometry(s);
        let nt = tangential_count(l);
        let ns = sh_count(l);
        let mut ev = crate::special::ShEvaluator::new(l);
        let mut tan = vec![[T::zero(); 3]; nt];
        let mut scal = vec![T::zero(); ns];
        eval_weighted_basis(&mut ev, s, &pg.dx, &mut tan, &mut scal);
        let mut tb = CMat::zeros(3, nt);
        for (k, v) in tan.iter().enumerate() {
            for a in 0..3 {
                tb.set(a, k, Complex::new(v[a] / pg.jac, T::zero()));
            }
        }
        let sb = CMat::from_vec(1, ns, scal.iter().map(|v| Complex::new(*v / pg.jac, T::zero())).collect());
        (tb, sb)
    }

    /// Interface rows at parameter `s` (`6 x n`) with the target geometry.
    pub(crate) fn interface_rows_at(&self, s: V3<T>) -> Result<(V3<T>, V3<T>, CMat<T>), Error> {
        let (k0, k1) = self.wavenumbers();
        let mut scratch = self.src0.scratch();
        let (pg, b0) = self.src0.on_surface_banks(&mut scratch, s, &[k0, k1]);
        let b1 = self.src1.off_surface_banks(pg.x, &[k1])?;
        Ok((pg.x, pg.normal, interface_rows(&self.consts, &self.layout, pg.normal, &b0[0], &b0[1], &b1[0])))
    }

    /// Obstacle rows at parameter `s`: three conducting rows or four impedance rows.
    pub(crate) fn obstacle_rows_at(&self, s: V3<T>, conducting: bool) -> Result<(V3<T>, V3<T>, CMat<T>), Error> {
        let (_, k1) = self.wavenumbers();
        let mut scratch = self.src1.scratch();
        let (pg, b1) = self.src1.on_surface_banks(&mut scratch, s, &[k1]);
        let b0 = if self.options.obstacle_only { None } else { Some(self.src0.off_surface_banks(pg.x, &[k1])?) };
        let b0 = b0.as_ref().map(|b| &b[0]);
        let rows = if conducting {
            conducting_rows(&self.consts, &self.layout, pg.normal, &b1[0], b0)
        } else {
            let interp = tangential_basis(&self.src1, s, &pg.dx, pg.jac);
            impedance_rows(&self.consts, &self.layout, pg.normal, &b1[0], b0, &interp)
        };
        Ok((pg.x, pg.normal, rows))
    }
}

fn tangential_basis<T: Real>(src: &SurfaceSource<T>, s: V3<T>, dx: &[[T; 3]; 3], jac: T) -> CMat<T> {
    let l = src.l_max();
    let nt = tangential_count(l);
    let mut ev = crate::special::ShEvaluator::new(l);
    let mut tan = vec![[T::zero(); 3]; nt];
    let mut scal = vec![T::zero(); sh_count(l)];
    eval_weighted_basis(&mut ev, s, dx, &mut tan, &mut scal);
    let mut out = CMat::zeros(3, nt);
    for (k, v) in tan.iter().enumerate() {
        for a in 0..3 {
            out.set(a, k, Complex::new(v[a] / jac, T::zero()));
        }
    }
    out
}

/// Timing and conditioning of an assembled system.
#[derive(Clone, Debug)]
pub struct AssemblyInfo {
    pub unknowns: usize,
    pub nodal_unknowns: usize,
    pub assembly_seconds: f64,
    pub factor_seconds: f64,
    pub condition: f64,
    pub warnings: Vec<String>,
}

/// Assembled and factored system for one scene.
pub struct Assembly<T: Real> {
    pub shared: Arc<Discretization<T>>,
    /// Row blocks `A_r` (nodal rows x coefficients).
    pub(crate) a: [CMat<T>; 5],
    pub(crate) bmaps: Vec<(Group, RMat<T>)>,
    pub(crate) z: CMat<T>,
    lu: Lu<T>,
    pub info: AssemblyInfo,
}

/// `B` restricted to the nodes `idx`: columns `3j + i` of `proj` for node `idx[j]`.
fn restrict_tangential<T: Real>(proj: &RMat<T>, idx: &[usize]) -> RMat<T> {
    let mut out = RMat::zeros(proj.rows(), 3 * idx.len());
    for k in 0..proj.rows() {
        let src = proj.row(k);
        let dst = out.row_mut(k);
        for (j, &n) in idx.iter().enumerate() {
            dst[3 * j..3 * j + 3].copy_from_slice(&src[3 * n..3 * n + 3]);
        }
    }
    out
}

fn restrict_scalar<T: Real>(proj: &RMat<T>, idx: &[usize]) -> RMat<T> {
    let mut out = RMat::zeros(proj.rows(), idx.len());
    for k in 0..proj.rows() {
        for (j, &n) in idx.iter().enumerate() {
            out.set(k, j, proj.get(k, n));
        }
    }
    out
}

/// Coefficient map of `u ↦ ν × Ŝ²u` on the patch `idx`, given the restricted projection `b`.
fn smoothed_map<T: Real>(b: &RMat<T>, surface: &Surface<T>, idx: &[usize], shat: &RMat<T>) -> RMat<T> {
    let m = idx.len();
    let s2 = shat.matmul(shat);
    let nt = b.rows();
    let mut out = RMat::zeros(nt, 3 * m);
    for i in 0..3 {
        // q_i[k, j'] = Σ_a b[k, 3j'+a] (ν_{j'}×)[a][i]
        let mut q = RMat::zeros(nt, m);
        for (jp, &n) in idx.iter().enumerate() {
            let nx = cross_matrix(surface.normals[n]);
            for k in 0..nt {
                let row = b.row(k);
                let v = (0..3).fold(T::zero(), |acc, a| acc + row[3 * jp + a] * nx[a][i]);
                q.set(k, jp, v);
            }
        }
        let qs = q.matmul(&s2);
        for k in 0..nt {
            for j in 0..m {
                out.set(k, 3 * j + i, qs.get(k, j));
            }
        }
    }
    out
}

fn check_finite<T: Real>(m: &CMat<T>, block: &str) -> Result<(), Error> {
    if m.data().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(block.to_string()))
    }
}

impl<T: Real> Assembly<T> {
    pub fn new(disc: DiscreteScene<T>, options: Options) -> Result<Self, Error> {
        Self::from_shared(Arc::new(Discretization::new(disc, options)?))
    }

    pub fn from_shared(shared: Arc<Discretization<T>>) -> Result<Self, Error> {
        let t0 = Instant::now();
        let sh = &*shared;
        let ny = sh.layout.total();
        let sizes = sh.block_sizes();
        let mut a: [CMat<T>; 5] = sizes.map(|n| CMat::zeros(n, ny));

        if !sh.options.obstacle_only {
            let (k0, k1) = sh.wavenumbers();
            let s0 = &sh.disc.s0;
            let rows: Vec<Result<CMat<T>, Error>> = (0..s0.len())
                .into_par_iter()
                .map_init(
                    || sh.src0.scratch(),
                    |scratch, n| {
                        let (pg, b0) = sh.src0.on_surface_banks(scratch, s0.params[n], &[k0, k1]);
                        let b1 = sh.src1.off_surface_banks(pg.x, &[k1])?;
                        Ok(interface_rows(&sh.consts, &sh.layout, pg.normal, &b0[0], &b0[1], &b1[0]))
                    },
                )
                .collect();
            for (n, r) in rows.into_iter().enumerate() {
                let r = r?;
                for i in 0..3 {
                    a[0].row_mut(3 * n + i).copy_from_slice(r.row(i));
                    a[1].row_mut(3 * n + i).copy_from_slice(r.row(3 + i));
                }
            }
        }

        let s1 = &sh.disc.s1;
        let (_, k1) = sh.wavenumbers();
        let rows: Vec<Result<CMat<T>, Error>> = (0..s1.len())
            .into_par_iter()
            .map_init(
                || sh.src1.scratch(),
                |scratch, n| {
                    let s = s1.params[n];
                    let (pg, b1) = sh.src1.on_surface_banks(scratch, s, &[k1]);
                    let b0 = if sh.options.obstacle_only { None } else { Some(sh.src0.off_surface_banks(pg.x, &[k1])?) };
                    let b0 = b0.as_ref().map(|b| &b[0]);
                    Ok(match sh.patches[n] {
                        Patch::Conducting(_) => conducting_rows(&sh.consts, &sh.layout, pg.normal, &b1[0], b0),
                        Patch::Impedance(_) => {
                            let interp = tangential_basis(&sh.src1, s, &pg.dx, pg.jac);
                            impedance_rows(&sh.consts, &sh.layout, pg.normal, &b1[0], b0, &interp)
                        }
                    })
                },
            )
            .collect();
        for (n, r) in rows.into_iter().enumerate() {
            let r = r?;
            match sh.patches[n] {
                Patch::Conducting(j) => {
                    for i in 0..3 {
                        a[2].row_mut(3 * j + i).copy_from_slice(r.row(i));
                    }
                }
                Patch::Impedance(j) => {
                    for i in 0..3 {
                        a[3].row_mut(3 * j + i).copy_from_slice(r.row(i));
                    }
                    a[4].row_mut(j).copy_from_slice(r.row(3));
                }
            }
        }
        for (r, name) in a.iter().zip(["interface E", "interface H", "conducting", "impedance", "divergence"]) {
            check_finite(r, name)?;
        }

        let bmaps = Self::coefficient_maps(sh);
        let diag = sh.diagonal();
        let mut z = CMat::identity(ny);
        for (g, b) in &bmaps {
            let r = g.block();
            if b.cols() == 0 {
                continue;
            }
            let mut prod = b.matmul_c(&a[r]);
            prod.scale(Complex::new(T::one(), T::zero()) / diag[r]);
            let range = sh.layout.range(*g).expect("group in layout");
            for (i, row) in range.enumerate() {
                for (o, v) in z.row_mut(row).iter_mut().zip(prod.row(i)) {
                    *o = *o + *v;
                }
            }
        }
        check_finite(&z, "reduced")?;
        let assembly_seconds = t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let znorm: T = z.norm1();
        let lu: Lu<T> = Lu::factor(z.clone())?;
        let cond: T = znorm * lu.inverse_norm1_estimate();
        let condition = cond.to_f64().unwrap_or(f64::INFINITY);
        let factor_seconds = t1.elapsed().as_secs_f64();
        if !(condition <= tolerances::MAX_CONDITION) {
            return Err(Error::SingularSystem { condition });
        }
        let mut warnings = Vec::new();
        if condition > tolerances::CONDITION_WARNING {
            warnings.push(format!("condition estimate {condition:.3e} suggests a near-resonant frequency"));
        }
        let info = AssemblyInfo {
            unknowns: ny,
            nodal_unknowns: sizes.iter().sum(),
            assembly_seconds,
            factor_seconds,
            condition,
            warnings,
        };
        Ok(Self { shared, a, bmaps, z, lu, info })
    }

    fn coefficient_maps(sh: &Discretization<T>) -> Vec<(Group, RMat<T>)> {
        let d = &sh.disc;
        let mut maps = Vec::new();
        for g in sh.layout.groups() {
            let m = match g {
                Group::A | Group::B => sh.sp0.tan_proj.clone(),
                Group::C => restrict_tangential(&sh.sp1.tan_proj, &d.gamma1),
                Group::D => restrict_tangential(&sh.sp1.tan_proj, &d.gamma2),
                Group::Wc | Group::Wd => {
                    let idx = if g == Group::Wc { &d.gamma1 } else { &d.gamma2 };
                    let b = restrict_tangential(&sh.sp1.tan_proj, idx);
                    if idx.is_empty() {
                        b
                    } else {
                        let shat = shat_matrix(&sh.src1, &d.s1, &sh.sp1, idx);
                        smoothed_map(&b, &d.s1, idx, &shat)
                    }
                }
                Group::Psi => restrict_scalar(&sh.sp1.scal_proj, &d.gamma2),
            };
            maps.push((g, m));
        }
        maps
    }

    pub fn layout(&self) -> &Layout {
        &self.shared.layout
    }

    /// Reduced system matrix.
    pub fn reduced_matrix(&self) -> &CMat<T> {
        &self.z
    }

    /// Row block `r` of the nodal system.
    pub fn row_block(&self, r: usize) -> &CMat<T> {
        &self.a[r]
    }

    /// Coefficient map of a group, if present.
    pub fn coefficient_map(&self, g: Group) -> Option<&RMat<T>> {
        self.bmaps.iter().find(|(h, _)| *h == g).map(|(_, m)| m)
    }

    /// Solves for nodal right-hand sides `f` (one vector per block).
    ///
    /// Returns the coefficients, nodal unknowns and relative residual of the reduced system.
    pub fn solve_blocks(&self, f: &[Vec<Complex<T>>; 5]) -> Result<(Vec<Complex<T>>, [Vec<Complex<T>>; 5], T), Error> {
        let sizes = self.shared.block_sizes();
        for r in 0..5 {
            if f[r].len() != sizes[r] {
                return Err(Error::DimensionMismatch(format!(
                    "right-hand side block {} has {} entries, expected {}",
                    r + 1,
                    f[r].len(),
                    sizes[r]
                )));
            }
        }
        let diag = self.shared.diagonal();
        let ny = self.shared.layout.total();
        let mut rhs = vec![Complex::new(T::zero(), T::zero()); ny];
        for (g, b) in &self.bmaps {
            let r = g.block();
            if b.cols() == 0 {
                continue;
            }
            let fr: Vec<Complex<T>> = f[r].iter().map(|v| *v / diag[r]).collect();
            let part = crate::geometry::spectral::apply_real(b, &fr);
            let range = self.shared.layout.range(*g).expect("group in layout");
            for (o, v) in rhs[range].iter_mut().zip(part) {
                *o = *o + v;
            }
        }
        let y = self.lu.solve(&rhs);
        let zy = self.z.apply(&y);
        let rn = norm(&rhs);
        let dn = zy.iter().zip(&rhs).map(|(a, b)| (*a - *b).norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
        let residual = if rn > T::zero() { dn / rn } else { dn };
        let u = std::array::from_fn(|r| {
            let ay = self.a[r].apply(&y);
            f[r].iter().zip(ay).map(|(fv, av)| (*fv - av) / diag[r]).collect()
        });
        Ok((y, u, residual))
    }
}

pub(crate) fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
}
