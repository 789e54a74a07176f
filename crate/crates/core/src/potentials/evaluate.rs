//! Potentials of given densities at points off the source surface and in the far field.

use std::sync::{Arc, OnceLock};

use num_complex::Complex;

use crate::error::Error;
use crate::fields::phi_g;
use crate::geometry::divergence_map;
use crate::geometry::spectral::apply_real;
use crate::potentials::grid::{SourceGrid, SurfaceSource};
use crate::scalar::{lit, Real};
use crate::vec3::{self, C3, V3};

/// Potentials of one tangential density `a`.
#[derive(Clone, Copy, Debug)]
pub struct TanPotentials<T> {
    /// `∫ Φ a`.
    pub v: C3<T>,
    /// `curl ∫ Φ a`.
    pub curl: C3<T>,
    /// `∇ div ∫ Φ a`, equal to `∫ ∇_x Φ Div a`.
    pub grad_div: C3<T>,
    /// `div ∫ Φ a`.
    pub div: Complex<T>,
}

impl<T: Real> TanPotentials<T> {
    /// `curl curl ∫ Φ a`.
    pub fn curlcurl(&self, k: Complex<T>) -> C3<T> {
        vec3::cadd(vec3::cscale(k * k, self.v), self.grad_div)
    }
}

/// Potentials of one scalar density `σ`.
#[derive(Clone, Copy, Debug)]
pub struct ScalPotentials<T> {
    /// `∫ Φ σ`.
    pub s: Complex<T>,
    /// `∇ ∫ Φ σ`.
    pub grad: C3<T>,
    /// `∫ ν Φ σ`.
    pub ns: C3<T>,
    /// `curl ∫ ν Φ σ`.
    pub curl_ns: C3<T>,
    /// `div ∫ ν Φ σ`.
    pub div_ns: Complex<T>,
}

/// Far-field integrals `(1/4π) ∫ e^{-ik x̂·y} (·) ds(y)`.
#[derive(Clone, Debug)]
pub struct FarIntegrals<T> {
    pub tan: Vec<C3<T>>,
    pub scal: Vec<Complex<T>>,
    pub nscal: Vec<C3<T>>,
}

struct Table<T> {
    tan: Vec<Vec<C3<T>>>,
    div: Vec<Vec<Complex<T>>>,
    scal: Vec<Vec<Complex<T>>>,
}

/// Densities on a source surface, given by spectral coefficients.
pub struct DensitySource<T: Real> {
    source: Arc<SurfaceSource<T>>,
    tan: Vec<Vec<Complex<T>>>,
    scal: Vec<Vec<Complex<T>>>,
    tables: [OnceLock<Table<T>>; 2],
}

fn weighted_sum<T: Real>(basis: &[T], cols: usize, coef: &[Complex<T>], stride: usize, comp: usize) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (k, c) in coef.iter().enumerate() {
        acc = acc + *c * basis[stride * k + comp];
    }
    debug_assert!(cols >= stride * coef.len());
    acc
}

impl<T: Real> DensitySource<T> {
    pub fn new(source: Arc<SurfaceSource<T>>, tan: Vec<Vec<Complex<T>>>, scal: Vec<Vec<Complex<T>>>) -> Self {
        Self { source, tan, scal, tables: [OnceLock::new(), OnceLock::new()] }
    }

    pub fn source(&self) -> &SurfaceSource<T> {
        &self.source
    }

    fn table(&self, level: usize) -> Result<(&SourceGrid<T>, &Table<T>), Error> {
        let (_, grid) = self.source.grid(level)?;
        let t = self.tables[level].get_or_init(|| self.build_table(grid));
        Ok((grid, t))
    }

    fn build_table(&self, grid: &SourceGrid<T>) -> Table<T> {
        let n = grid.len();
        let nt = grid.n_tan;
        let ns = grid.n_scal;
        let dmap = divergence_map::<T>(self.source.l_max());
        let mut tan = Vec::new();
        let mut div = Vec::new();
        for coef in &self.tan {
            let dcoef = apply_real(&dmap, coef);
            let mut tv = Vec::with_capacity(n);
            let mut dv = Vec::with_capacity(n);
            for q in 0..n {
                let row = &grid.tan[q * 3 * nt..(q + 1) * 3 * nt];
                tv.push([0, 1, 2].map(|i| weighted_sum(row, 3 * nt, coef, 3, i)));
                let srow = &grid.scal[q * ns..(q + 1) * ns];
                dv.push(weighted_sum(srow, ns, &dcoef, 1, 0));
            }
            tan.push(tv);
            div.push(dv);
        }
        let scal = self
            .scal
            .iter()
            .map(|coef| (0..n).map(|q| weighted_sum(&grid.scal[q * ns..(q + 1) * ns], ns, coef, 1, 0)).collect())
            .collect();
        Table { tan, div, scal }
    }

    /// Potentials at an off-surface point with wave number `k`.
    pub fn at(&self, x: V3<T>, k: Complex<T>) -> Result<(Vec<TanPotentials<T>>, Vec<ScalPotentials<T>>), Error> {
        let level = self.source.level_for(x)?;
        let (grid, table) = self.table(level)?;
        let z = vec3::czero::<T>();
        let zc = Complex::new(T::zero(), T::zero());
        let mut tp = vec![TanPotentials { v: z, curl: z, grad_div: z, div: zc }; self.tan.len()];
        let mut sp = vec![ScalPotentials { s: zc, grad: z, ns: z, curl_ns: z, div_ns: zc }; self.scal.len()];
        for (q, y) in grid.points.iter().enumerate() {
            let d = vec3::sub(x, *y);
            let r = vec3::norm(d);
            if r == T::zero() {
                return Err(Error::NearSurface { surface: "source", distance: 0.0, required: 0.0 });
            }
            let (phi, g) = phi_g(k, r);
            let grad = vec3::rscale(g, d);
            for (j, p) in tp.iter_mut().enumerate() {
                let a = table.tan[j][q];
                p.v = vec3::cadd(p.v, vec3::cscale(phi, a));
                p.curl = vec3::cadd(p.curl, vec3::ccross(grad, a));
                p.grad_div = vec3::cadd(p.grad_div, vec3::cscale(table.div[j][q], grad));
                p.div = p.div + vec3::cdot(grad, a);
            }
            let nu = grid.normals[q];
            for (j, p) in sp.iter_mut().enumerate() {
                let s = table.scal[j][q];
                let ns = vec3::rscale(s, nu);
                p.s = p.s + phi * s;
                p.grad = vec3::cadd(p.grad, vec3::cscale(s, grad));
                p.ns = vec3::cadd(p.ns, vec3::cscale(phi, ns));
                p.curl_ns = vec3::cadd(p.curl_ns, vec3::ccross(grad, ns));
                p.div_ns = p.div_ns + vec3::cdot(grad, ns);
            }
        }
        Ok((tp, sp))
    }

    /// Far-field integrals in direction `xhat`.
    pub fn far(&self, xhat: V3<T>, k: Complex<T>) -> Result<FarIntegrals<T>, Error> {
        let (grid, table) = self.table(0)?;
        let z = vec3::czero::<T>();
        let mut out = FarIntegrals {
            tan: vec![z; self.tan.len()],
            scal: vec![Complex::new(T::zero(), T::zero()); self.scal.len()],
            nscal: vec![z; self.scal.len()],
        };
        let inv4pi = T::one() / (lit::<T>(4.0) * T::PI());
        let mik = -Complex::<T>::i() * k;
        for (q, y) in grid.points.iter().enumerate() {
            let e = (mik * vec3::dot(xhat, *y)).exp() * inv4pi;
            for (j, o) in out.tan.iter_mut().enumerate() {
                *o = vec3::cadd(*o, vec3::cscale(e, table.tan[j][q]));
            }
            for (j, o) in out.scal.iter_mut().enumerate() {
                *o = *o + e * table.scal[j][q];
                out.nscal[j] = vec3::cadd(out.nscal[j], vec3::rscale(e * table.scal[j][q], grid.normals[q]));
            }
        }
        Ok(out)
    }
}
