//! Source quadrature grids carrying the weighted density bases.

use std::sync::OnceLock;

use num_complex::Complex;

use crate::error::Error;
use crate::geometry::spectral::{eval_weighted_basis, tangential_count};
use crate::geometry::{pole_rotation, GeomEvaluator, Placement, PointGeom, Surface};
use crate::potentials::bank::{banks, Bank, BankAccumulator};
use crate::scalar::{int, lit, Real};
use crate::special::{gauss_legendre, sh_count, ShEvaluator};
use crate::vec3::{self, V3};

/// Product rule in polar coordinates about the north pole:
/// Gauss-Legendre in `θ' ∈ (0, π)`, trapezoid in `φ'`, weights include `sin θ'`.
#[derive(Clone, Debug)]
pub struct PolarRule<T> {
    pub dirs: Vec<V3<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> PolarRule<T> {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (xs, ws) = gauss_legendre::<T>(n_theta);
        let half_pi = T::FRAC_PI_2();
        let dphi = lit::<T>(2.0) * T::PI() / int::<T>(n_phi);
        let mut dirs = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (x, w) in xs.iter().zip(&ws) {
            let th = half_pi * (*x + T::one());
            let (st, ct) = th.sin_cos();
            for j in 0..n_phi {
                let ph = dphi * int::<T>(j);
                let (sp, cp) = ph.sin_cos();
                dirs.push([st * cp, st * sp, ct]);
                weights.push(half_pi * *w * st * dphi);
            }
        }
        Self { dirs, weights }
    }
}

/// Quadrature nodes on a source surface together with the density bases
/// premultiplied by the `dŝ` weights.
///
/// Integrals `∫_S K(x,y) a(y) ds(y)` of a basis density become
/// `Σ_q K(x, y_q) tan[q, 3k+i]` with no further weights.
#[derive(Clone, Debug)]
pub struct SourceGrid<T> {
    pub points: Vec<V3<T>>,
    pub normals: Vec<V3<T>>,
    pub n_tan: usize,
    pub n_scal: usize,
    /// `w DX v_k`, row-major `n x 3 n_tan`, column `3k + i`.
    pub tan: Vec<T>,
    /// `w Y_k`, row-major `n x n_scal`.
    pub scal: Vec<T>,
    /// `w ν Y_k`, row-major `n x 3 n_scal`; empty unless requested.
    pub nscal: Vec<T>,
}

impl<T: Real> SourceGrid<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn has_normal_basis(&self) -> bool {
        !self.nscal.is_empty()
    }

    /// Builds the grid from parameter points and their `dŝ` weights.
    pub fn build(
        geom: &mut GeomEvaluator<'_, T>,
        ev: &mut ShEvaluator<T>,
        params: &[V3<T>],
        weights: &[T],
        l_max: usize,
        normal_basis: bool,
    ) -> Self {
        let n = params.len();
        let nt = tangential_count(l_max);
        let ns = sh_count(l_max);
        let mut g = Self {
            points: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            n_tan: nt,
            n_scal: ns,
            tan: vec![T::zero(); n * 3 * nt],
            scal: vec![T::zero(); n * ns],
            nscal: if normal_basis { vec![T::zero(); n * 3 * ns] } else { Vec::new() },
        };
        let mut tb = vec![[T::zero(); 3]; nt];
        let mut sb = vec![T::zero(); ns];
        for (q, (s, w)) in params.iter().zip(weights).enumerate() {
            let pg: PointGeom<T> = geom.eval(*s);
            eval_weighted_basis(ev, *s, &pg.dx, &mut tb, &mut sb);
            let row = &mut g.tan[q * 3 * nt..(q + 1) * 3 * nt];
            for k in 0..nt {
                for i in 0..3 {
                    row[3 * k + i] = *w * tb[k][i];
                }
            }
            let row = &mut g.scal[q * ns..(q + 1) * ns];
            for k in 0..ns {
                row[k] = *w * sb[k];
            }
            if normal_basis {
                let row = &mut g.nscal[q * 3 * ns..(q + 1) * 3 * ns];
                for k in 0..ns {
                    for i in 0..3 {
                        row[3 * k + i] = *w * sb[k] * pg.normal[i];
                    }
                }
            }
            g.points.push(pg.x);
            g.normals.push(pg.normal);
        }
        g
    }

    /// Grid of the rotated polar rule centered at parameter point `s`.
    pub fn rotated(
        geom: &mut GeomEvaluator<'_, T>,
        ev: &mut ShEvaluator<T>,
        rule: &PolarRule<T>,
        s: V3<T>,
        l_max: usize,
        normal_basis: bool,
    ) -> Self {
        let rot = pole_rotation(s);
        let params: Vec<V3<T>> = rule.dirs.iter().map(|d| vec3::matvec(&rot, *d)).collect();
        Self::build(geom, ev, &params, &rule.weights, l_max, normal_basis)
    }
}

/// A source surface with its singular rule and lazily built regular grids.
#[derive(Debug)]
pub struct SurfaceSource<T: Real> {
    placement: Placement<T>,
    order: usize,
    l_max: usize,
    normal_basis: bool,
    rule: PolarRule<T>,
    levels: [usize; 2],
    grids: [OnceLock<(Surface<T>, SourceGrid<T>)>; 2],
}

impl<T: Real> SurfaceSource<T> {
    /// `order` is the discretization order `p` of the surface; the singular rule
    /// uses `p x 2p` polar nodes and the regular grids orders `max(p, 24)` and
    /// `max(2p, 48)`.
    pub fn new(placement: Placement<T>, order: usize, l_max: usize, normal_basis: bool) -> Self {
        let q0 = order.max(24);
        let q1 = crate::geometry::eval_order(order).max(q0);
        Self {
            placement,
            order,
            l_max,
            normal_basis,
            rule: PolarRule::new(order, 2 * order),
            levels: [q0, q1],
            grids: [OnceLock::new(), OnceLock::new()],
        }
    }

    pub fn placement(&self) -> &Placement<T> {
        &self.placement
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn has_normal_basis(&self) -> bool {
        self.normal_basis
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Regular grid of the given level (0 coarse, 1 fine).
    pub fn grid(&self, level: usize) -> Result<&(Surface<T>, SourceGrid<T>), Error> {
        if let Some(g) = self.grids[level].get() {
            return Ok(g);
        }
        let q = self.levels[level];
        let surf = Surface::with_grid(self.placement.clone(), q, 2 * q)?;
        let grid = self.build_regular(&surf);
        Ok(self.grids[level].get_or_init(|| (surf, grid)))
    }

    fn build_regular(&self, surf: &Surface<T>) -> SourceGrid<T> {
        use rayon::prelude::*;
        let chunk = 256;
        let parts: Vec<SourceGrid<T>> = surf
            .params
            .par_chunks(chunk)
            .zip(surf.sphere_weights.par_chunks(chunk))
            .map(|(ps, ws)| {
                let mut ge = GeomEvaluator::new(&self.placement);
                let mut ev = ShEvaluator::new(self.l_max);
                SourceGrid::build(&mut ge, &mut ev, ps, ws, self.l_max, self.normal_basis)
            })
            .collect();
        let mut it = parts.into_iter();
        let mut g = it.next().expect("non-empty grid");
        for p in it {
            g.points.extend(p.points);
            g.normals.extend(p.normals);
            g.tan.extend(p.tan);
            g.scal.extend(p.scal);
            g.nscal.extend(p.nscal);
        }
        g
    }

    /// Grid level adequate for a target at `x` off the surface: the coarse grid when `x`
    /// is at least five of its spacings away, the fine grid otherwise.
    pub fn level_for(&self, x: V3<T>) -> Result<usize, Error> {
        let (surf, _) = self.grid(0)?;
        let (d, h) = surf.proximity(x);
        Ok(if d >= lit::<T>(5.0) * h { 0 } else { 1 })
    }

    /// Polar grid about the parameter point `s` (scratch evaluators supplied by the caller).
    pub fn singular_grid(&self, scratch: &mut Scratch<'_, T>, s: V3<T>) -> SourceGrid<T> {
        SourceGrid::rotated(&mut scratch.geom, &mut scratch.ev, &self.rule, s, self.l_max, self.normal_basis)
    }

    /// Per-thread evaluators for this surface.
    pub fn scratch(&self) -> Scratch<'_, T> {
        Scratch { geom: GeomEvaluator::new(&self.placement), ev: ShEvaluator::new(self.l_max) }
    }

    /// Banks at the surface point with parameter `s`, using the singular rule.
    ///
    /// The rotated rule is processed in blocks so that basis values stay in cache.
    pub fn on_surface_banks(
        &self,
        scratch: &mut Scratch<'_, T>,
        s: V3<T>,
        ks: &[Complex<T>],
    ) -> (PointGeom<T>, Vec<Bank<T>>) {
        const BLOCK: usize = 96;
        let pg = scratch.geom.eval(s);
        let rot = pole_rotation(s);
        let nt = tangential_count(self.l_max);
        let ns = sh_count(self.l_max);
        let mut acc = BankAccumulator::new(ks, nt, ns, self.normal_basis);
        let mut params = Vec::with_capacity(BLOCK);
        for (dirs, ws) in self.rule.dirs.chunks(BLOCK).zip(self.rule.weights.chunks(BLOCK)) {
            params.clear();
            params.extend(dirs.iter().map(|d| vec3::matvec(&rot, *d)));
            let grid = SourceGrid::build(&mut scratch.geom, &mut scratch.ev, &params, ws, self.l_max, self.normal_basis);
            acc.add(&grid, pg.x);
        }
        (pg, acc.finish())
    }

    /// Banks at a point off the surface, on the regular grid suited to its distance.
    pub fn off_surface_banks(&self, x: V3<T>, ks: &[Complex<T>]) -> Result<Vec<Bank<T>>, Error> {
        let level = self.level_for(x)?;
        let (_, grid) = self.grid(level)?;
        Ok(banks(grid, x, ks))
    }

    /// Geometry at a parameter point.
    pub fn geometry(&self, s: V3<T>) -> PointGeom<T> {
        GeomEvaluator::new(&self.placement).eval(s)
    }
}

/// Reusable evaluators for building polar grids.
pub struct Scratch<'a, T: Real> {
    pub geom: GeomEvaluator<'a, T>,
    pub ev: ShEvaluator<T>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_rule_integrates_sphere_polynomials() {
        let r = PolarRule::<f64>::new(12, 24);
        let area: f64 = r.weights.iter().sum();
        assert!((area - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let z2: f64 = r.dirs.iter().zip(&r.weights).map(|(d, w)| w * d[2] * d[2]).sum();
        assert!((z2 - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    }
}
