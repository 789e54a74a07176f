//! The smoothing operator `Ŝσ(x) = (1/2π) ∫_Γ σ(z)/|x − z| ds(z)` on a node subset.

use rayon::prelude::*;

use crate::geometry::{SpectralSpace, Surface};
use crate::linalg::RMat;
use crate::potentials::grid::SurfaceSource;
use crate::scalar::Real;
use crate::vec3;

/// Nodal matrix of `Ŝ` restricted to the nodes `idx` of `surface`, both as
/// integration patch and as targets.
///
/// Densities are projected on the scalar basis of `space` and integrated with the
/// singular rule of `src`.
pub fn shat_matrix<T: Real>(src: &SurfaceSource<T>, surface: &Surface<T>, space: &SpectralSpace<T>, idx: &[usize]) -> RMat<T> {
    let ns = space.n_scal();
    let m = idx.len();
    let mut sls = RMat::zeros(m, ns);
    let two_pi = T::PI() + T::PI();
    sls.data_mut().par_chunks_mut(ns).zip(idx.par_iter()).for_each_init(
        || src.scratch(),
        |scratch, (row, &t)| {
            let grid = src.singular_grid(scratch, surface.params[t]);
            let x = surface.points[t];
            for (q, y) in grid.points.iter().enumerate() {
                let r = vec3::norm(vec3::sub(x, *y));
                let f = T::one() / (two_pi * r);
                let basis = &grid.scal[q * ns..(q + 1) * ns];
                for (o, b) in row.iter_mut().zip(basis) {
                    *o = *o + f * *b;
                }
            }
        },
    );
    let mut proj = RMat::zeros(ns, m);
    for k in 0..ns {
        for (c, &n) in idx.iter().enumerate() {
            proj.set(k, c, space.scal_proj.get(k, n));
        }
    }
    sls.matmul(&proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{degree_for_order, Placement, Shape};

    #[test]
    fn constant_density_on_unit_sphere() {
        let p = 12;
        let pl = Placement::new(Shape::Sphere { radius: 1.0f64 }, [0.0; 3]);
        let s = Surface::new(pl.clone(), p).unwrap();
        let l = degree_for_order(p);
        let sp = SpectralSpace::new(&s, l);
        let src = SurfaceSource::new(pl, p, l, false);
        let idx: Vec<usize> = (0..s.len()).collect();
        let m = shat_matrix(&src, &s, &sp, &idx);
        for i in 0..s.len() {
            let v: f64 = m.row(i).iter().sum();
            assert!((v - 2.0).abs() < 1e-8, "{v}");
        }
    }
}
