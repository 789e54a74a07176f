use std::sync::Arc;

use num_complex::Complex64 as C;

use super::*;
use crate::geometry::spectral::apply_real;
use crate::geometry::{degree_for_order, tangential_count, Placement, Shape, SpectralSpace, Surface};
use crate::linalg::CMat;
use crate::special::{riccati_derivative, sh_index, spherical_hn1, spherical_jn, ShEvaluator};
use crate::vec3;

fn unit_sphere(p: usize) -> (Placement<f64>, Surface<f64>, usize) {
    let pl = Placement::new(Shape::Sphere { radius: 1.0 }, [0.0; 3]);
    let s = Surface::new(pl.clone(), p).unwrap();
    (pl, s, degree_for_order(p))
}

/// `X_lm = ŝ × ∇Y / √(l(l+1))`.
fn x_harmonic(l: usize, m: i64, s: [f64; 3]) -> [f64; 3] {
    let mut ev = ShEvaluator::new(l);
    ev.eval(s);
    let g = ev.grad[sh_index(l, m)];
    vec3::scale(1.0 / ((l * (l + 1)) as f64).sqrt(), vec3::cross(s, g))
}

fn zeta(l: usize, k: f64) -> (C, C, C, C) {
    let x = C::new(k, 0.0);
    let j = spherical_jn(l, x);
    let h = spherical_hn1(l, x);
    let zj = riccati_derivative(&j, x);
    let zh = riccati_derivative(&h, x);
    (j[l], h[l], zj[l], zh[l])
}

/// Nodal operator matrix `3N x n_tan` on the unit sphere for `f(bank, ν)`.
fn nodal_matrix(p: usize, k: f64, f: impl Fn(&Bank<f64>, [f64; 3]) -> CMat<f64>) -> (Surface<f64>, SpectralSpace<f64>, CMat<f64>) {
    let (pl, s, l) = unit_sphere(p);
    let sp = SpectralSpace::new(&s, l);
    let src = SurfaceSource::new(pl, p, l, false);
    let nt = tangential_count(l);
    let mut m = CMat::zeros(3 * s.len(), nt);
    let mut scratch = src.scratch();
    for t in 0..s.len() {
        let (pg, b) = src.on_surface_banks(&mut scratch, s.params[t], &[C::new(k, 0.0)]);
        let op = f(&b[0], pg.normal);
        for i in 0..3 {
            m.row_mut(3 * t + i).copy_from_slice(op.row(i));
        }
    }
    (s, sp, m)
}

#[test]
fn magnetic_operator_eigenvalue_on_unit_sphere() {
    let k = 1.3;
    let (l, mm) = (2usize, 1i64);
    let (s, _, m) = nodal_matrix(16, k, |b, nu| b.mag(nu));
    let col = 2 * (sh_index(l, mm) - 1) + 1;
    let (j, h, zj, zh) = zeta(l, k);
    let mu = -C::i() * k * k * (j * zh + h * zj);
    let mut err: f64 = 0.0;
    for t in 0..s.len() {
        let x = x_harmonic(l, mm, s.params[t]);
        for i in 0..3 {
            err = err.max((m.get(3 * t + i, col) - mu * x[i]).norm());
        }
    }
    assert!(err < 1e-8, "error {err:e}");
}

#[test]
fn operators_preserve_degree_on_sphere() {
    for which in 0..2 {
        let (_, sp, m) = nodal_matrix(16, 1.0, |b, nu| if which == 0 { b.mag(nu) } else { b.efi(nu) });
        let nt = sp.n_tan();
        let proj = sp.tan_proj.matmul_c(&m);
        for col in 0..nt {
            let lc = crate::geometry::spectral::tangential_degree(col);
            let (mut inside, mut outside) = (0.0, 0.0);
            for row in 0..nt {
                let v = proj.get(row, col).norm_sqr();
                if crate::geometry::spectral::tangential_degree(row) == lc {
                    inside += v;
                } else {
                    outside += v;
                }
            }
            assert!(outside <= 1e-12 * inside, "op {which} column {col}: leak {:e}", (outside / inside).sqrt());
        }
    }
}

#[test]
fn magnetic_potential_jump_across_sphere() {
    let p = 24;
    let k = 1.0;
    let (pl, _, l) = unit_sphere(p);
    let src = Arc::new(SurfaceSource::new(pl, p, l, false));
    let (ld, md) = (2usize, -1i64);
    let nt = tangential_count(l);
    let mut coef = vec![C::new(0.0, 0.0); nt];
    let col = 2 * (sh_index(ld, md) - 1) + 1;
    coef[col] = C::new(1.0, 0.0);
    let ds = DensitySource::new(src.clone(), vec![coef], vec![]);
    let (j1, h1, zj1, zh1) = zeta(ld, k);
    let mut scratch = src.scratch();
    for dir in [[0.3, 0.4, 0.5], [-0.7, 0.1, -0.2], [0.0, 0.1, 1.0]] {
        let sh = vec3::normalize(dir);
        let a = x_harmonic(ld, md, sh);
        let trace = |r: f64, zr: C, z1: C| {
            let (tp, _) = ds.at(vec3::scale(r, sh), C::new(k, 0.0)).unwrap();
            let v = vec3::rccross(sh, tp[0].curl);
            vec3::cscale(z1 / zr, v)
        };
        let re = 1.25;
        let ri = 0.75;
        let (_, _, _, zhe) = zeta(ld, k * re);
        let (_, _, zji, _) = zeta(ld, k * ri);
        let ext = trace(re, zhe, zh1);
        let int = trace(ri, zji, zj1);
        let jump = vec3::csub(ext, int);
        let err = vec3::cnorm(vec3::csub(jump, vec3::cfrom(a))) / vec3::norm(a);
        assert!(err < crate::tolerances::JUMP_RELATION, "jump error {err:e}");
        // exterior trace equals (M a + a)/2 from the singular rule
        let (pg, b) = src.on_surface_banks(&mut scratch, sh, &[C::new(k, 0.0)]);
        let mag = b[0].mag(pg.normal);
        let mut onsurf = [C::new(0.0, 0.0); 3];
        for i in 0..3 {
            onsurf[i] = (mag.get(i, col) + a[i]) * 0.5;
        }
        let err = vec3::cnorm(vec3::csub(onsurf, ext)) / vec3::norm(a);
        assert!(err < crate::tolerances::JUMP_RELATION, "trace error {err:e}");
        let _ = (j1, h1);
    }
}

#[test]
fn spectral_divergence_matches_bank_divergence() {
    // div ∫Φ a at an off-surface point, directly and through ∫ Φ Div a
    let p = 12;
    let (pl, _, l) = unit_sphere(p);
    let src = SurfaceSource::new(pl, p, l, false);
    let x = [0.2, -2.0, 0.7];
    let b = &src.off_surface_banks(x, &[C::new(0.8, 0.1)]).unwrap()[0];
    let dm = crate::geometry::divergence_map::<f64>(l);
    let nt = tangential_count(l);
    for col in [0, 1, 4, 9, nt - 2] {
        let mut e = vec![C::new(0.0, 0.0); nt];
        e[col] = C::new(1.0, 0.0);
        let dcoef = apply_real(&dm, &e);
        let via_div: C = (0..dcoef.len()).map(|i| b.sls().get(0, i) * dcoef[i]).sum();
        assert!((via_div - b.div().get(0, col)).norm() < 1e-10);
    }
}
