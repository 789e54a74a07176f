//! Layer potentials of every basis density at one target point.

use num_complex::Complex;

use crate::fields::phi_g;
use crate::linalg::CMat;
use crate::potentials::grid::SourceGrid;
use crate::scalar::Real;
use crate::vec3::{self, V3};

/// Row offsets in [`Bank::tan`].
pub mod tan_row {
    /// `∫ Φ a`, three rows.
    pub const SLV: usize = 0;
    /// `∫ ∇_x Φ × a`, three rows.
    pub const CURL: usize = 3;
    /// `∫ ∇_x Φ · a`.
    pub const DIV: usize = 6;
    pub const COUNT: usize = 7;
}

/// Row offsets in [`Bank::scal`].
pub mod scal_row {
    /// `∫ Φ σ`.
    pub const SLS: usize = 0;
    /// `∫ ∇_x Φ σ`, three rows.
    pub const GSL: usize = 1;
    /// `∫ ν_y Φ σ`, three rows.
    pub const NSL: usize = 4;
    /// `∫ ∇_x Φ × ν_y σ`, three rows.
    pub const CURLN: usize = 7;
    /// `∫ ∂_{ν_y} Φ σ`.
    pub const DBL: usize = 10;
    pub const COUNT: usize = 11;
}

/// Potentials of all basis densities of one source surface at one target, one wave number.
#[derive(Clone, Debug)]
pub struct Bank<T> {
    pub k: Complex<T>,
    /// `tan_row::COUNT x n_tan`.
    pub tan: CMat<T>,
    /// `scal_row::COUNT x n_scal`; rows from `NSL` on are zero without the normal basis.
    pub scal: CMat<T>,
}

/// `out += rows · basis` for row-major buffers.
fn gemm_acc<T: Real>(rows: &[T], m: usize, n: usize, basis: &[T], cols: usize, out: &mut [T]) {
    if n == 0 || cols == 0 {
        return;
    }
    debug_assert_eq!(out.len(), m * cols);
    // SAFETY: row-major contiguous buffers of the stated sizes.
    unsafe {
        T::gemm(
            m,
            n,
            cols,
            T::one(),
            rows.as_ptr(),
            n as isize,
            1,
            basis.as_ptr(),
            cols as isize,
            1,
            T::one(),
            out.as_mut_ptr(),
            cols as isize,
            1,
        );
    }
}

/// Accumulates kernel-weighted basis sums over source grids given in pieces.
pub struct BankAccumulator<T> {
    ks: Vec<Complex<T>>,
    nt: usize,
    ns: usize,
    ot: Vec<T>,
    os: Vec<T>,
    on: Option<Vec<T>>,
    rows: Vec<T>,
}

impl<T: Real> BankAccumulator<T> {
    pub fn new(ks: &[Complex<T>], n_tan: usize, n_scal: usize, normal_basis: bool) -> Self {
        let m = 8 * ks.len();
        Self {
            ks: ks.to_vec(),
            nt: n_tan,
            ns: n_scal,
            ot: vec![T::zero(); m * 3 * n_tan],
            os: vec![T::zero(); m * n_scal],
            on: if normal_basis { Some(vec![T::zero(); m * 3 * n_scal]) } else { None },
            rows: Vec::new(),
        }
    }

    /// Adds the contribution of `grid` at target `x`. Source nodes coinciding with `x`
    /// are skipped.
    pub fn add(&mut self, grid: &SourceGrid<T>, x: V3<T>) {
        let n = grid.len();
        let m = 8 * self.ks.len();
        self.rows.clear();
        self.rows.resize(m * n, T::zero());
        let rows = &mut self.rows;
        for (q, y) in grid.points.iter().enumerate() {
            let d = vec3::sub(x, *y);
            let r = vec3::norm(d);
            if r == T::zero() {
                continue;
            }
            for (j, k) in self.ks.iter().enumerate() {
                let (p, g) = phi_g(*k, r);
                let base = 8 * j;
                rows[base * n + q] = p.re;
                rows[(base + 1) * n + q] = p.im;
                for c in 0..3 {
                    let v = g * d[c];
                    rows[(base + 2 + 2 * c) * n + q] = v.re;
                    rows[(base + 3 + 2 * c) * n + q] = v.im;
                }
            }
        }
        gemm_acc(rows, m, n, &grid.tan, 3 * self.nt, &mut self.ot);
        gemm_acc(rows, m, n, &grid.scal, self.ns, &mut self.os);
        if let Some(on) = &mut self.on {
            assert!(grid.has_normal_basis(), "normal basis required");
            gemm_acc(rows, m, n, &grid.nscal, 3 * self.ns, on);
        }
    }

    pub fn finish(self) -> Vec<Bank<T>> {
        let (nt, ns) = (self.nt, self.ns);
        let (ot, os, on) = (self.ot, self.os, self.on);
        let cx = |buf: &[T], cols: usize, row: usize, col: usize| Complex::new(buf[row * cols + col], buf[(row + 1) * cols + col]);
        self.ks
            .iter()
            .enumerate()
            .map(|(j, k)| {
                let b = 8 * j;
                let mut tan = CMat::zeros(tan_row::COUNT, nt);
                for col in 0..nt {
                    let mut gt = [[Complex::new(T::zero(), T::zero()); 3]; 3];
                    for a in 0..3 {
                        tan.set(tan_row::SLV + a, col, cx(&ot, 3 * nt, b, 3 * col + a));
                        for l in 0..3 {
                            gt[a][l] = cx(&ot, 3 * nt, b + 2 + 2 * a, 3 * col + l);
                        }
                    }
                    tan.set(tan_row::CURL, col, gt[1][2] - gt[2][1]);
                    tan.set(tan_row::CURL + 1, col, gt[2][0] - gt[0][2]);
                    tan.set(tan_row::CURL + 2, col, gt[0][1] - gt[1][0]);
                    tan.set(tan_row::DIV, col, gt[0][0] + gt[1][1] + gt[2][2]);
                }
                let mut scal = CMat::zeros(scal_row::COUNT, ns);
                for col in 0..ns {
                    scal.set(scal_row::SLS, col, cx(&os, ns, b, col));
                    for a in 0..3 {
                        scal.set(scal_row::GSL + a, col, cx(&os, ns, b + 2 + 2 * a, col));
                    }
                    if let Some(on) = &on {
                        let mut gn = [[Complex::new(T::zero(), T::zero()); 3]; 3];
                        for a in 0..3 {
                            scal.set(scal_row::NSL + a, col, cx(on, 3 * ns, b, 3 * col + a));
                            for l in 0..3 {
                                gn[a][l] = cx(on, 3 * ns, b + 2 + 2 * a, 3 * col + l);
                            }
                        }
                        scal.set(scal_row::CURLN, col, gn[1][2] - gn[2][1]);
                        scal.set(scal_row::CURLN + 1, col, gn[2][0] - gn[0][2]);
                        scal.set(scal_row::CURLN + 2, col, gn[0][1] - gn[1][0]);
                        scal.set(scal_row::DBL, col, -(gn[0][0] + gn[1][1] + gn[2][2]));
                    }
                }
                Bank { k: *k, tan, scal }
            })
            .collect()
    }
}

/// Computes banks for all wave numbers in `ks` at target `x`.
///
/// Source nodes coinciding with `x` are skipped; callers guarantee that this never
/// happens for admissible targets.
pub fn banks<T: Real>(grid: &SourceGrid<T>, x: V3<T>, ks: &[Complex<T>]) -> Vec<Bank<T>> {
    let mut acc = BankAccumulator::new(ks, grid.n_tan, grid.n_scal, grid.has_normal_basis());
    acc.add(grid, x);
    acc.finish()
}
