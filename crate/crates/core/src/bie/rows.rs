//! Equation rows at one collocation or probe point, as linear maps of the coefficients.

use num_complex::Complex;

use crate::bie::layout::{Group, Layout};
use crate::linalg::CMat;
use crate::media::WaveNumbers;
use crate::potentials::{apply3, cross_matrix, p_matrix, r_matrix, Bank};
use crate::scalar::{lit, Real};
use crate::vec3::V3;

/// Constants shared by all rows.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RowConsts<T> {
    pub k0: Complex<T>,
    pub k1: Complex<T>,
    pub le: Complex<T>,
    pub lh: Complex<T>,
    pub lam: Complex<T>,
}

impl<T: Real> RowConsts<T> {
    pub fn new(media: &WaveNumbers<T>, lambda: T) -> Self {
        Self { k0: media.k0c(), k1: media.k1, le: media.lambda_e, lh: media.lambda_h, lam: Complex::new(lambda, T::zero()) }
    }

    /// Diagonal factors of the five equations.
    pub fn diagonal(&self) -> [Complex<T>; 5] {
        let i = Complex::<T>::i();
        let one = Complex::new(T::one(), T::zero());
        [
            self.le + self.lh * self.k0 / self.k1,
            -i * self.le * self.k0 - i * self.lh * self.k1,
            one,
            one,
            i * self.lam,
        ]
    }
}

fn c<T: Real>(x: f64) -> Complex<T> {
    Complex::new(lit(x), T::zero())
}

struct Rows<'a, T: Real> {
    out: CMat<T>,
    layout: &'a Layout,
}

impl<T: Real> Rows<'_, T> {
    fn put(&mut self, row0: usize, g: Group, alpha: Complex<T>, op: &CMat<T>) {
        let Some(r) = self.layout.range(g) else { return };
        debug_assert_eq!(op.cols(), r.len());
        for i in 0..op.rows() {
            let src = op.row(i);
            let dst = &mut self.out.row_mut(row0 + i)[r.clone()];
            for (o, v) in dst.iter_mut().zip(src) {
                *o = *o + alpha * *v;
            }
        }
    }
}

/// Rows of the two transmission equations at an interface point.
///
/// `b00`, `b01`: interface banks at `k₀`, `k₁` (singular rule); `b1`: obstacle bank at `k₁`.
/// Returns a `6 x n` block: three rows per equation.
pub(crate) fn interface_rows<T: Real>(
    k: &RowConsts<T>,
    layout: &Layout,
    nu: V3<T>,
    b00: &Bank<T>,
    b01: &Bank<T>,
    b1: &Bank<T>,
) -> CMat<T> {
    let i = Complex::<T>::i();
    let mut r = Rows { out: CMat::zeros(6, layout.total()), layout };
    let nx = cross_matrix(nu);
    let (mag00, mag01) = (b00.mag(nu), b01.mag(nu));
    let (efi00, efi01) = (b00.efi(nu), b01.efi(nu));
    let (mag1, efi1) = (b1.mag(nu), b1.efi(nu));
    let need_psi = layout.contains(Group::Psi);
    let (k0, k1, le, lh, lam) = (k.k0, k.k1, k.le, k.lh, k.lam);

    r.put(0, Group::A, lh * k0 / k1, &mag00);
    r.put(0, Group::A, -le, &mag01);
    r.put(0, Group::B, le, &efi00);
    r.put(0, Group::B, -le, &efi01);
    r.put(0, Group::C, -le, &mag1);
    r.put(0, Group::Wc, -le * i / (k1 * k1), &efi1);
    r.put(0, Group::D, c::<T>(-2.0) * le, &apply3(&nx, &b1.slv()));
    r.put(0, Group::Wd, -i * lam * le, &mag1);
    if need_psi {
        r.put(0, Group::Psi, c::<T>(-2.0) * le, &apply3(&nx, &b1.gsl()));
        r.put(0, Group::Psi, c::<T>(-2.0) * i * lam * le, &apply3(&nx, &b1.nsl()));
    }

    let f = lh / (i * k1);
    r.put(3, Group::A, f, &efi00);
    r.put(3, Group::A, -f, &efi01);
    r.put(3, Group::B, le * k0 / i, &mag00);
    r.put(3, Group::B, -lh * k1 / i, &mag01);
    r.put(3, Group::C, -f, &efi1);
    r.put(3, Group::Wc, -lh / k1, &mag1);
    r.put(3, Group::D, i * lh / k1, &mag1);
    r.put(3, Group::Wd, -lam * lh / k1, &efi1);
    if need_psi {
        r.put(3, Group::Psi, c::<T>(-2.0) * lam * lh / k1, &apply3(&nx, &b1.curln()));
    }
    r.out
}

/// Rows of the conducting condition at a point of `Γ₁` (`3 x n`).
///
/// `b1`: obstacle bank at `k₁` (singular rule); `b0`: interface bank at `k₁`, absent
/// when the interface is not part of the model.
pub(crate) fn conducting_rows<T: Real>(
    k: &RowConsts<T>,
    layout: &Layout,
    nu: V3<T>,
    b1: &Bank<T>,
    b0: Option<&Bank<T>>,
) -> CMat<T> {
    let i = Complex::<T>::i();
    let one = c::<T>(1.0);
    let two = c::<T>(2.0);
    let mut r = Rows { out: CMat::zeros(3, layout.total()), layout };
    let nx = cross_matrix(nu);
    let (k1, lam) = (k.k1, k.lam);
    if let Some(b0) = b0 {
        r.put(0, Group::A, one, &b0.mag(nu));
        r.put(0, Group::B, one, &b0.efi(nu));
    }
    let mag1 = b1.mag(nu);
    r.put(0, Group::C, one, &mag1);
    r.put(0, Group::Wc, i / (k1 * k1), &b1.efi(nu));
    r.put(0, Group::D, two, &apply3(&nx, &b1.slv()));
    r.put(0, Group::Wd, i * lam, &mag1);
    if layout.contains(Group::Psi) {
        r.put(0, Group::Psi, two, &apply3(&nx, &b1.gsl()));
        r.put(0, Group::Psi, two * i * lam, &apply3(&nx, &b1.nsl()));
    }
    r.out
}

/// Rows of the impedance condition (scaled by `ik₁`) and of `div F = 0` at a
/// point of `Γ₂` (`4 x n`).
///
/// `interp` holds the tangential basis at the target (`3 x n_tan`).
pub(crate) fn impedance_rows<T: Real>(
    k: &RowConsts<T>,
    layout: &Layout,
    nu: V3<T>,
    b1: &Bank<T>,
    b0: Option<&Bank<T>>,
    interp: &CMat<T>,
) -> CMat<T> {
    let i = Complex::<T>::i();
    let one = c::<T>(1.0);
    let two = c::<T>(2.0);
    let mut r = Rows { out: CMat::zeros(4, layout.total()), layout };
    let rm = r_matrix(nu);
    let pm = p_matrix(nu);
    let (k1, lam) = (k.k1, k.lam);
    if let Some(b0) = b0 {
        let (mag0, efi0) = (b0.mag(nu), b0.efi(nu));
        r.put(0, Group::A, one, &efi0);
        r.put(0, Group::A, -i * lam, &apply3(&rm, &mag0));
        r.put(0, Group::B, k1 * k1, &mag0);
        r.put(0, Group::B, -i * lam, &apply3(&rm, &efi0));
    }
    let (mag1, efi1) = (b1.mag(nu), b1.efi(nu));
    let (rmag1, refi1) = (apply3(&rm, &mag1), apply3(&rm, &efi1));
    r.put(0, Group::C, one, &efi1);
    r.put(0, Group::C, -i * lam, &rmag1);
    r.put(0, Group::Wc, i, &mag1);
    r.put(0, Group::Wc, lam / (k1 * k1), &refi1);
    r.put(0, Group::D, one, &mag1);
    r.put(0, Group::D, -two * i * lam, &apply3(&pm, &b1.slv()));
    r.put(0, Group::Wd, i * lam, &efi1);
    r.put(0, Group::Wd, lam * lam, &rmag1);
    r.put(0, Group::Wd, lam * lam, &apply3(&rm, interp));
    if layout.contains(Group::Psi) {
        r.put(0, Group::Psi, two * i * lam, &b1.curln_difference(nu));
        r.put(0, Group::Psi, two * lam * lam, &apply3(&pm, &b1.nsl()));
        r.put(3, Group::Psi, two * k1 * k1, &b1.sls());
        r.put(3, Group::Psi, two * i * lam, &b1.dbl());
    }
    r.put(3, Group::D, -two, &b1.sls_div());
    r.out
}
