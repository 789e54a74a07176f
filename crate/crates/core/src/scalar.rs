//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All geometry, quadrature and operator code is written against [`Real`],
//! which is implemented for `f32` and `f64`. The dense matrix products are
//! routed through [`Real::gemm`] so each precision uses a tuned kernel.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by the solver.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Machine epsilon of the type.
    const EPS: Self;

    /// General strided product `C = alpha * A * B + beta * C`.
    ///
    /// `A` is `m x k`, `B` is `k x n`, `C` is `m x n`; strides are in elements.
    ///
    /// # Safety
    /// All pointers must be valid for the extents implied by the dimensions
    /// and strides, and `c` must not alias `a` or `b`.
    #[allow(clippy::too_many_arguments)]
    unsafe fn gemm(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    );
}

macro_rules! impl_real {
    ($t:ty, $gemm:path) => {
        impl Real for $t {
            const EPS: Self = <$t>::EPSILON;

            unsafe fn gemm(
                m: usize,
                k: usize,
                n: usize,
                alpha: Self,
                a: *const Self,
                rsa: isize,
                csa: isize,
                b: *const Self,
                rsb: isize,
                csb: isize,
                beta: Self,
                c: *mut Self,
                rsc: isize,
                csc: isize,
            ) {
                if m == 0 || n == 0 {
                    return;
                }
                $gemm(m, k, n, alpha, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc);
            }
        }
    };
}

impl_real!(f32, matrixmultiply::sgemm);
impl_real!(f64, matrixmultiply::dgemm);

/// Converts an `f64` literal into `T`.
#[inline(always)]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable")
}

/// Converts an integer into `T`.
#[inline(always)]
pub fn int<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("integer representable")
}

/// Complex number built from a real part.
#[inline(always)]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// The imaginary unit.
#[inline(always)]
pub fn im_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// Principal square root with the branch chosen so that `Re >= 0`,
/// and `Im >= 0` when the real part vanishes.
pub fn sqrt_upper<T: Real>(z: Complex<T>) -> Complex<T> {
    let s = z.sqrt();
    if s.re < T::zero() || (s.re == T::zero() && s.im < T::zero()) {
        -s
    } else {
        s
    }
}
