//! Scalar abstraction: the one axis of genericity in this crate.
//!
//! Everything downstream (algebras, tensors, certificates) is generic over a
//! scalar type that is either the real line or the complex plane, both backed
//! by f64. Norm values, tolerances and certificate entries are always f64.

use nalgebra::ComplexField;
use num_complex::{Complex64, ComplexFloat};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

/// Which scalar field a computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarField {
    Real,
    Complex,
}

impl Display for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarField::Real => write!(f, "real"),
            ScalarField::Complex => write!(f, "complex"),
        }
    }
}

/// Scalar entries of algebra elements and tensor coefficients.
///
/// Implemented for `f64` (real mode) and `Complex64` (complex mode). The
/// `ComplexFloat` bound supplies num-traits arithmetic, `ComplexField` makes
/// nalgebra decompositions available on matrices of this type. Method-name
/// collisions between the two supertraits are avoided by going through the
/// helpers below in generic code.
pub trait Scalar:
    ComplexFloat<Real = f64>
    + ComplexField<RealField = f64>
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    const FIELD: ScalarField;

    /// Embed a real number.
    fn from_re(x: f64) -> Self;

    /// Build from real and imaginary parts. The real impl drops the
    /// imaginary part; callers that must reject a nonzero one check FIELD
    /// first.
    fn from_re_im(re: f64, im: f64) -> Self;

    /// Modulus |z|.
    fn mag(self) -> f64;

    /// Squared modulus, computed as re^2 + im^2 (no square root involved).
    fn mag_sq(self) -> f64;

    /// Complex conjugate (identity on reals).
    fn conj_s(self) -> Self;

    fn re_part(self) -> f64;
    fn im_part(self) -> f64;

    /// Exact zero test on the parts. Unlike `mag_sq() == 0.0` this cannot be
    /// fooled by squaring underflow on tiny values.
    fn is_zero_exact(self) -> bool {
        self.re_part() == 0.0 && self.im_part() == 0.0
    }
}

impl Scalar for f64 {
    const FIELD: ScalarField = ScalarField::Real;

    fn from_re(x: f64) -> Self {
        x
    }

    fn from_re_im(re: f64, _im: f64) -> Self {
        re
    }

    fn mag(self) -> f64 {
        self.abs()
    }

    fn mag_sq(self) -> f64 {
        self * self
    }

    fn conj_s(self) -> Self {
        self
    }

    fn re_part(self) -> f64 {
        self
    }

    fn im_part(self) -> f64 {
        0.0
    }
}

impl Scalar for Complex64 {
    const FIELD: ScalarField = ScalarField::Complex;

    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn from_re_im(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }

    fn mag(self) -> f64 {
        self.norm()
    }

    fn mag_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    fn conj_s(self) -> Self {
        Complex64::new(self.re, -self.im)
    }

    fn re_part(self) -> f64 {
        self.re
    }

    fn im_part(self) -> f64 {
        self.im
    }
}

/// True when every entry is exactly zero (no tolerance).
pub fn all_zero<S: Scalar>(v: &[S]) -> bool {
    v.iter().all(|x| x.is_zero_exact())
}

/// Largest modulus over a slice.
pub fn max_mag<S: Scalar>(v: &[S]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.mag()))
}
