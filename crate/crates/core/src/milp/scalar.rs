//! Arithmetic used by the simplex method: exact rationals or tolerant floats.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::rational::{from_f64, to_f64, Rational};

pub trait Scalar: Clone + Debug + PartialOrd + Send + Sync + 'static {
    /// Whether comparisons are exact.
    const EXACT: bool;

    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn from_rational(v: &Rational) -> Self;
    fn to_rational(&self) -> Rational;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn eq_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;

    /// `self -= a * b`
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self = self.sub(&a.mul(b));
    }

    fn eq_one(&self) -> bool {
        self.sub(&Self::one_value()).eq_zero()
    }

    /// Comparison that treats values within the tolerance as equal.
    fn cmp_tol(&self, o: &Self) -> Ordering {
        let d = self.sub(o);
        if d.is_pos() {
            Ordering::Greater
        } else if d.is_neg() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn from_rational(v: &Rational) -> Self {
        v.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn eq_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn eq_one(&self) -> bool {
        One::is_one(self)
    }
    fn cmp_tol(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
}

/// Absolute tolerance of the floating-point mode.
pub const FLOAT_TOL: f64 = 1e-9;

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero_value() -> Self {
        0.0
    }
    fn one_value() -> Self {
        1.0
    }
    fn from_rational(v: &Rational) -> Self {
        to_f64(v)
    }
    fn to_rational(&self) -> Rational {
        from_f64(*self).unwrap_or_else(Zero::zero)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn eq_zero(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_TOL
    }
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
}
