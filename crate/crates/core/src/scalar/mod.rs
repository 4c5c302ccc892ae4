//! Coefficient fields.
//!
//! All algebra in this crate is generic over [`Coefficient`]. The exact
//! workhorse is [`RatFunc`], rational functions in the formal parameters
//! `e1`, `e2`, `alpha`. [`BigRational`] covers numeric specialisations and
//! `f64` is available for quick floating-point sanity runs.

mod poly;
mod ratfunc;

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub use poly::{Exponent, Poly, Var, NVARS, VAR_NAMES};
pub use ratfunc::RatFunc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
}

/// A commutative field usable as the coefficient ring of every algebra here.
pub trait Coefficient:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_rational(q: &BigRational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn ratio(n: i64, d: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// Multiplicative inverse, `None` for zero.
    fn checked_inv(&self) -> Option<Self>;

    fn add_ref(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }

    fn mul_ref(&self, o: &Self) -> Self {
        self.clone() * o.clone()
    }

    fn scale_int(&self, k: i64) -> Self {
        match k {
            0 => Self::zero(),
            1 => self.clone(),
            -1 => -self.clone(),
            _ => self.mul_ref(&Self::from_int(k)),
        }
    }

    fn pow(&self, k: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..k {
            r = r.mul_ref(self);
        }
        r
    }
}

impl Coefficient for RatFunc {
    fn from_rational(q: &BigRational) -> Self {
        RatFunc::from_rational(q.clone())
    }

    fn checked_inv(&self) -> Option<Self> {
        self.inv().ok()
    }

    fn add_ref(&self, o: &Self) -> Self {
        RatFunc::add_ref(self, o)
    }

    fn mul_ref(&self, o: &Self) -> Self {
        RatFunc::mul_ref(self, o)
    }

    fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }
}

impl Coefficient for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }

    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
}

impl Coefficient for f64 {
    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn checked_inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
}
