//! Rational functions in `e1`, `e2`, `alpha` over the rationals.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{Poly, Var};
use super::ScalarError;

/// A reduced fraction of polynomials.
///
/// Canonical form: numerator and denominator are coprime and the denominator
/// is monic in graded-lexicographic order (`e1 > e2 > alpha`). Zero is `0/1`.
/// Two values are equal exactly when their canonical forms are identical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = Poly::gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides numerator"),
                    den.div_exact(&g).expect("gcd divides denominator"),
                )
            }
        };
        let lc = den.leading_coefficient();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(Poly::var(v))
    }

    pub fn eps1() -> Self {
        Self::var(Var::Eps1)
    }

    pub fn eps2() -> Self {
        Self::var(Var::Eps2)
    }

    pub fn alpha() -> Self {
        Self::var(Var::Alpha)
    }

    /// `e1 + e2`.
    pub fn hbar() -> Self {
        Self::eps1() + Self::eps2()
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_poly(Poly::constant(q))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(Poly::from_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_constant() {
            let d = self.den.as_constant()?;
            self.num.as_constant().map(|n| n / d)
        } else {
            None
        }
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.num.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, o: &RatFunc) -> Result<Self, ScalarError> {
        Ok(self.mul_ref(&o.inv()?))
    }

    /// Substitutes rational values for some of the parameters.
    pub fn specialize(&self, bindings: &[(Var, BigRational)]) -> Result<Self, ScalarError> {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for (v, val) in bindings {
            num = num.substitute(*v, val);
            den = den.substitute(*v, val);
        }
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    /// Substitutes a rational function for one parameter.
    pub fn substitute(&self, v: Var, value: &RatFunc) -> Result<Self, ScalarError> {
        let num = substitute_poly(&self.num, v, value);
        let den = substitute_poly(&self.den, v, value);
        num.checked_div(&den)
    }

    /// Value at a full point, `None` if the denominator vanishes there.
    pub fn evaluate(&self, point: &[BigRational; 3]) -> Option<BigRational> {
        let d = self.den.evaluate(point);
        if d.is_zero() {
            None
        } else {
            Some(self.num.evaluate(point) / d)
        }
    }

    pub fn add_ref(&self, o: &RatFunc) -> RatFunc {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(&self.num + &o.num);
        }
        if self.den == o.den {
            return Self::reduce(&self.num + &o.num, self.den.clone());
        }
        let g = Poly::gcd(&self.den, &o.den);
        let a = self.den.div_exact(&g).expect("gcd divides");
        let b = o.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul_ref(&b) + o.num.mul_ref(&a);
        let den = a.mul_ref(&o.den);
        Self::reduce(num, den)
    }

    pub fn mul_ref(&self, o: &RatFunc) -> RatFunc {
        if self.num.is_zero() || o.num.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(self.num.mul_ref(&o.num));
        }
        let g1 = Poly::gcd(&self.num, &o.den);
        let g2 = Poly::gcd(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = o.den.div_exact(&g1).expect("gcd divides");
        let n2 = o.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let num = n1.mul_ref(&n2);
        let den = d1.mul_ref(&d2);
        let lc = den.leading_coefficient();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn scale(&self, q: &BigRational) -> RatFunc {
        if q.is_zero() {
            RatFunc::zero()
        } else {
            RatFunc {
                num: self.num.scale(q),
                den: self.den.clone(),
            }
        }
    }
}

fn substitute_poly(p: &Poly, v: Var, value: &RatFunc) -> RatFunc {
    let idx = v.index();
    let mut acc = RatFunc::zero();
    for (e, q) in p.terms() {
        let k = e.0[idx];
        let mut rest = *e;
        rest.0[idx] = 0;
        let mut t = RatFunc::from_poly(Poly::monomial(rest, q.clone()));
        for _ in 0..k {
            t = t.mul_ref(value);
        }
        acc = acc.add_ref(&t);
    }
    acc
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, o: RatFunc) -> RatFunc {
        self.add_ref(&o)
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, o: RatFunc) -> RatFunc {
        self.add_ref(&-o)
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, o: RatFunc) -> RatFunc {
        self.mul_ref(&o)
    }
}

impl Div for RatFunc {
    type Output = RatFunc;
    /// Panics on division by zero; use [`RatFunc::checked_div`] otherwise.
    fn div(self, o: RatFunc) -> RatFunc {
        self.checked_div(&o).expect("rational function division by zero")
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -self.num,
            den: self.den,
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: &Poly| {
            if p.terms().len() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}
