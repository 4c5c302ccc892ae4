//! Sparse multivariate polynomials over the rationals in the three
//! parameters `e1`, `e2`, `alpha`.
//!
//! Terms are kept sorted by descending graded-lexicographic order with
//! `e1 > e2 > alpha`, and no stored coefficient is zero, so structural
//! equality is mathematical equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Number of polynomial variables.
pub const NVARS: usize = 3;

/// Printable names of the variables, in order.
pub const VAR_NAMES: [&str; NVARS] = ["e1", "e2", "alpha"];

/// A polynomial variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Var {
    Eps1,
    Eps2,
    Alpha,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::Eps1, Var::Eps2, Var::Alpha];

    pub fn index(self) -> usize {
        match self {
            Var::Eps1 => 0,
            Var::Eps2 => 1,
            Var::Alpha => 2,
        }
    }

    pub fn name(self) -> &'static str {
        VAR_NAMES[self.index()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Exponent(pub [u16; NVARS]);

impl Exponent {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn add(&self, o: &Exponent) -> Exponent {
        let mut r = [0u16; NVARS];
        for k in 0..NVARS {
            r[k] = self.0[k] + o.0[k];
        }
        Exponent(r)
    }

    fn divides(&self, o: &Exponent) -> bool {
        (0..NVARS).all(|k| self.0[k] <= o.0[k])
    }

    fn sub(&self, o: &Exponent) -> Exponent {
        let mut r = [0u16; NVARS];
        for k in 0..NVARS {
            r[k] = self.0[k] - o.0[k];
        }
        Exponent(r)
    }

}

impl Ord for Exponent {
    /// Graded lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Exponent, BigRational)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(q: BigRational) -> Self {
        if q.is_zero() {
            Self::zero()
        } else {
            Poly {
                terms: vec![(Exponent::default(), q)],
            }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0u16; NVARS];
        e[v.index()] = 1;
        Poly {
            terms: vec![(Exponent(e), BigRational::one())],
        }
    }

    pub fn monomial(e: Exponent, q: BigRational) -> Self {
        if q.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(e, q)] }
        }
    }

    /// Builds from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms(mut terms: Vec<(Exponent, BigRational)>) -> Self {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Exponent, BigRational)> = Vec::with_capacity(terms.len());
        for (e, q) in terms {
            match out.last_mut() {
                Some((le, lq)) if *le == e => *lq += q,
                _ => out.push((e, q)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Exponent, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_zero() && self.terms[0].1.is_one()
    }

    /// Constant value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(e, q)] if e.is_zero() => Some(q.clone()),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Exponent, BigRational)> {
        self.terms.first()
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.terms
            .first()
            .map(|t| t.1.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    pub fn scale(&self, q: &BigRational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, c * q)).collect(),
        }
    }

    /// Leading coefficient made one; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.terms.first() {
            None => Poly::zero(),
            Some((_, lc)) if lc.is_one() => self.clone(),
            Some((_, lc)) => self.scale(&lc.recip()),
        }
    }

    fn mul_term(&self, e: &Exponent, q: &BigRational) -> Poly {
        // Multiplication by a monomial preserves the term order.
        Poly {
            terms: self.terms.iter().map(|(f, c)| (f.add(e), c * q)).collect(),
        }
    }

    fn merge(&self, other: &Poly, negate_other: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ea, qa) = &self.terms[i];
            let (eb, qb) = &other.terms[j];
            match ea.cmp(eb) {
                Ordering::Greater => {
                    out.push((*ea, qa.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((*eb, if negate_other { -qb } else { qb.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let q = if negate_other { qa - qb } else { qa + qb };
                    if !q.is_zero() {
                        out.push((*ea, q));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|(e, q)| {
            (*e, if negate_other { -q } else { q.clone() })
        }));
        Poly { terms: out }
    }

    pub fn mul_ref(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.terms.len() == 1 {
            let (e, q) = &self.terms[0];
            return other.mul_term(e, q);
        }
        if other.terms.len() == 1 {
            let (e, q) = &other.terms[0];
            return self.mul_term(e, q);
        }
        let mut acc = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, qa) in &self.terms {
            for (eb, qb) in &other.terms {
                acc.push((ea.add(eb), qa * qb));
            }
        }
        Poly::from_terms(acc)
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut r = Poly::one();
        for _ in 0..k {
            r = r.mul_ref(self);
        }
        r
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (ld, lq) = d.terms[0].clone();
        let lq_inv = lq.recip();
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((lr, lc)) = rem.terms.first().cloned() {
            if !ld.divides(&lr) {
                return None;
            }
            let e = lr.sub(&ld);
            let q = lc * &lq_inv;
            rem = rem.merge(&d.mul_term(&e, &q), true);
            quot.push((e, q));
        }
        Some(Poly::from_terms(quot))
    }

    pub fn degree_in(&self, v: usize) -> u16 {
        self.terms.iter().map(|(e, _)| e.0[v]).max().unwrap_or(0)
    }

    fn mentions(&self, v: usize) -> bool {
        self.terms.iter().any(|(e, _)| e.0[v] > 0)
    }

    /// Coefficients as a univariate polynomial in variable `v`.
    fn coefficients_in(&self, v: usize) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Exponent, BigRational)>> = vec![Vec::new(); deg + 1];
        for (e, q) in &self.terms {
            let k = e.0[v] as usize;
            let mut f = *e;
            f.0[v] = 0;
            buckets[k].push((f, q.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    fn from_coefficients_in(v: usize, coeffs: &[Poly]) -> Poly {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            for (e, q) in &c.terms {
                let mut f = *e;
                f.0[v] += k as u16;
                terms.push((f, q.clone()));
            }
        }
        Poly::from_terms(terms)
    }

    /// Substitutes a rational value for one variable.
    pub fn substitute(&self, v: Var, value: &BigRational) -> Poly {
        let idx = v.index();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, q) in &self.terms {
            let k = e.0[idx];
            let mut f = *e;
            f.0[idx] = 0;
            let factor = num_traits::pow(value.clone(), k as usize);
            terms.push((f, q * factor));
        }
        Poly::from_terms(terms)
    }

    /// Evaluates at a full point.
    pub fn evaluate(&self, point: &[BigRational; NVARS]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, q) in &self.terms {
            let mut t = q.clone();
            for k in 0..NVARS {
                if e.0[k] > 0 {
                    t *= num_traits::pow(point[k].clone(), e.0[k] as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Greatest common divisor, normalised to be monic (the zero polynomial
    /// only when both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        if a.terms.len() == 1 || b.terms.len() == 1 {
            let (m, other) = if a.terms.len() == 1 { (a, b) } else { (b, a) };
            let mut e = m.terms[0].0;
            for (f, _) in &other.terms {
                for k in 0..NVARS {
                    e.0[k] = e.0[k].min(f.0[k]);
                }
            }
            return Poly::monomial(e, BigRational::one());
        }
        if a == b {
            return a.monic();
        }
        let (ia, ib) = (integer_primitive(a), integer_primitive(b));
        match heuristic_gcd(&ia, &ib) {
            Some(g) => g.monic(),
            None => gcd_recursive(a, b).monic(),
        }
    }
}

fn as_integer(q: &BigRational) -> &BigInt {
    debug_assert!(q.is_integer());
    q.numer()
}

fn integer_content(p: &Poly) -> BigInt {
    p.terms
        .iter()
        .fold(BigInt::zero(), |g, (_, q)| g.gcd(as_integer(q)))
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms
        .iter()
        .map(|(_, q)| as_integer(q).abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

/// Integer gcd of integer polynomials by evaluation at a large integer and
/// `x`-adic reconstruction. Returns `None` when every trial point fails.
/// A candidate dividing both inputs is the gcd because `x` exceeds twice the
/// smaller coefficient bound.
fn heuristic_gcd(f: &Poly, g: &Poly) -> Option<Poly> {
    let Some(v) = main_variable(f, g) else {
        let n = integer_content(f).gcd(&integer_content(g));
        return Some(Poly::constant(BigRational::from_integer(n)));
    };
    let cf = integer_content(f);
    let cg = integer_content(g);
    let content = Poly::constant(BigRational::from_integer(cf.gcd(&cg)));
    let fp = f.scale(&BigRational::from_integer(cf).recip());
    let gp = g.scale(&BigRational::from_integer(cg).recip());
    if !fp.mentions(v) || !gp.mentions(v) {
        // One side is free of v, so the gcd divides every v-coefficient of the other.
        let (free, other) = if !fp.mentions(v) { (&fp, &gp) } else { (&gp, &fp) };
        let mut h = free.clone();
        for c in other.coefficients_in(v) {
            if !c.is_zero() {
                h = heuristic_gcd(&h, &c)?;
            }
        }
        return Some(&content * &integer_primitive(&h));
    }
    let nf = max_norm(&fp);
    let ng = max_norm(&gp);
    // Below 2 min(|f|, |g|) + 2 the division test no longer certifies the result.
    let mut x = BigInt::from(2) * nf.min(ng) + BigInt::from(29);
    for _ in 0..6 {
        let xq = BigRational::from_integer(x.clone());
        let ff = fp.substitute(Var::ALL[v], &xq);
        let gg = gp.substitute(Var::ALL[v], &xq);
        if !ff.is_zero() && !gg.is_zero() {
            if let Some(h) = heuristic_gcd(&ff, &gg) {
                let h = integer_primitive(&reconstruct(&h, &x, v));
                if !h.is_zero() && fp.div_exact(&h).is_some() && gp.div_exact(&h).is_some() {
                    return Some(&content * &h);
                }
            }
        }
        x = BigInt::from(73794) * &x * x.sqrt().sqrt() / BigInt::from(27011);
    }
    None
}

/// Reads `h` as a value at `v = x` and recovers the polynomial in `v` whose
/// coefficients are the symmetric residues.
fn reconstruct(h: &Poly, x: &BigInt, v: usize) -> Poly {
    let half = x / BigInt::from(2);
    let mut h = h.clone();
    let mut coeffs = Vec::new();
    while !h.is_zero() {
        let digit = Poly::from_terms(
            h.terms
                .iter()
                .map(|(e, q)| {
                    let mut r = as_integer(q).mod_floor(x);
                    if r > half {
                        r -= x;
                    }
                    (*e, BigRational::from_integer(r))
                })
                .collect(),
        );
        h = (&h - &digit).scale(&BigRational::from_integer(x.clone()).recip());
        coeffs.push(digit);
    }
    Poly::from_coefficients_in(v, &coeffs)
}

fn main_variable(a: &Poly, b: &Poly) -> Option<usize> {
    (0..NVARS).find(|&v| a.mentions(v) || b.mentions(v))
}

fn content_in(p: &Poly, v: usize) -> Poly {
    let mut g = Poly::zero();
    for c in p.coefficients_in(v) {
        if c.is_zero() {
            continue;
        }
        g = Poly::gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_in(p: &Poly, v: usize) -> Poly {
    let c = content_in(p, v);
    integer_primitive(&p.div_exact(&c).expect("content divides"))
}

/// Scales to coprime integer coefficients; keeps PRS coefficient growth polynomial.
fn integer_primitive(p: &Poly) -> Poly {
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for (_, q) in &p.terms {
        g = g.gcd(q.numer());
        l = l.lcm(q.denom());
    }
    if g.is_zero() {
        return p.clone();
    }
    p.scale(&BigRational::new(l, g))
}

fn pseudo_remainder(a: &Poly, b: &Poly, v: usize) -> Poly {
    let bc = b.coefficients_in(v);
    let db = bc.len() - 1;
    let lb = bc[db].clone();
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let rc = r.coefficients_in(v);
        let dr = rc.len() - 1;
        if dr < db {
            return r;
        }
        let lr = rc[dr].clone();
        let mut shifted = vec![Poly::zero(); dr - db];
        shifted.extend(bc.iter().cloned());
        let bshift = Poly::from_coefficients_in(v, &shifted);
        r = r.mul_ref(&lb) - bshift.mul_ref(&lr);
    }
}

fn gcd_recursive(a: &Poly, b: &Poly) -> Poly {
    let Some(v) = main_variable(a, b) else {
        return Poly::one();
    };
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let cont = Poly::gcd(&ca, &cb);
    let mut pa = integer_primitive(&a.div_exact(&ca).expect("content divides"));
    let mut pb = integer_primitive(&b.div_exact(&cb).expect("content divides"));
    if pa.degree_in(v) < pb.degree_in(v) {
        std::mem::swap(&mut pa, &mut pb);
    }
    if pb.degree_in(v) == 0 {
        // pb is free of v; after content removal it is a constant.
        return cont;
    }
    loop {
        let r = pseudo_remainder(&pa, &pb, v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(v) == 0 {
            return cont;
        }
        pa = pb;
        pb = primitive_in(&r, v);
    }
    cont.mul_ref(&primitive_in(&pb, v))
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        self.merge(&o, false)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        self.merge(o, false)
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        self.merge(&o, true)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self.merge(o, true)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        self.mul_ref(&o)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        self.mul_ref(o)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(e, q)| (e, -q)).collect(),
        }
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, q)) in self.terms.iter().enumerate() {
            let negative = q.is_negative();
            let mag = q.abs();
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.is_zero() {
                factors.push(fmt_rational(&mag));
            }
            for k in 0..NVARS {
                match e.0[k] {
                    0 => {}
                    1 => factors.push(VAR_NAMES[k].to_string()),
                    p => factors.push(format!("{}^{}", VAR_NAMES[k], p)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
