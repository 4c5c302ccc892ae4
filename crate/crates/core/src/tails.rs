//! Formal sums `Σ_{s≥0}` of PBW words whose modes are affine in `s`.
//!
//! A [`Completion`] is a finite [`Element`] plus tail families kept in a
//! canonical form: every family is PBW ordered for all `s ≥ 0`, starts at
//! `s = 0` exactly at the point where its pattern becomes ordered, and
//! families with the same pattern are merged. Two completions are equal iff
//! their canonical forms agree.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::affine_gl::{bracket_units, Generator, LoopGen};
use crate::foundation::RankData;
use crate::pbw::{Element, LoopStraightener, Monomial};
use crate::scalar::Coefficient;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TailError {
    #[error("divergent family: {0}")]
    Divergent(String),
    #[error("unsupported family arity: {0}")]
    UnsupportedArity(String),
}

/// Polynomial in the summation index, lowest degree first.
#[derive(Clone, PartialEq, Debug)]
pub struct IndexPoly<S>(Vec<S>);

impl<S: Coefficient> IndexPoly<S> {
    pub fn zero() -> Self {
        IndexPoly(Vec::new())
    }

    pub fn constant(k: S) -> Self {
        let mut p = IndexPoly(vec![k]);
        p.trim();
        p
    }

    /// `a·s + b`.
    pub fn linear(a: i64, b: i64) -> Self {
        let mut p = IndexPoly(vec![S::from_int(b), S::from_int(a)]);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn coefficients(&self) -> &[S] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The constant value if the polynomial has degree ≤ 0.
    pub fn as_constant(&self) -> Option<S> {
        match self.0.len() {
            0 => Some(S::zero()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }

    pub fn eval(&self, s: i64) -> S {
        let x = S::from_int(s);
        let mut r = S::zero();
        for c in self.0.iter().rev() {
            r = r.mul_ref(&x).add_ref(c);
        }
        r
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_else(S::zero);
            let b = o.0.get(i).cloned().unwrap_or_else(S::zero);
            v.push(a.add_ref(&b));
        }
        let mut p = IndexPoly(v);
        p.trim();
        p
    }

    pub fn scale(&self, k: &S) -> Self {
        let mut p = IndexPoly(self.0.iter().map(|c| c.mul_ref(k)).collect());
        p.trim();
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![S::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] = v[i + j].add_ref(&a.mul_ref(b));
            }
        }
        let mut p = IndexPoly(v);
        p.trim();
        p
    }

    /// `p(s + d)`.
    pub fn shift(&self, d: i64) -> Self {
        if d == 0 {
            return self.clone();
        }
        let lin = IndexPoly::linear(1, d);
        let mut r = Self::zero();
        for c in self.0.iter().rev() {
            r = r.mul(&lin).add(&IndexPoly::constant(c.clone()));
        }
        r
    }

    pub fn map<T: Coefficient>(&self, f: impl Fn(&S) -> T) -> IndexPoly<T> {
        let mut p = IndexPoly(self.0.iter().map(f).collect());
        p.trim();
        p
    }
}

impl<S: Coefficient> fmt::Display for IndexPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*s"),
                _ => format!("({c})*s^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn affine(f: &mut fmt::Formatter<'_>, terms: &[(i32, &str)], konst: i32) -> fmt::Result {
    let mut out = String::new();
    for &(k, v) in terms {
        if k == 0 {
            continue;
        }
        let sign = if k < 0 { "-" } else if out.is_empty() { "" } else { "+" };
        let mag = k.abs();
        if mag == 1 {
            out.push_str(&format!("{sign}{v}"));
        } else {
            out.push_str(&format!("{sign}{mag}{v}"));
        }
    }
    if konst != 0 || out.is_empty() {
        if konst >= 0 && !out.is_empty() {
            out.push('+');
        }
        out.push_str(&konst.to_string());
    }
    write!(f, "{out}")
}

/// `E_{row,col}(slope·s + konst)`. The derived order is the large-`s` PBW order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern {
    pub slope: i32,
    pub konst: i32,
    pub row: u8,
    pub col: u8,
}

impl Pattern {
    pub fn new(row: usize, col: usize, slope: i32, konst: i32) -> Self {
        Pattern {
            slope,
            konst,
            row: row as u8,
            col: col as u8,
        }
    }

    pub fn fixed(g: LoopGen) -> Self {
        Pattern {
            slope: 0,
            konst: g.mode,
            row: g.row,
            col: g.col,
        }
    }

    pub fn at(&self, s: i64) -> LoopGen {
        let mode = self.slope as i64 * s + self.konst as i64;
        LoopGen {
            mode: i32::try_from(mode).expect("mode overflow"),
            row: self.row,
            col: self.col,
        }
    }

    pub fn parity(&self, rank: &RankData) -> u8 {
        rank.unit_parity(self.row as usize, self.col as usize)
    }

    fn unit(&self, mode: i32) -> LoopGen {
        LoopGen {
            mode,
            row: self.row,
            col: self.col,
        }
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{},{}(", self.row, self.col)?;
        affine(f, &[(self.slope, "s")], self.konst)?;
        write!(f, ")")
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `δ_{slope·s + konst, 0}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Delta {
    pub slope: i32,
    pub konst: i32,
}

/// A single-index family `Σ_{lower ≤ s ≤ upper} coeff(s) c^c z^z Π factors(s) Π δ`,
/// in no particular normal form.
#[derive(Clone, Debug)]
pub struct TailFamily<S> {
    pub factors: Vec<Pattern>,
    pub c: u16,
    pub z: u16,
    pub coeff: IndexPoly<S>,
    pub lower: i64,
    pub upper: Option<i64>,
    pub deltas: Vec<Delta>,
}

impl<S: Coefficient> TailFamily<S> {
    /// `k · Σ_{s≥0} Π factors(s)`.
    pub fn new(factors: Vec<Pattern>, k: S) -> Self {
        TailFamily {
            factors,
            c: 0,
            z: 0,
            coeff: IndexPoly::constant(k),
            lower: 0,
            upper: None,
            deltas: Vec::new(),
        }
    }

    pub fn with_delta(mut self, slope: i32, konst: i32) -> Self {
        self.deltas.push(Delta { slope, konst });
        self
    }

    pub fn with_central(mut self, c: u16, z: u16) -> Self {
        self.c += c;
        self.z += z;
        self
    }

    pub fn with_coeff(mut self, p: IndexPoly<S>) -> Self {
        self.coeff = p;
        self
    }

    pub fn parity(&self, rank: &RankData) -> u8 {
        self.factors.iter().map(|p| p.parity(rank)).sum::<u8>() % 2
    }

    fn admits(&self, s: i64) -> bool {
        s >= self.lower
            && self.upper.is_none_or(|u| s <= u)
            && self
                .deltas
                .iter()
                .all(|d| d.slope as i64 * s + d.konst as i64 == 0)
    }

    /// The `s`-th summand in normal form, zero outside the range.
    pub fn instance(&self, s: i64, st: &mut LoopStraightener) -> Element<S> {
        if !self.admits(s) {
            return Element::zero();
        }
        let word: Vec<Generator> = self
            .factors
            .iter()
            .map(|p| Generator::Unit(p.at(s)))
            .chain(std::iter::repeat_n(Generator::C, self.c as usize))
            .chain(std::iter::repeat_n(Generator::Z, self.z as usize))
            .collect();
        Element::from_word(st, &word, self.coeff.eval(s))
    }

    /// Sum of the summands with `s ≤ s_max`.
    pub fn expand(&self, s_max: i64, st: &mut LoopStraightener) -> Element<S> {
        let hi = self.upper.map_or(s_max, |u| u.min(s_max));
        let mut out = Element::zero();
        for s in self.lower..=hi {
            out.add_assign(&self.instance(s, st));
        }
        out
    }
}

/// Resolves the delta constraints of one family.
pub fn resolve_deltas<S: Coefficient>(
    f: &TailFamily<S>,
    st: &mut LoopStraightener,
) -> Result<Completion<S>, TailError> {
    let mut out = Completion::zero();
    out.absorb(f.clone(), st)?;
    Ok(out)
}

/// Pattern of a two-index family: mode `s_slope·s + t_slope·t + konst`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern2 {
    pub s_slope: i32,
    pub t_slope: i32,
    pub konst: i32,
    pub row: u8,
    pub col: u8,
}

impl Pattern2 {
    fn at(&self, s: i64, t: i64) -> LoopGen {
        let mode = self.s_slope as i64 * s + self.t_slope as i64 * t + self.konst as i64;
        LoopGen {
            mode: i32::try_from(mode).expect("mode overflow"),
            row: self.row,
            col: self.col,
        }
    }

    fn swapped(&self) -> Self {
        Pattern2 {
            s_slope: self.t_slope,
            t_slope: self.s_slope,
            ..*self
        }
    }
}

impl fmt::Debug for Pattern2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{},{}(", self.row, self.col)?;
        affine(f, &[(self.s_slope, "s"), (self.t_slope, "t")], self.konst)?;
        write!(f, ")")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FamilyKey {
    pub factors: SmallVec<[Pattern; 4]>,
    pub c: u16,
    pub z: u16,
}

impl FamilyKey {
    pub fn parity(&self, rank: &RankData) -> u8 {
        self.factors.iter().map(|p| p.parity(rank)).sum::<u8>() % 2
    }

    pub fn family<S: Coefficient>(&self, coeff: IndexPoly<S>) -> TailFamily<S> {
        TailFamily {
            factors: self.factors.to_vec(),
            c: self.c,
            z: self.z,
            coeff,
            lower: 0,
            upper: None,
            deltas: Vec::new(),
        }
    }
}

/// Two-index family `Σ_{s,t≥0}`, stored as an unordered word; the key is the
/// smaller of itself and its `s ↔ t` mirror.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DoubleKey {
    pub factors: SmallVec<[Pattern2; 4]>,
    pub c: u16,
    pub z: u16,
}

impl DoubleKey {
    fn normalized(self) -> Self {
        let mirror = DoubleKey {
            factors: self.factors.iter().map(|p| p.swapped()).collect(),
            c: self.c,
            z: self.z,
        };
        if mirror < self {
            mirror
        } else {
            self
        }
    }

    fn instance<S: Coefficient>(&self, s: i64, t: i64, k: &S, st: &mut LoopStraightener) -> Element<S> {
        let word: Vec<Generator> = self
            .factors
            .iter()
            .map(|p| Generator::Unit(p.at(s, t)))
            .chain(std::iter::repeat_n(Generator::C, self.c as usize))
            .chain(std::iter::repeat_n(Generator::Z, self.z as usize))
            .collect();
        Element::from_word(st, &word, k.clone())
    }
}

/// Element of the completed enveloping algebra in canonical form.
#[derive(Clone, PartialEq)]
pub struct Completion<S> {
    finite: Element<S>,
    families: BTreeMap<FamilyKey, IndexPoly<S>>,
    doubles: BTreeMap<DoubleKey, S>,
}

impl<S: Coefficient> Default for Completion<S> {
    fn default() -> Self {
        Completion {
            finite: Element::zero(),
            families: BTreeMap::new(),
            doubles: BTreeMap::new(),
        }
    }
}

/// First index from which every adjacent pair of an asymptotically sorted
/// pattern is PBW ordered; `None` if the order never depends on `s`.
fn threshold(factors: &[Pattern], rank: &RankData) -> Option<i64> {
    let mut t: Option<i64> = None;
    for w in factors.windows(2) {
        let (p, q) = (w[0], w[1]);
        if p.slope == q.slope {
            continue;
        }
        let d = (q.slope - p.slope) as i64;
        let dk = (q.konst - p.konst) as i64;
        let tie_ok = (p.row, p.col) < (q.row, q.col)
            || ((p.row, p.col) == (q.row, q.col) && p.parity(rank) == 0);
        let need = if tie_ok { -dk } else { 1 - dk };
        let s0 = need.div_euclid(d) + i64::from(need.rem_euclid(d) != 0);
        t = Some(t.map_or(s0, |x| x.max(s0)));
    }
    t
}

fn first_unsorted(factors: &[Pattern], rank: &RankData) -> Option<usize> {
    factors
        .windows(2)
        .position(|w| w[0] > w[1] || (w[0] == w[1] && w[0].parity(rank) == 1))
}

fn super_sign(a: u8, b: u8) -> i64 {
    if a * b == 1 {
        -1
    } else {
        1
    }
}

impl<S: Coefficient> Completion<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_finite(x: Element<S>) -> Self {
        Completion {
            finite: x,
            ..Self::default()
        }
    }

    pub fn from_family(f: TailFamily<S>, st: &mut LoopStraightener) -> Result<Self, TailError> {
        let mut out = Self::zero();
        out.absorb(f, st)?;
        Ok(out)
    }

    /// Splits into the terms carrying `c` and the rest.
    pub fn split_central(&self) -> (Self, Self) {
        let mut with_c = Self::zero();
        let mut rest = Self::zero();
        with_c.finite = self.finite.filter(|m| m.c > 0);
        rest.finite = self.finite.filter(|m| m.c == 0);
        for (k, p) in &self.families {
            let side = if k.c > 0 { &mut with_c } else { &mut rest };
            side.families.insert(k.clone(), p.clone());
        }
        for (k, v) in &self.doubles {
            let side = if k.c > 0 { &mut with_c } else { &mut rest };
            side.doubles.insert(k.clone(), v.clone());
        }
        (with_c, rest)
    }

    pub fn finite(&self) -> &Element<S> {
        &self.finite
    }

    pub fn families(&self) -> impl Iterator<Item = (&FamilyKey, &IndexPoly<S>)> {
        self.families.iter()
    }

    pub fn doubles(&self) -> impl Iterator<Item = (&DoubleKey, &S)> {
        self.doubles.iter()
    }

    pub fn family_count(&self) -> usize {
        self.families.len()
    }

    pub fn has_doubles(&self) -> bool {
        !self.doubles.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.finite.is_zero() && self.families.is_empty() && self.doubles.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.families.is_empty() && self.doubles.is_empty()
    }

    pub fn add_finite(&mut self, x: &Element<S>) {
        self.finite.add_assign(x);
    }

    fn add_family_poly(&mut self, key: FamilyKey, p: IndexPoly<S>) {
        if p.is_zero() {
            return;
        }
        let merged = match self.families.remove(&key) {
            Some(q) => q.add(&p),
            None => p,
        };
        if !merged.is_zero() {
            self.families.insert(key, merged);
        }
    }

    fn add_double(&mut self, key: DoubleKey, k: S) {
        if k.is_zero() {
            return;
        }
        let key = key.normalized();
        let merged = match self.doubles.remove(&key) {
            Some(q) => q.add_ref(&k),
            None => k,
        };
        if !merged.is_zero() {
            self.doubles.insert(key, merged);
        }
    }

    /// Adds a family, bringing it into canonical form.
    pub fn absorb(&mut self, f: TailFamily<S>, st: &mut LoopStraightener) -> Result<(), TailError> {
        let rank = st.alphabet().rank;
        let mut work = vec![f];
        while let Some(mut f) = work.pop() {
            if f.coeff.is_zero() {
                continue;
            }
            if let Some(d) = f.deltas.pop() {
                if d.slope == 0 {
                    if d.konst == 0 {
                        work.push(f);
                    }
                    continue;
                }
                if d.konst % d.slope != 0 {
                    continue;
                }
                let s = -(d.konst / d.slope) as i64;
                let inst = f.instance(s, st);
                self.finite.add_assign(&inst);
                continue;
            }
            if let Some(u) = f.upper {
                for s in f.lower..=u {
                    let inst = f.instance(s, st);
                    self.finite.add_assign(&inst);
                }
                continue;
            }
            if let Some(i) = first_unsorted(&f.factors, &rank) {
                let (p, q) = (f.factors[i], f.factors[i + 1]);
                if p == q {
                    continue;
                }
                let sign = super_sign(p.parity(&rank), q.parity(&rank));
                let mut swapped = f.clone();
                swapped.factors.swap(i, i + 1);
                swapped.coeff = f.coeff.scale(&S::from_int(sign));
                work.push(swapped);
                let joined = Pattern {
                    slope: p.slope + q.slope,
                    konst: p.konst + q.konst,
                    row: 0,
                    col: 0,
                };
                for (g, n) in bracket_units(&rank, p.unit(1), q.unit(1)) {
                    if let Generator::Unit(u) = g {
                        let mut h = f.clone();
                        h.factors.splice(i..i + 2, [Pattern { row: u.row, col: u.col, ..joined }]);
                        h.coeff = f.coeff.scale(&S::from_int(n));
                        work.push(h);
                    }
                }
                for (g, n) in bracket_units(&rank, p.unit(1), q.unit(-1)) {
                    let (dc, dz) = match g {
                        Generator::C => (1, 0),
                        Generator::Z => (0, 1),
                        Generator::Unit(_) => continue,
                    };
                    let mut h = f.clone();
                    h.factors.drain(i..i + 2);
                    h.c += dc;
                    h.z += dz;
                    h.coeff = f
                        .coeff
                        .mul(&IndexPoly::linear(p.slope as i64, p.konst as i64))
                        .scale(&S::from_int(n));
                    h.deltas.push(Delta {
                        slope: joined.slope,
                        konst: joined.konst,
                    });
                    work.push(h);
                }
                continue;
            }
            let d = match threshold(&f.factors, &rank) {
                Some(t) => t,
                None => {
                    let Some(p) = f.factors.iter().find(|p| p.slope != 0) else {
                        return Err(TailError::Divergent(format!(
                            "{} summed over s >= {} does not depend on s",
                            FamilyKey {
                                factors: f.factors.iter().copied().collect(),
                                c: f.c,
                                z: f.z
                            }
                            .display(),
                            f.lower
                        )));
                    };
                    let (sl, k) = (p.slope as i64, p.konst as i64);
                    if sl > 0 {
                        -(k.div_euclid(sl))
                    } else {
                        k.div_euclid(-sl)
                    }
                }
            };
            let shifted = TailFamily {
                factors: f
                    .factors
                    .iter()
                    .map(|p| Pattern {
                        konst: i32::try_from(p.konst as i64 + p.slope as i64 * d).expect("mode overflow"),
                        ..*p
                    })
                    .collect(),
                c: f.c,
                z: f.z,
                coeff: f.coeff.shift(d),
                lower: 0,
                upper: None,
                deltas: Vec::new(),
            };
            let start = f.lower - d;
            if start > 0 {
                for s in 0..start {
                    let inst = shifted.instance(s, st);
                    self.finite.add_assign(&inst.neg());
                }
            } else if start < 0 {
                let mut early = shifted.clone();
                early.lower = start;
                for s in start..0 {
                    let inst = early.instance(s, st);
                    self.finite.add_assign(&inst);
                }
            }
            let key = FamilyKey {
                factors: shifted.factors.iter().copied().collect(),
                c: f.c,
                z: f.z,
            };
            self.add_family_poly(key, shifted.coeff);
        }
        Ok(())
    }

    /// Re-derives the canonical form from scratch.
    pub fn canonicalize(&self, st: &mut LoopStraightener) -> Result<Self, TailError> {
        let mut out = Completion {
            finite: self.finite.clone(),
            families: BTreeMap::new(),
            doubles: self.doubles.clone(),
        };
        for (k, p) in &self.families {
            out.absorb(k.family(p.clone()), st)?;
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn add_assign(&mut self, o: &Self) {
        self.finite.add_assign(&o.finite);
        for (k, p) in &o.families {
            self.add_family_poly(k.clone(), p.clone());
        }
        for (k, c) in &o.doubles {
            self.add_double(k.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &S) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Completion {
            finite: self.finite.scale(k),
            families: self.families.iter().map(|(f, p)| (f.clone(), p.scale(k))).collect(),
            doubles: self.doubles.iter().map(|(f, c)| (f.clone(), c.mul_ref(k))).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn map_coefficients<T: Coefficient>(&self, f: impl Fn(&S) -> T) -> Completion<T> {
        let mut out = Completion::zero();
        out.finite = self.finite.map_coefficients(&f);
        for (k, p) in &self.families {
            out.add_family_poly(k.clone(), p.map(&f));
        }
        for (k, c) in &self.doubles {
            out.add_double(k.clone(), f(c));
        }
        out
    }

    pub fn parity(&self, rank: &RankData) -> Option<u8> {
        let mut ps: Vec<u8> = Vec::new();
        if !self.finite.is_zero() {
            ps.push(self.finite.parity(rank)?);
        }
        ps.extend(self.families.keys().map(|k| k.parity(rank)));
        ps.extend(
            self.doubles
                .keys()
                .map(|k| k.factors.iter().map(|p| rank.unit_parity(p.row as usize, p.col as usize)).sum::<u8>() % 2),
        );
        match ps.split_first() {
            None => Some(0),
            Some((p, rest)) if rest.iter().all(|q| q == p) => Some(*p),
            _ => None,
        }
    }

    /// Substitutes scalars for `c` and `z`.
    pub fn specialize_central(&self, c: &S, z: &S) -> Self {
        let mut out = Completion::from_finite(self.finite.specialize_central(c, z));
        for (k, p) in &self.families {
            let w = c.pow(k.c as u32).mul_ref(&z.pow(k.z as u32));
            let key = FamilyKey {
                factors: k.factors.clone(),
                c: 0,
                z: 0,
            };
            out.add_family_poly(key, p.scale(&w));
        }
        for (k, v) in &self.doubles {
            let w = c.pow(k.c as u32).mul_ref(&z.pow(k.z as u32));
            let key = DoubleKey {
                factors: k.factors.clone(),
                c: 0,
                z: 0,
            };
            out.add_double(key, v.mul_ref(&w));
        }
        out
    }

    /// Finite part plus every summand with index `≤ s_max`.
    pub fn expand(&self, s_max: i64, st: &mut LoopStraightener) -> Element<S> {
        let mut out = self.finite.clone();
        for (k, p) in &self.families {
            out.add_assign(&k.family(p.clone()).expand(s_max, st));
        }
        for (k, c) in &self.doubles {
            for s in 0..=s_max {
                for t in 0..=s_max {
                    out.add_assign(&k.instance(s, t, c, st));
                }
            }
        }
        out
    }

    /// `x · self` (`left`) or `self · x`.
    fn mul_finite(&self, x: &Element<S>, left: bool, st: &mut LoopStraightener) -> Result<Self, TailError> {
        let mut out = Completion::from_finite(if left {
            x.mul(&self.finite, st)
        } else {
            self.finite.mul(x, st)
        });
        for (m, k) in x.terms() {
            let fixed: Vec<Pattern> = m.factors.iter().map(|g| Pattern::fixed(*g)).collect();
            for (key, p) in &self.families {
                let factors = if left {
                    fixed.iter().chain(key.factors.iter()).copied().collect()
                } else {
                    key.factors.iter().chain(fixed.iter()).copied().collect()
                };
                let f = TailFamily {
                    factors,
                    c: key.c + m.c,
                    z: key.z + m.z,
                    coeff: p.scale(k),
                    lower: 0,
                    upper: None,
                    deltas: Vec::new(),
                };
                out.absorb(f, st)?;
            }
            let fixed2: SmallVec<[Pattern2; 4]> = m
                .factors
                .iter()
                .map(|g| Pattern2 {
                    s_slope: 0,
                    t_slope: 0,
                    konst: g.mode,
                    row: g.row,
                    col: g.col,
                })
                .collect();
            for (key, c) in &self.doubles {
                let factors = if left {
                    fixed2.iter().chain(key.factors.iter()).copied().collect()
                } else {
                    key.factors.iter().chain(fixed2.iter()).copied().collect()
                };
                out.add_double(
                    DoubleKey {
                        factors,
                        c: key.c + m.c,
                        z: key.z + m.z,
                    },
                    c.mul_ref(k),
                );
            }
        }
        Ok(out)
    }

    pub fn mul_left(&self, x: &Element<S>, st: &mut LoopStraightener) -> Result<Self, TailError> {
        self.mul_finite(x, true, st)
    }

    pub fn mul_right(&self, x: &Element<S>, st: &mut LoopStraightener) -> Result<Self, TailError> {
        self.mul_finite(x, false, st)
    }

    /// `[self, x]` for a finite `x`.
    pub fn bracket_finite(&self, x: &Element<S>, st: &mut LoopStraightener) -> Result<Self, TailError> {
        let rank = st.alphabet().rank;
        let mut out = Completion::zero();
        for p in [0u8, 1] {
            let xp = x.filter(|m| m.parity(&rank) == p);
            if xp.is_zero() {
                continue;
            }
            for q in [0u8, 1] {
                let part = self.parity_part(q, &rank);
                if part.is_zero() {
                    continue;
                }
                let sign = S::from_int(-super_sign(p, q));
                out.add_assign(&part.mul_right(&xp, st)?);
                out.add_assign(&part.mul_left(&xp, st)?.scale(&sign));
            }
        }
        Ok(out)
    }

    fn parity_part(&self, q: u8, rank: &RankData) -> Self {
        Completion {
            finite: self.finite.filter(|m| m.parity(rank) == q),
            families: self
                .families
                .iter()
                .filter(|(k, _)| k.parity(rank) == q)
                .map(|(k, p)| (k.clone(), p.clone()))
                .collect(),
            doubles: self
                .doubles
                .iter()
                .filter(|(k, _)| {
                    k.factors.iter().map(|p| rank.unit_parity(p.row as usize, p.col as usize)).sum::<u8>() % 2 == q
                })
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Super bracket of two completions.
    pub fn bracket(&self, o: &Self, st: &mut LoopStraightener) -> Result<Self, TailError> {
        if !self.doubles.is_empty() || !o.doubles.is_empty() {
            return Err(TailError::UnsupportedArity(
                "bracket with a two-index family".into(),
            ));
        }
        let rank = st.alphabet().rank;
        let mut out = Completion::from_finite(self.finite.bracket(&o.finite, st));
        out.add_assign(&self.tails_only().bracket_finite(&o.finite, st)?);
        // [x, F] = −(−1)^{|x||F|}[F, x]
        for px in [0u8, 1] {
            let xs = self.finite.filter(|m| m.parity(&rank) == px);
            if xs.is_zero() {
                continue;
            }
            for q in [0u8, 1] {
                let fam = o.tails_only().parity_part(q, &rank);
                if fam.is_zero() {
                    continue;
                }
                let b = fam.bracket_finite(&xs, st)?;
                out.add_assign(&b.scale(&S::from_int(-super_sign(px, q))));
            }
        }
        let keys: Vec<(&FamilyKey, &IndexPoly<S>)> = self.families.iter().collect();
        let okeys: Vec<(&FamilyKey, &IndexPoly<S>)> = o.families.iter().collect();
        // Pair (F, G) with (G, F): [G, F] = −(−1)^{|F||G|}[F, G].
        let mut combined: BTreeMap<(FamilyKey, FamilyKey), S> = BTreeMap::new();
        for (kf, pf) in &keys {
            for (kg, pg) in &okeys {
                let (a, b) = (const_coeff(pf)?, const_coeff(pg)?);
                let k = a.mul_ref(&b);
                let (pa, pb) = (kf.parity(&rank), kg.parity(&rank));
                let (key, k) = if kf <= kg {
                    (((*kf).clone(), (*kg).clone()), k)
                } else {
                    (((*kg).clone(), (*kf).clone()), k.scale_int(-super_sign(pa, pb)))
                };
                let slot = combined.entry(key).or_insert_with(S::zero);
                *slot = slot.add_ref(&k);
            }
        }
        for ((kf, kg), k) in combined {
            if k.is_zero() {
                continue;
            }
            if kf == kg && kf.parity(&rank) == 0 {
                continue;
            }
            let b = family_bracket_family(
                &kf.family(IndexPoly::constant(S::one())),
                &kg.family(IndexPoly::constant(S::one())),
                st,
            )?;
            out.add_assign(&b.scale(&k));
        }
        Ok(out)
    }

    fn tails_only(&self) -> Self {
        Completion {
            finite: Element::zero(),
            families: self.families.clone(),
            doubles: self.doubles.clone(),
        }
    }

    /// Keeps only the terms whose factors, read as words, have all modes in
    /// `[-n, n]` after expansion to `s_max`.
    pub fn truncated(&self, n: i32, s_max: i64, st: &mut LoopStraightener) -> Element<S> {
        self.expand(s_max, st).truncate_project(n)
    }

    /// Plain-text serialization, one term per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (m, k) in self.finite.terms() {
            out.push_str(&format!("finite\t{k}\t{m}\n"));
        }
        for (key, p) in &self.families {
            out.push_str(&format!("tail\ts>=0\t{p}\t{}\n", key.display()));
        }
        for (key, k) in &self.doubles {
            let mut parts = central_prefix(key.c, key.z);
            parts.extend(key.factors.iter().map(|p| format!("{p:?}")));
            out.push_str(&format!("tail2\ts,t>=0\t({k})\t{}\n", parts.join("*")));
        }
        out
    }

    /// First nonzero term, for counterexample reports.
    pub fn first_term(&self) -> Option<String> {
        self.dump().lines().next().map(|s| s.to_string())
    }
}

fn central_prefix(c: u16, z: u16) -> Vec<String> {
    let mut parts = Vec::new();
    match c {
        0 => {}
        1 => parts.push("c".to_string()),
        k => parts.push(format!("c^{k}")),
    }
    match z {
        0 => {}
        1 => parts.push("z".to_string()),
        k => parts.push(format!("z^{k}")),
    }
    parts
}

impl FamilyKey {
    pub fn display(&self) -> String {
        let mut parts = central_prefix(self.c, self.z);
        parts.extend(self.factors.iter().map(|p| p.to_string()));
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

fn const_coeff<S: Coefficient>(p: &IndexPoly<S>) -> Result<S, TailError> {
    p.as_constant().ok_or_else(|| {
        TailError::UnsupportedArity("family with an index-dependent coefficient".into())
    })
}

impl<S: Coefficient> fmt::Debug for Completion<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", self.dump().trim_end())
    }
}

/// `[f, x]` for one family and a finite element.
pub fn family_bracket_finite<S: Coefficient>(
    f: &TailFamily<S>,
    x: &Element<S>,
    st: &mut LoopStraightener,
) -> Result<Completion<S>, TailError> {
    Completion::from_family(f.clone(), st)?.bracket_finite(x, st)
}

/// `[f, g]` for two single-index families with constant coefficients and at
/// most two factors each.
pub fn family_bracket_family<S: Coefficient>(
    f: &TailFamily<S>,
    g: &TailFamily<S>,
    st: &mut LoopStraightener,
) -> Result<Completion<S>, TailError> {
    let rank = st.alphabet().rank;
    for h in [f, g] {
        if h.factors.len() > 2 || !h.deltas.is_empty() || h.upper.is_some() || h.lower != 0 {
            return Err(TailError::UnsupportedArity(format!(
                "expected an unconstrained family with at most two factors, got {} factors",
                h.factors.len()
            )));
        }
    }
    let k = const_coeff(&f.coeff)?.mul_ref(&const_coeff(&g.coeff)?);
    let (c, z) = (f.c + g.c, f.z + g.z);
    let pg = g.parity(&rank);
    let mut out = Completion::zero();
    let lift_s = |p: &Pattern| Pattern2 {
        s_slope: p.slope,
        t_slope: 0,
        konst: p.konst,
        row: p.row,
        col: p.col,
    };
    let lift_t = |p: &Pattern| Pattern2 {
        s_slope: 0,
        t_slope: p.slope,
        konst: p.konst,
        row: p.row,
        col: p.col,
    };
    let np = f.factors.len();
    let nq = g.factors.len();
    for i in 0..np {
        let after: u8 = f.factors[i + 1..].iter().map(|p| p.parity(&rank)).sum::<u8>() % 2;
        let outer = super_sign(pg, after);
        let x = f.factors[i];
        for j in 0..nq {
            let before: u8 = g.factors[..j].iter().map(|p| p.parity(&rank)).sum::<u8>() % 2;
            let sign = outer * super_sign(x.parity(&rank), before);
            let y = g.factors[j];
            for (gen, n) in bracket_units(&rank, x.unit(1), y.unit(1)) {
                let Generator::Unit(u) = gen else { continue };
                let mid = Pattern2 {
                    s_slope: x.slope,
                    t_slope: y.slope,
                    konst: x.konst + y.konst,
                    row: u.row,
                    col: u.col,
                };
                let factors: SmallVec<[Pattern2; 4]> = f.factors[..i]
                    .iter()
                    .map(lift_s)
                    .chain(g.factors[..j].iter().map(lift_t))
                    .chain(std::iter::once(mid))
                    .chain(g.factors[j + 1..].iter().map(lift_t))
                    .chain(f.factors[i + 1..].iter().map(lift_s))
                    .collect();
                out.add_double(DoubleKey { factors, c, z }, k.scale_int(sign * n));
            }
            for (gen, n) in bracket_units(&rank, x.unit(1), y.unit(-1)) {
                let (dc, dz) = match gen {
                    Generator::C => (1, 0),
                    Generator::Z => (0, 1),
                    Generator::Unit(_) => continue,
                };
                // δ_{x.slope·s + y.slope·t + K, 0} with weight (x.slope·s + x.konst).
                let kk = (x.konst + y.konst) as i64;
                let (g_pre, g_post) = (&g.factors[..j], &g.factors[j + 1..]);
                let weight = k.scale_int(sign * n);
                if y.slope.abs() == 1 {
                    // t = a s + b
                    let a = -(x.slope as i64) * y.slope as i64;
                    let b = -kk * y.slope as i64;
                    let sub = |p: &Pattern| Pattern {
                        slope: i32::try_from(p.slope as i64 * a).unwrap(),
                        konst: i32::try_from(p.konst as i64 + p.slope as i64 * b).unwrap(),
                        ..*p
                    };
                    let factors: Vec<Pattern> = f.factors[..i]
                        .iter()
                        .copied()
                        .chain(g_pre.iter().map(sub))
                        .chain(g_post.iter().map(sub))
                        .chain(f.factors[i + 1..].iter().copied())
                        .collect();
                    let (lower, upper) = match a.signum() {
                        1 => (0.max(ceil_div(-b, a)), None),
                        -1 => (0, Some(b.div_euclid(-a))),
                        _ if b >= 0 => (0, None),
                        _ => continue,
                    };
                    if upper.is_some_and(|u| u < lower) {
                        continue;
                    }
                    let fam = TailFamily {
                        factors,
                        c: c + dc,
                        z: z + dz,
                        coeff: IndexPoly::linear(x.slope as i64, x.konst as i64).scale(&weight),
                        lower,
                        upper,
                        deltas: Vec::new(),
                    };
                    out.absorb(fam, st)?;
                } else if x.slope.abs() == 1 {
                    // s = a t + b, free index t
                    let a = -(y.slope as i64) * x.slope as i64;
                    let b = -kk * x.slope as i64;
                    let sub = |p: &Pattern| Pattern {
                        slope: i32::try_from(p.slope as i64 * a).unwrap(),
                        konst: i32::try_from(p.konst as i64 + p.slope as i64 * b).unwrap(),
                        ..*p
                    };
                    let factors: Vec<Pattern> = f.factors[..i]
                        .iter()
                        .map(sub)
                        .chain(g_pre.iter().copied())
                        .chain(g_post.iter().copied())
                        .chain(f.factors[i + 1..].iter().map(sub))
                        .collect();
                    let (lower, upper) = match a.signum() {
                        1 => (0.max(ceil_div(-b, a)), None),
                        -1 => (0, Some(b.div_euclid(-a))),
                        _ if b >= 0 => (0, None),
                        _ => continue,
                    };
                    if upper.is_some_and(|u| u < lower) {
                        continue;
                    }
                    // weight x.slope·s + x.konst = x.slope·(a t + b) + x.konst
                    let lin = IndexPoly::linear(x.slope as i64 * a, x.slope as i64 * b + x.konst as i64);
                    let fam = TailFamily {
                        factors,
                        c: c + dc,
                        z: z + dz,
                        coeff: lin.scale(&weight),
                        lower,
                        upper,
                        deltas: Vec::new(),
                    };
                    out.absorb(fam, st)?;
                } else if x.slope == 0 && y.slope == 0 {
                    if kk != 0 {
                        continue;
                    }
                    let factors: SmallVec<[Pattern2; 4]> = f.factors[..i]
                        .iter()
                        .map(lift_s)
                        .chain(g_pre.iter().map(lift_t))
                        .chain(g_post.iter().map(lift_t))
                        .chain(f.factors[i + 1..].iter().map(lift_s))
                        .collect();
                    out.add_double(
                        DoubleKey {
                            factors,
                            c: c + dc,
                            z: z + dz,
                        },
                        weight.scale_int(x.konst as i64),
                    );
                } else {
                    return Err(TailError::UnsupportedArity(format!(
                        "cocycle link with slopes {} and {}",
                        x.slope, y.slope
                    )));
                }
            }
        }
    }
    Ok(out)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

/// Shorthand for a single family `k Σ_s Π E_{r,c}(σ s + κ)`.
pub fn family<S: Coefficient>(k: S, factors: &[(usize, usize, i32, i32)]) -> TailFamily<S> {
    TailFamily::new(
        factors
            .iter()
            .map(|&(r, c, sl, kn)| Pattern::new(r, c, sl, kn))
            .collect(),
        k,
    )
}

/// Monomials of a word of fixed loop units, for building finite parts.
pub fn word_monomial(units: &[LoopGen]) -> Monomial {
    Monomial::from_factors(units)
}
