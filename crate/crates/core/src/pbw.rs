//! PBW basis of the enveloping algebra of the loop superalgebra.
//!
//! Basis monomials are `c^i z^j` times a word of loop matrix units that is
//! non-decreasing in (mode, row, col) with no repeated odd letter. Words are
//! brought into that form by [`Straightener`], which moves letters with
//! `xy = (-1)^{|x||y|} yx + [x, y]` and memoises every insertion it performs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::rc::Rc;

use smallvec::SmallVec;

use crate::affine_gl::{bracket_units, Generator, LoopGen};
use crate::foundation::RankData;
use crate::scalar::Coefficient;

/// A letter together with its image under a bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sym<L> {
    Letter(L),
    C,
    Z,
}

/// Ordered basis of a Lie superalgebra with two central elements `c`, `z`.
pub trait Alphabet {
    type Letter: Copy + Ord + Hash + fmt::Debug;
    fn parity(&self, l: Self::Letter) -> u8;
    fn bracket(&self, x: Self::Letter, y: Self::Letter) -> SmallVec<[(Sym<Self::Letter>, i64); 8]>;
}

pub type Word<L> = SmallVec<[L; 4]>;

/// One term of an integer combination of ordered words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term<L> {
    pub word: Word<L>,
    pub c: u16,
    pub z: u16,
    pub k: i64,
}

type Key<L> = (Word<L>, u16, u16);

fn push<L: Copy + Hash + Eq>(acc: &mut HashMap<Key<L>, i64>, word: Word<L>, c: u16, z: u16, k: i64) {
    if k == 0 {
        return;
    }
    let e = acc.entry((word, c, z)).or_insert(0);
    *e = e.checked_add(k).expect("integer overflow while straightening");
}

fn collect<L: Copy + Hash + Eq>(acc: HashMap<Key<L>, i64>) -> Vec<Term<L>> {
    acc.into_iter()
        .filter(|(_, k)| *k != 0)
        .map(|((word, c, z), k)| Term { word, c, z, k })
        .collect()
}

/// Memoising normal-ordering engine over an [`Alphabet`].
pub struct Straightener<A: Alphabet> {
    alphabet: A,
    memo: HashMap<(A::Letter, Word<A::Letter>), Rc<Vec<Term<A::Letter>>>>,
}

impl<A: Alphabet> Straightener<A> {
    pub fn new(alphabet: A) -> Self {
        Straightener {
            alphabet,
            memo: HashMap::new(),
        }
    }

    pub fn alphabet(&self) -> &A {
        &self.alphabet
    }

    /// Normal form of `g · w` for an already ordered word `w`.
    pub fn insert(&mut self, g: A::Letter, w: &[A::Letter]) -> Rc<Vec<Term<A::Letter>>> {
        let key = (g, Word::from_slice(w));
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let out = Rc::new(self.insert_uncached(g, w));
        self.memo.insert(key, out.clone());
        out
    }

    fn insert_uncached(&mut self, g: A::Letter, w: &[A::Letter]) -> Vec<Term<A::Letter>> {
        let prepend = || {
            let mut word = Word::with_capacity(w.len() + 1);
            word.push(g);
            word.extend_from_slice(w);
            vec![Term { word, c: 0, z: 0, k: 1 }]
        };
        let Some(&h) = w.first() else {
            return prepend();
        };
        let pg = self.alphabet.parity(g);
        if g < h {
            return prepend();
        }
        if g == h {
            return if pg == 1 { Vec::new() } else { prepend() };
        }
        let ph = self.alphabet.parity(h);
        let sign = if pg * ph == 1 { -1 } else { 1 };
        let rest = &w[1..];
        let mut acc = HashMap::new();
        let moved = self.insert(g, rest);
        for t in moved.iter() {
            let again = self.insert(h, &t.word);
            for t2 in again.iter() {
                push(&mut acc, t2.word.clone(), t.c + t2.c, t.z + t2.z, sign * t.k * t2.k);
            }
        }
        for (s, n) in self.alphabet.bracket(g, h) {
            match s {
                Sym::Letter(b) => {
                    let sub = self.insert(b, rest);
                    for t in sub.iter() {
                        push(&mut acc, t.word.clone(), t.c, t.z, n * t.k);
                    }
                }
                Sym::C => push(&mut acc, Word::from_slice(rest), 1, 0, n),
                Sym::Z => push(&mut acc, Word::from_slice(rest), 0, 1, n),
            }
        }
        collect(acc)
    }

    /// Normal form of `word · tail`, with `tail` already ordered.
    pub fn order_before(&mut self, word: &[A::Letter], tail: &[A::Letter]) -> Vec<Term<A::Letter>> {
        let mut acc: Vec<Term<A::Letter>> = vec![Term {
            word: Word::from_slice(tail),
            c: 0,
            z: 0,
            k: 1,
        }];
        for &g in word.iter().rev() {
            let mut next = HashMap::new();
            for t in &acc {
                let ins = self.insert(g, &t.word);
                for t2 in ins.iter() {
                    push(&mut next, t2.word.clone(), t.c + t2.c, t.z + t2.z, t.k * t2.k);
                }
            }
            acc = collect(next);
        }
        acc
    }

    /// Normal form of an arbitrary word.
    pub fn normal_order(&mut self, word: &[A::Letter]) -> Vec<Term<A::Letter>> {
        self.order_before(word, &[])
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

/// The loop matrix units with the order (mode, row, col).
#[derive(Clone, Copy, Debug)]
pub struct LoopAlphabet {
    pub rank: RankData,
}

impl Alphabet for LoopAlphabet {
    type Letter = LoopGen;

    fn parity(&self, l: LoopGen) -> u8 {
        l.parity(&self.rank)
    }

    fn bracket(&self, x: LoopGen, y: LoopGen) -> SmallVec<[(Sym<LoopGen>, i64); 8]> {
        bracket_units(&self.rank, x, y)
            .into_iter()
            .map(|(g, k)| {
                let s = match g {
                    Generator::Unit(u) => Sym::Letter(u),
                    Generator::C => Sym::C,
                    Generator::Z => Sym::Z,
                };
                (s, k)
            })
            .collect()
    }
}

pub type LoopStraightener = Straightener<LoopAlphabet>;

pub fn straightener(rank: RankData) -> LoopStraightener {
    Straightener::new(LoopAlphabet { rank })
}

/// `c^c z^z` times an ordered word of loop matrix units.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub factors: Word<LoopGen>,
    pub c: u16,
    pub z: u16,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_factors(factors: &[LoopGen]) -> Self {
        Monomial {
            factors: Word::from_slice(factors),
            c: 0,
            z: 0,
        }
    }

    pub fn parity(&self, rank: &RankData) -> u8 {
        self.factors.iter().map(|g| g.parity(rank)).sum::<u8>() % 2
    }

    /// Sum of the modes.
    pub fn degree(&self) -> i64 {
        self.factors.iter().map(|g| g.mode as i64).sum()
    }

    /// Number of loop factors, centrals excluded.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty() && self.c == 0 && self.z == 0
    }

    pub fn is_ordered(&self, rank: &RankData) -> bool {
        self.factors
            .windows(2)
            .all(|w| w[0] < w[1] || (w[0] == w[1] && w[0].parity(rank) == 0))
    }

    pub fn modes_within(&self, n: i32) -> bool {
        self.factors.iter().all(|g| g.mode.abs() <= n)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.c {
            0 => {}
            1 => parts.push("c".into()),
            k => parts.push(format!("c^{k}")),
        }
        match self.z {
            0 => {}
            1 => parts.push("z".into()),
            k => parts.push(format!("z^{k}")),
        }
        parts.extend(self.factors.iter().map(|g| g.to_string()));
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// An element of the enveloping algebra in PBW normal form.
#[derive(Clone, PartialEq)]
pub struct Element<S> {
    terms: BTreeMap<Monomial, S>,
}

impl<S: Coefficient> Default for Element<S> {
    fn default() -> Self {
        Element {
            terms: BTreeMap::new(),
        }
    }
}

impl<S: Coefficient> Element<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(k: S) -> Self {
        Self::monomial(Monomial::one(), k)
    }

    pub fn one() -> Self {
        Self::scalar(S::one())
    }

    pub fn monomial(m: Monomial, k: S) -> Self {
        let mut e = Self::zero();
        e.add_term(m, k);
        e
    }

    pub fn unit(row: usize, col: usize, mode: i32) -> Self {
        Self::monomial(Monomial::from_factors(&[LoopGen::new(row, col, mode)]), S::one())
    }

    pub fn central_c() -> Self {
        Self::monomial(Monomial { c: 1, ..Monomial::one() }, S::one())
    }

    pub fn central_z() -> Self {
        Self::monomial(Monomial { z: 1, ..Monomial::one() }, S::one())
    }

    /// Normal form of `k · g_1 ⋯ g_r` for an arbitrary word.
    pub fn from_word(st: &mut LoopStraightener, word: &[Generator], k: S) -> Self {
        let mut c = 0;
        let mut z = 0;
        let mut units: Word<LoopGen> = Word::new();
        for g in word {
            match g {
                Generator::Unit(u) => units.push(*u),
                Generator::C => c += 1,
                Generator::Z => z += 1,
            }
        }
        let mut out = Self::zero();
        for t in st.normal_order(&units) {
            out.add_term(
                Monomial {
                    factors: t.word,
                    c: t.c + c,
                    z: t.z + z,
                },
                k.scale_int(t.k),
            );
        }
        out
    }

    pub fn add_term(&mut self, m: Monomial, k: S) {
        if k.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(c) => {
                *c = c.add_ref(&k);
                if c.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, k);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, S)> {
        self.terms.into_iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (m, k) in &o.terms {
            self.add_term(m.clone(), k.clone());
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &S) -> Self {
        let mut r = Self::zero();
        if k.is_zero() {
            return r;
        }
        for (m, c) in &self.terms {
            r.add_term(m.clone(), c.mul_ref(k));
        }
        r
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn map_coefficients<T: Coefficient>(&self, f: impl Fn(&S) -> T) -> Element<T> {
        let mut r = Element::zero();
        for (m, c) in &self.terms {
            r.add_term(m.clone(), f(c));
        }
        r
    }

    /// Product of two normal-ordered elements.
    pub fn mul(&self, o: &Self, st: &mut LoopStraightener) -> Self {
        let mut r = Self::zero();
        for (mx, cx) in &self.terms {
            for (my, cy) in &o.terms {
                let k = cx.mul_ref(cy);
                for t in st.order_before(&mx.factors, &my.factors) {
                    r.add_term(
                        Monomial {
                            factors: t.word,
                            c: mx.c + my.c + t.c,
                            z: mx.z + my.z + t.z,
                        },
                        k.scale_int(t.k),
                    );
                }
            }
        }
        r
    }

    /// Super commutator, bilinear over the homogeneous components.
    pub fn bracket(&self, o: &Self, st: &mut LoopStraightener) -> Self {
        let rank = st.alphabet().rank;
        let mut r = Self::zero();
        for (mx, cx) in &self.terms {
            let px = mx.parity(&rank);
            for (my, cy) in &o.terms {
                let k = cx.mul_ref(cy);
                let sign = if px * my.parity(&rank) == 1 { 1 } else { -1 };
                for t in st.order_before(&mx.factors, &my.factors) {
                    r.add_term(
                        Monomial {
                            factors: t.word,
                            c: mx.c + my.c + t.c,
                            z: mx.z + my.z + t.z,
                        },
                        k.scale_int(t.k),
                    );
                }
                for t in st.order_before(&my.factors, &mx.factors) {
                    r.add_term(
                        Monomial {
                            factors: t.word,
                            c: mx.c + my.c + t.c,
                            z: mx.z + my.z + t.z,
                        },
                        k.scale_int(sign * t.k),
                    );
                }
            }
        }
        r
    }

    /// Anticommutator `xy + yx`.
    pub fn anticommutator(&self, o: &Self, st: &mut LoopStraightener) -> Self {
        self.mul(o, st).add(&o.mul(self, st))
    }

    pub fn pow(&self, k: u32, st: &mut LoopStraightener) -> Self {
        let mut r = Self::one();
        for _ in 0..k {
            r = r.mul(self, st);
        }
        r
    }

    /// Degree if homogeneous; `Some(0)` for zero.
    pub fn degree(&self) -> Option<i64> {
        let mut d = None;
        for m in self.terms.keys() {
            let e = m.degree();
            match d {
                None => d = Some(e),
                Some(x) if x != e => return None,
                _ => {}
            }
        }
        Some(d.unwrap_or(0))
    }

    pub fn parity(&self, rank: &RankData) -> Option<u8> {
        let mut p = None;
        for m in self.terms.keys() {
            let q = m.parity(rank);
            match p {
                None => p = Some(q),
                Some(x) if x != q => return None,
                _ => {}
            }
        }
        Some(p.unwrap_or(0))
    }

    /// Keeps the terms all of whose factors have `|mode| <= n`.
    pub fn truncate_project(&self, n: i32) -> Self {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.modes_within(n))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_normal(&self, rank: &RankData) -> bool {
        self.terms.keys().all(|m| m.is_ordered(rank))
    }

    /// Substitutes scalars for `c` and `z`.
    pub fn specialize_central(&self, c: &S, z: &S) -> Self {
        let mut r = Self::zero();
        for (m, k) in &self.terms {
            let k = k.mul_ref(&c.pow(m.c as u32)).mul_ref(&z.pow(m.z as u32));
            r.add_term(
                Monomial {
                    factors: m.factors.clone(),
                    c: 0,
                    z: 0,
                },
                k,
            );
        }
        r
    }

    /// Terms whose monomial satisfies `pred`.
    pub fn filter(&self, pred: impl Fn(&Monomial) -> bool) -> Self {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn max_abs_mode(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|m| m.factors.iter().map(|g| g.mode.abs()))
            .max()
            .unwrap_or(0)
    }
}

impl<S: Coefficient> fmt::Debug for Element<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<S: Coefficient> fmt::Display for Element<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c}) {m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Letters of a basis adapted to `gl = sl ⊕ C E_11`:
/// off-diagonal units, `h_k = (-1)^{p(k)} E_kk - (-1)^{p(k+1)} E_{k+1,k+1}`
/// for `1 <= k < m+n`, and `E_11`. Within a mode, `E_11` comes last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlLetter {
    pub mode: i32,
    pub kind: SlKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlKind {
    Off(u8, u8),
    H(u8),
    E11,
}

#[derive(Clone, Copy, Debug)]
pub struct SlAlphabet {
    pub rank: RankData,
}

impl SlAlphabet {
    /// The letter as a combination of matrix units.
    fn to_units(&self, l: SlLetter) -> SmallVec<[(LoopGen, i64); 2]> {
        let s = l.mode;
        match l.kind {
            SlKind::Off(a, b) => smallvec::smallvec![(LoopGen { mode: s, row: a, col: b }, 1)],
            SlKind::H(k) => {
                let k = k as usize;
                smallvec::smallvec![
                    (LoopGen::new(k, k, s), self.rank.sign(k)),
                    (LoopGen::new(k + 1, k + 1, s), -self.rank.sign(k + 1)),
                ]
            }
            SlKind::E11 => smallvec::smallvec![(LoopGen::new(1, 1, s), 1)],
        }
    }

    /// `E_aa = (-1)^{p(a)} (E_11 - Σ_{k<a} h_k)`.
    pub fn from_unit(&self, g: LoopGen) -> SmallVec<[(SlLetter, i64); 4]> {
        let mode = g.mode;
        if g.row != g.col {
            return smallvec::smallvec![(SlLetter { mode, kind: SlKind::Off(g.row, g.col) }, 1)];
        }
        let a = g.row as usize;
        let s = self.rank.sign(a);
        let mut out: SmallVec<[(SlLetter, i64); 4]> =
            smallvec::smallvec![(SlLetter { mode, kind: SlKind::E11 }, s)];
        for k in 1..a {
            out.push((SlLetter { mode, kind: SlKind::H(k as u8) }, -s));
        }
        out
    }
}

impl Alphabet for SlAlphabet {
    type Letter = SlLetter;

    fn parity(&self, l: SlLetter) -> u8 {
        match l.kind {
            SlKind::Off(a, b) => self.rank.unit_parity(a as usize, b as usize),
            _ => 0,
        }
    }

    fn bracket(&self, x: SlLetter, y: SlLetter) -> SmallVec<[(Sym<SlLetter>, i64); 8]> {
        let mut acc: BTreeMap<(u8, Option<SlLetter>), i64> = BTreeMap::new();
        for (gx, kx) in self.to_units(x) {
            for (gy, ky) in self.to_units(y) {
                for (g, n) in bracket_units(&self.rank, gx, gy) {
                    let k = kx * ky * n;
                    match g {
                        Generator::Unit(u) => {
                            for (l, m) in self.from_unit(u) {
                                *acc.entry((0, Some(l))).or_insert(0) += k * m;
                            }
                        }
                        Generator::C => *acc.entry((1, None)).or_insert(0) += k,
                        Generator::Z => *acc.entry((2, None)).or_insert(0) += k,
                    }
                }
            }
        }
        acc.into_iter()
            .filter(|(_, k)| *k != 0)
            .map(|((tag, l), k)| {
                let s = match (tag, l) {
                    (0, Some(l)) => Sym::Letter(l),
                    (1, _) => Sym::C,
                    _ => Sym::Z,
                };
                (s, k)
            })
            .collect()
    }
}

/// Splitting of an element along `U(sl-hat) ⊕ (complement)`.
#[derive(Clone, Debug)]
pub struct SlSplit<S: Coefficient> {
    pub in_sl: bool,
    pub sl_part: Element<S>,
    pub complement: Element<S>,
}

/// Decides membership in the enveloping algebra of `sl(m|n) ⊗ C[t,t^-1] ⊕ Cc`.
///
/// The element is rewritten in the PBW basis of [`SlAlphabet`]; it lies in the
/// subalgebra iff no basis monomial carries an `E_11` letter or a power of `z`.
pub fn sl_membership<S: Coefficient>(rank: &RankData, x: &Element<S>) -> SlSplit<S> {
    let alphabet = SlAlphabet { rank: *rank };
    let mut st = Straightener::new(alphabet);
    let mut adapted: HashMap<Key<SlLetter>, S> = HashMap::new();
    for (m, k) in x.terms() {
        let mut words: Vec<(Word<SlLetter>, i64)> = vec![(Word::new(), 1)];
        for g in &m.factors {
            let opts = alphabet.from_unit(*g);
            let mut next = Vec::with_capacity(words.len() * opts.len());
            for (w, n) in &words {
                for (l, j) in &opts {
                    let mut w2 = w.clone();
                    w2.push(*l);
                    next.push((w2, n * j));
                }
            }
            words = next;
        }
        for (w, n) in words {
            for t in st.normal_order(&w) {
                let key = (t.word, t.c + m.c, t.z + m.z);
                let add = k.scale_int(n * t.k);
                let slot = adapted.entry(key).or_insert_with(S::zero);
                *slot = slot.add_ref(&add);
            }
        }
    }
    let mut lt = straightener(*rank);
    let mut sl_part = Element::zero();
    let mut in_sl = true;
    for ((w, c, z), k) in adapted {
        if k.is_zero() {
            continue;
        }
        if z > 0 || w.iter().any(|l| l.kind == SlKind::E11) {
            in_sl = false;
            continue;
        }
        let mut words: Vec<(Word<LoopGen>, i64)> = vec![(Word::new(), 1)];
        for l in &w {
            let opts = alphabet.to_units(*l);
            let mut next = Vec::new();
            for (u, n) in &words {
                for (g, j) in &opts {
                    let mut u2 = u.clone();
                    u2.push(*g);
                    next.push((u2, n * j));
                }
            }
            words = next;
        }
        for (u, n) in words {
            for t in lt.normal_order(&u) {
                sl_part.add_term(
                    Monomial {
                        factors: t.word,
                        c: c + t.c,
                        z: t.z,
                    },
                    k.scale_int(n * t.k),
                );
            }
        }
    }
    let complement = x.sub(&sl_part);
    SlSplit {
        in_sl,
        sl_part,
        complement,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;
    type E = Element<Q>;

    fn u(r: usize, c: usize, s: i32) -> E {
        E::unit(r, c, s)
    }

    #[test]
    fn odd_square_vanishes() {
        let rank = RankData::superalgebra(2, 2);
        let mut st = straightener(rank);
        let x = u(1, 3, 1);
        assert!(x.mul(&x, &mut st).is_zero());
        let y = u(1, 2, 1);
        assert_eq!(y.mul(&y, &mut st).len(), 1);
    }

    #[test]
    fn reordering_produces_bracket() {
        let rank = RankData::superalgebra(2, 2);
        let mut st = straightener(rank);
        // E21(1) E12(-1) = E12(-1) E21(1) + E22(0) - E11(0) + c
        let lhs = u(2, 1, 1).mul(&u(1, 2, -1), &mut st);
        let mut rhs = u(1, 2, -1).mul(&u(2, 1, 1), &mut st);
        rhs.add_assign(&u(2, 2, 0));
        rhs.add_assign(&u(1, 1, 0).neg());
        rhs.add_assign(&E::central_c());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn sl_membership_examples() {
        let rank = RankData::superalgebra(2, 2);
        let h = u(1, 1, 0).sub(&u(2, 2, 0));
        assert!(sl_membership(&rank, &h).in_sl);
        let split = sl_membership(&rank, &u(1, 1, 2));
        assert!(!split.in_sl);
        assert!(split.sl_part.is_zero());
        // E_22 + E_33 has supertrace 0 in gl(2|2).
        assert!(sl_membership(&rank, &u(2, 2, 1).add(&u(3, 3, 1))).in_sl);
        assert!(!sl_membership(&rank, &E::central_z()).in_sl);
        assert!(sl_membership(&rank, &E::central_c()).in_sl);
    }
}
