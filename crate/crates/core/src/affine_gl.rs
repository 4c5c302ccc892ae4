//! The affine Lie superalgebra `gl(m|n) ⊗ C[t, t^-1] ⊕ Cc ⊕ Cz`.
//!
//! On matrix units the bracket is
//!
//! ```text
//! [E_ab(u), E_cd(v)] = δ_bc E_ad(u+v) − (−1)^{|E_ab||E_cd|} δ_da E_cb(u+v)
//!                      + u δ_{u+v,0} ( δ_bc δ_ad (−1)^{p(a)} c + δ_ab δ_cd (−1)^{p(a)+p(c)} z )
//! ```
//!
//! The `c`-part is the supertrace cocycle `u δ_{u+v,0} str(xy)`, the `z`-part is
//! `u δ_{u+v,0} str(x) str(y)`; on `sl(m|n)` the latter vanishes.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::foundation::RankData;
use crate::scalar::Coefficient;

/// `E_{row,col} ⊗ t^mode`. The derived order (mode, row, col) is the PBW order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LoopGen {
    pub mode: i32,
    pub row: u8,
    pub col: u8,
}

impl LoopGen {
    pub fn new(row: usize, col: usize, mode: i32) -> Self {
        LoopGen {
            mode,
            row: row as u8,
            col: col as u8,
        }
    }

    pub fn parity(&self, rank: &RankData) -> u8 {
        rank.unit_parity(self.row as usize, self.col as usize)
    }

    pub fn is_diagonal(&self) -> bool {
        self.row == self.col
    }
}

impl fmt::Debug for LoopGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{},{}({})", self.row, self.col, self.mode)
    }
}

impl fmt::Display for LoopGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A basis element of the affine superalgebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    Unit(LoopGen),
    C,
    Z,
}

impl Generator {
    pub fn unit(row: usize, col: usize, mode: i32) -> Self {
        Generator::Unit(LoopGen::new(row, col, mode))
    }

    pub fn parity(&self, rank: &RankData) -> u8 {
        match self {
            Generator::Unit(g) => g.parity(rank),
            _ => 0,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Unit(g) => write!(f, "{g}"),
            Generator::C => write!(f, "c"),
            Generator::Z => write!(f, "z"),
        }
    }
}

/// Integer linear combination produced by bracketing two basis elements.
pub type BasisBracket = SmallVec<[(Generator, i64); 4]>;

/// `str(E_ab E_cd) = δ_bc δ_ad (−1)^{p(a)}`.
pub fn supertrace_pair(rank: &RankData, a: usize, b: usize, c: usize, d: usize) -> i64 {
    for idx in [a, b, c, d] {
        assert!(
            (1..=rank.size()).contains(&idx),
            "matrix index {idx} out of range 1..={}",
            rank.size()
        );
    }
    if b == c && a == d {
        rank.sign(a)
    } else {
        0
    }
}

/// Bracket of two loop matrix units.
pub fn bracket_units(rank: &RankData, x: LoopGen, y: LoopGen) -> BasisBracket {
    let (a, b, u) = (x.row, x.col, x.mode);
    let (c, d, v) = (y.row, y.col, y.mode);
    let mut out = BasisBracket::new();
    let w = u + v;
    if b == c {
        out.push((Generator::Unit(LoopGen { mode: w, row: a, col: d }), 1));
    }
    if d == a {
        let super_sign = if x.parity(rank) * y.parity(rank) == 1 { -1 } else { 1 };
        let coef = -super_sign;
        if let Some(slot) = out.iter_mut().find(|(g, _)| {
            *g == Generator::Unit(LoopGen { mode: w, row: c, col: b })
        }) {
            slot.1 += coef;
            if slot.1 == 0 {
                out.retain(|(_, k)| *k != 0);
            }
        } else {
            out.push((Generator::Unit(LoopGen { mode: w, row: c, col: b }), coef));
        }
    }
    if w == 0 && u != 0 {
        let u = u as i64;
        if b == c && a == d {
            out.push((Generator::C, u * rank.sign(a as usize)));
        }
        if a == b && c == d {
            out.push((Generator::Z, u * rank.sign(a as usize) * rank.sign(c as usize)));
        }
    }
    out
}

/// Bracket of two basis elements (centrals bracket to zero).
pub fn bracket_basis(rank: &RankData, x: Generator, y: Generator) -> BasisBracket {
    match (x, y) {
        (Generator::Unit(a), Generator::Unit(b)) => bracket_units(rank, a, b),
        _ => BasisBracket::new(),
    }
}

/// A finite linear combination of basis elements.
#[derive(Clone, PartialEq, Debug)]
pub struct LieElement<S> {
    terms: BTreeMap<Generator, S>,
}

impl<S: Coefficient> Default for LieElement<S> {
    fn default() -> Self {
        LieElement {
            terms: BTreeMap::new(),
        }
    }
}

impl<S: Coefficient> LieElement<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(g: Generator) -> Self {
        Self::term(g, S::one())
    }

    pub fn term(g: Generator, coeff: S) -> Self {
        let mut e = Self::zero();
        e.add_term(g, coeff);
        e
    }

    pub fn add_term(&mut self, g: Generator, coeff: S) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(c) => {
                *c = c.add_ref(&coeff);
                if c.is_zero() {
                    self.terms.remove(&g);
                }
            }
            None => {
                self.terms.insert(g, coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Generator, &S)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, g: &Generator) -> S {
        self.terms.get(g).cloned().unwrap_or_else(S::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (g, c) in &o.terms {
            r.add_term(*g, c.clone());
        }
        r
    }

    pub fn scale(&self, k: &S) -> Self {
        let mut r = Self::zero();
        for (g, c) in &self.terms {
            r.add_term(*g, c.mul_ref(k));
        }
        r
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    /// Parity if homogeneous (`Some(0)` for zero).
    pub fn parity(&self, rank: &RankData) -> Option<u8> {
        let mut p = None;
        for g in self.terms.keys() {
            let q = g.parity(rank);
            match p {
                None => p = Some(q),
                Some(x) if x != q => return None,
                _ => {}
            }
        }
        Some(p.unwrap_or(0))
    }

    /// Super bracket, extended bilinearly.
    pub fn bracket(&self, rank: &RankData, o: &Self) -> Self {
        let mut r = Self::zero();
        for (x, cx) in &self.terms {
            for (y, cy) in &o.terms {
                let k = cx.mul_ref(cy);
                for (g, n) in bracket_basis(rank, *x, *y) {
                    r.add_term(g, k.scale_int(n));
                }
            }
        }
        r
    }
}

impl<S: Coefficient> fmt::Display for LieElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(g, c)| format!("({c})*{g}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
