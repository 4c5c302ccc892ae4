//! Generators and the finite presentation of the affine super Yangian, and a
//! checker for assignments of generators to completed elements.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::foundation::{FoundationError, RankData};
use crate::pbw::{straightener, Element, LoopStraightener, Monomial};
use crate::scalar::Coefficient;
use crate::tails::{Completion, TailError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum YangianError {
    #[error(transparent)]
    Rank(#[from] FoundationError),
    #[error(transparent)]
    Tail(#[from] TailError),
    #[error("no image for generator {0}")]
    Missing(YangianGenerator),
    #[error("level {0} exceeds the supported maximum 3")]
    LevelTooLarge(u32),
    #[error("division by zero in {0}")]
    Singular(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "x+")]
    XPlus,
    #[serde(rename = "x-")]
    XMinus,
    #[serde(rename = "h")]
    H,
}

impl Kind {
    /// `+1` for `x+`, `-1` for `x-`, `0` for `h`.
    pub fn sign(self) -> i64 {
        match self {
            Kind::XPlus => 1,
            Kind::XMinus => -1,
            Kind::H => 0,
        }
    }

    pub fn x(sign: i64) -> Kind {
        if sign > 0 {
            Kind::XPlus
        } else {
            Kind::XMinus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct YangianGenerator {
    pub kind: Kind,
    pub node: usize,
    pub level: u32,
}

impl YangianGenerator {
    pub fn new(kind: Kind, node: usize, level: u32) -> Self {
        YangianGenerator { kind, node, level }
    }

    pub fn h(node: usize, level: u32) -> Self {
        Self::new(Kind::H, node, level)
    }

    pub fn x(sign: i64, node: usize, level: u32) -> Self {
        Self::new(Kind::x(sign), node, level)
    }

    pub fn parity(&self, rank: &RankData) -> u8 {
        u8::from(self.kind != Kind::H && rank.is_odd_node(self.node))
    }
}

impl fmt::Display for YangianGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::XPlus => write!(f, "x+[{},{}]", self.node, self.level),
            Kind::XMinus => write!(f, "x-[{},{}]", self.node, self.level),
            Kind::H => write!(f, "h[{},{}]", self.node, self.level),
        }
    }
}

impl std::str::FromStr for YangianGenerator {
    type Err = String;

    /// Inverse of `Display`: `x+[i,r]`, `x-[i,r]`, `h[i,r]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("cannot parse generator {s:?}; expected x+[i,r], x-[i,r] or h[i,r]");
        let (head, rest) = s.trim().split_once('[').ok_or_else(bad)?;
        let kind = match head {
            "x+" => Kind::XPlus,
            "x-" => Kind::XMinus,
            "h" => Kind::H,
            _ => return Err(bad()),
        };
        let (i, r) = rest.strip_suffix(']').and_then(|x| x.split_once(',')).ok_or_else(bad)?;
        let node = i.trim().parse().map_err(|_| bad())?;
        let level = r.trim().parse().map_err(|_| bad())?;
        Ok(YangianGenerator { kind, node, level })
    }
}

/// `num/den · ħ^hbar · ((ε1−ε2)/2)^half_diff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelScalar {
    pub num: i64,
    pub den: i64,
    pub hbar: u8,
    pub half_diff: u8,
}

impl RelScalar {
    pub fn int(k: i64) -> Self {
        RelScalar {
            num: k,
            den: 1,
            hbar: 0,
            half_diff: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn value<S: Coefficient>(&self, eps1: &S, eps2: &S) -> S {
        let hbar = eps1.add_ref(eps2);
        let half = (eps1.clone() - eps2.clone()).mul_ref(&S::ratio(1, 2));
        S::ratio(self.num, self.den)
            .mul_ref(&hbar.pow(self.hbar as u32))
            .mul_ref(&half.pow(self.half_diff as u32))
    }
}

impl fmt::Display for RelScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "{}/{}", self.num, self.den)?;
        }
        if self.hbar > 0 {
            write!(f, "*hbar")?;
        }
        if self.half_diff > 0 {
            write!(f, "*(e1-e2)/2")?;
        }
        Ok(())
    }
}

/// Formal expression in the generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Zero,
    Gen(YangianGenerator),
    /// `h̃_{i,1} = h_{i,1} − (ħ/2) h_{i,0}²`.
    HTilde(usize),
    Scale(RelScalar, Box<Expr>),
    Sum(Vec<Expr>),
    Bracket(Box<Expr>, Box<Expr>),
    /// `{x, y} = xy + yx`.
    Anti(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn gen(g: YangianGenerator) -> Self {
        Expr::Gen(g)
    }

    pub fn bracket(a: Expr, b: Expr) -> Self {
        Expr::Bracket(Box::new(a), Box::new(b))
    }

    pub fn anti(a: Expr, b: Expr) -> Self {
        Expr::Anti(Box::new(a), Box::new(b))
    }

    pub fn scale(k: RelScalar, e: Expr) -> Self {
        if k.is_zero() {
            Expr::Zero
        } else {
            Expr::Scale(k, Box::new(e))
        }
    }

    pub fn sum(terms: Vec<Expr>) -> Self {
        let terms: Vec<Expr> = terms.into_iter().filter(|t| *t != Expr::Zero).collect();
        match terms.len() {
            0 => Expr::Zero,
            1 => terms.into_iter().next().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    /// `(ad a)^k (b)`.
    pub fn ad_power(a: &Expr, k: usize, b: Expr) -> Self {
        (0..k).fold(b, |acc, _| Expr::bracket(a.clone(), acc))
    }

    fn generators(&self, out: &mut Vec<YangianGenerator>) {
        match self {
            Expr::Zero => {}
            Expr::Gen(g) => out.push(*g),
            Expr::HTilde(i) => {
                out.push(YangianGenerator::h(*i, 1));
                out.push(YangianGenerator::h(*i, 0));
            }
            Expr::Scale(_, e) => e.generators(out),
            Expr::Sum(v) => v.iter().for_each(|e| e.generators(out)),
            Expr::Bracket(a, b) | Expr::Anti(a, b) => {
                a.generators(out);
                b.generators(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Zero => write!(f, "0"),
            Expr::Gen(g) => write!(f, "{g}"),
            Expr::HTilde(i) => write!(f, "ht[{i},1]"),
            Expr::Scale(k, e) => write!(f, "({k})*{e}"),
            Expr::Sum(v) => {
                let parts: Vec<String> = v.iter().map(|e| e.to_string()).collect();
                write!(f, "({})", parts.join(" + "))
            }
            Expr::Bracket(a, b) => write!(f, "[{a}, {b}]"),
            Expr::Anti(a, b) => write!(f, "{{{a}, {b}}}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationId {
    #[serde(rename = "eq2.1")]
    Eq21,
    #[serde(rename = "eq2.2")]
    Eq22,
    #[serde(rename = "eq2.3")]
    Eq23,
    #[serde(rename = "eq2.4")]
    Eq24,
    #[serde(rename = "eq2.5")]
    Eq25,
    #[serde(rename = "eq2.6")]
    Eq26,
    #[serde(rename = "eq2.7")]
    Eq27,
    #[serde(rename = "eq2.8")]
    Eq28,
    #[serde(rename = "eq2.9")]
    Eq29,
    #[serde(rename = "eq1.2")]
    Eq12,
    #[serde(rename = "eq1.4")]
    Eq14,
    #[serde(rename = "eq1.5")]
    Eq15,
}

impl RelationId {
    pub const MINIMAL: [RelationId; 9] = [
        RelationId::Eq21,
        RelationId::Eq22,
        RelationId::Eq23,
        RelationId::Eq24,
        RelationId::Eq25,
        RelationId::Eq26,
        RelationId::Eq27,
        RelationId::Eq28,
        RelationId::Eq29,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationId::Eq21 => "eq2.1",
            RelationId::Eq22 => "eq2.2",
            RelationId::Eq23 => "eq2.3",
            RelationId::Eq24 => "eq2.4",
            RelationId::Eq25 => "eq2.5",
            RelationId::Eq26 => "eq2.6",
            RelationId::Eq27 => "eq2.7",
            RelationId::Eq28 => "eq2.8",
            RelationId::Eq29 => "eq2.9",
            RelationId::Eq12 => "eq1.2",
            RelationId::Eq14 => "eq1.4",
            RelationId::Eq15 => "eq1.5",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::MINIMAL
            .iter()
            .chain([RelationId::Eq12, RelationId::Eq14, RelationId::Eq15].iter())
            .copied()
            .find(|r| r.as_str() == s)
    }

    pub fn anchor(self) -> &'static str {
        match self {
            RelationId::Eq12 | RelationId::Eq14 | RelationId::Eq15 => "Definition 2.1",
            _ => "Theorem 2.2",
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Instance slots of a relation; unused slots are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RelParams {
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub sign: Option<i64>,
    pub r: Option<u32>,
    pub s: Option<u32>,
    pub variant: Option<u8>,
}

impl fmt::Display for RelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(i) = self.i {
            parts.push(format!("i={i}"));
        }
        if let Some(j) = self.j {
            parts.push(format!("j={j}"));
        }
        if let Some(s) = self.sign {
            parts.push(if s > 0 { "+".to_string() } else { "-".to_string() });
        }
        if let Some(r) = self.r {
            parts.push(format!("r={r}"));
        }
        if let Some(s) = self.s {
            parts.push(format!("s={s}"));
        }
        if let Some(v) = self.variant {
            parts.push(format!("v={v}"));
        }
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub id: RelationId,
    pub params: RelParams,
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Relation {
    /// `eq2.5[i=1,j=2,+]`.
    pub fn label(&self) -> String {
        format!("{}[{}]", self.id, self.params)
    }

    pub fn generators(&self) -> Vec<YangianGenerator> {
        let mut out = Vec::new();
        self.lhs.generators(&mut out);
        self.rhs.generators(&mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Highest generator level used.
    pub fn max_level(&self) -> u32 {
        self.generators().iter().map(|g| g.level).max().unwrap_or(0)
    }
}

fn x(sign: i64, i: usize, r: u32) -> Expr {
    Expr::Gen(YangianGenerator::x(sign, i, r))
}

fn h(i: usize, r: u32) -> Expr {
    Expr::Gen(YangianGenerator::h(i, r))
}

fn half_hbar(k: i64) -> RelScalar {
    RelScalar {
        num: k,
        den: 2,
        hbar: 1,
        half_diff: 0,
    }
}

fn half_diff(k: i64) -> RelScalar {
    RelScalar {
        num: k,
        den: 1,
        hbar: 0,
        half_diff: 1,
    }
}

fn params(i: usize, j: Option<usize>, sign: Option<i64>) -> RelParams {
    RelParams {
        i: Some(i),
        j,
        sign,
        ..RelParams::default()
    }
}

/// The relation `[x±_{i,r+1}, x±_{j,s}] − [x±_{i,r}, x±_{j,s+1}] = ±a_ij ħ/2 {x±_{i,r}, x±_{j,s}} − m_ij (ε1−ε2)/2 [x±_{i,r}, x±_{j,s}]`.
fn xx_relation(rank: &RankData, i: usize, j: usize, sign: i64, r: u32, s: u32) -> (Expr, Expr) {
    let (a, m) = (rank.a(i, j), rank.mm(i, j));
    let lhs = Expr::sum(vec![
        Expr::bracket(x(sign, i, r + 1), x(sign, j, s)),
        Expr::scale(RelScalar::int(-1), Expr::bracket(x(sign, i, r), x(sign, j, s + 1))),
    ]);
    let rhs = Expr::sum(vec![
        Expr::scale(half_hbar(sign * a), Expr::anti(x(sign, i, r), x(sign, j, s))),
        Expr::scale(half_diff(-m), Expr::bracket(x(sign, i, r), x(sign, j, s))),
    ]);
    (lhs, rhs)
}

/// All instances of the finite presentation, in a fixed order.
pub fn minimal_relations(rank: &RankData) -> Result<Vec<Relation>, YangianError> {
    RankData::new(rank.m(), rank.n())?;
    let nn = rank.size();
    let signs = [1i64, -1];
    let mut out = Vec::new();
    let mut push = |id, params, lhs, rhs| out.push(Relation { id, params, lhs, rhs });

    let hs: Vec<(usize, u32)> = (0..=1).flat_map(|r| (0..nn).map(move |i| (i, r))).collect();
    for (p, &(i, r)) in hs.iter().enumerate() {
        for &(j, s) in &hs[p + 1..] {
            let rp = RelParams {
                r: Some(r),
                s: Some(s),
                ..params(i, Some(j), None)
            };
            push(RelationId::Eq21, rp, Expr::bracket(h(i, r), h(j, s)), Expr::Zero);
        }
    }
    for i in 0..nn {
        for j in 0..nn {
            let rhs = if i == j { h(i, 0) } else { Expr::Zero };
            push(RelationId::Eq22, params(i, Some(j), None), Expr::bracket(x(1, i, 0), x(-1, j, 0)), rhs);
        }
    }
    for i in 0..nn {
        for j in 0..nn {
            let rhs = if i == j { h(i, 1) } else { Expr::Zero };
            for v in 0..2u8 {
                let lhs = if v == 0 {
                    Expr::bracket(x(1, i, 1), x(-1, j, 0))
                } else {
                    Expr::bracket(x(1, i, 0), x(-1, j, 1))
                };
                let rp = RelParams {
                    variant: Some(v),
                    ..params(i, Some(j), None)
                };
                push(RelationId::Eq23, rp, lhs, rhs.clone());
            }
        }
    }
    for i in 0..nn {
        for j in 0..nn {
            for sign in signs {
                for r in 0..=1 {
                    let rp = RelParams {
                        r: Some(r),
                        ..params(i, Some(j), Some(sign))
                    };
                    push(
                        RelationId::Eq24,
                        rp,
                        Expr::bracket(h(i, 0), x(sign, j, r)),
                        Expr::scale(RelScalar::int(sign * rank.a(i, j)), x(sign, j, r)),
                    );
                }
            }
        }
    }
    for i in 0..nn {
        for j in 0..nn {
            for sign in signs {
                let (a, m) = (rank.a(i, j), rank.mm(i, j));
                let rhs = Expr::sum(vec![
                    Expr::scale(RelScalar::int(sign * a), x(sign, j, 1)),
                    Expr::scale(half_diff(-sign * a * m), x(sign, j, 0)),
                ]);
                push(
                    RelationId::Eq25,
                    params(i, Some(j), Some(sign)),
                    Expr::bracket(Expr::HTilde(i), x(sign, j, 0)),
                    rhs,
                );
            }
        }
    }
    for i in 0..nn {
        for j in 0..nn {
            for sign in signs {
                let (lhs, rhs) = xx_relation(rank, i, j, sign, 0, 0);
                push(RelationId::Eq26, params(i, Some(j), Some(sign)), lhs, rhs);
            }
        }
    }
    for i in 0..nn {
        for j in 0..nn {
            if i == j {
                continue;
            }
            for sign in signs {
                let k = 1 + rank.a(i, j).unsigned_abs() as usize;
                push(
                    RelationId::Eq27,
                    params(i, Some(j), Some(sign)),
                    Expr::ad_power(&x(sign, i, 0), k, x(sign, j, 0)),
                    Expr::Zero,
                );
            }
        }
    }
    for i in [0, rank.m()] {
        for sign in signs {
            push(
                RelationId::Eq28,
                params(i, None, Some(sign)),
                Expr::bracket(x(sign, i, 0), x(sign, i, 0)),
                Expr::Zero,
            );
        }
    }
    for i in [0, rank.m()] {
        for sign in signs {
            let lhs = Expr::bracket(
                Expr::bracket(x(sign, rank.prev_node(i), 0), x(sign, i, 0)),
                Expr::bracket(x(sign, i, 0), x(sign, rank.next_node(i), 0)),
            );
            push(RelationId::Eq29, params(i, None, Some(sign)), lhs, Expr::Zero);
        }
    }
    Ok(out)
}

/// `15N² − 3N + 8` for `N = m + n`.
pub fn minimal_relation_count(rank: &RankData) -> usize {
    let n = rank.size();
    15 * n * n - 3 * n + 8
}

/// Instances of the infinite presentation at levels `r + s ≤ max_sum`, used
/// as a sampled check on images built by [`higher_modes`].
pub fn sampled_relations(rank: &RankData, nodes: &[usize], max_sum: u32) -> Vec<Relation> {
    let mut out = Vec::new();
    for &i in nodes {
        for &j in nodes {
            for r in 0..=max_sum {
                for s in 0..=max_sum - r {
                    let rhs = if i == j { h(i, r + s) } else { Expr::Zero };
                    out.push(Relation {
                        id: RelationId::Eq12,
                        params: RelParams {
                            r: Some(r),
                            s: Some(s),
                            ..params(i, Some(j), None)
                        },
                        lhs: Expr::bracket(x(1, i, r), x(-1, j, s)),
                        rhs,
                    });
                }
            }
            for sign in [1i64, -1] {
                for r in 0..max_sum {
                    for s in 0..max_sum - r {
                        let (a, m) = (rank.a(i, j), rank.mm(i, j));
                        let lhs = Expr::sum(vec![
                            Expr::bracket(h(i, r + 1), x(sign, j, s)),
                            Expr::scale(RelScalar::int(-1), Expr::bracket(h(i, r), x(sign, j, s + 1))),
                        ]);
                        let rhs = Expr::sum(vec![
                            Expr::scale(half_hbar(sign * a), Expr::anti(h(i, r), x(sign, j, s))),
                            Expr::scale(half_diff(-m), Expr::bracket(h(i, r), x(sign, j, s))),
                        ]);
                        let rp = RelParams {
                            r: Some(r),
                            s: Some(s),
                            ..params(i, Some(j), Some(sign))
                        };
                        out.push(Relation {
                            id: RelationId::Eq14,
                            params: rp,
                            lhs,
                            rhs,
                        });
                        let (lhs, rhs) = xx_relation(rank, i, j, sign, r, s);
                        out.push(Relation {
                            id: RelationId::Eq15,
                            params: rp,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Images of the generators, plus the values substituted for `c` and `z`
/// before a relation is tested.
#[derive(Clone, Debug)]
pub struct Assignment<S: Coefficient> {
    pub rank: RankData,
    pub eps1: S,
    pub eps2: S,
    pub central: Option<(S, S)>,
    pub images: BTreeMap<YangianGenerator, Completion<S>>,
}

impl<S: Coefficient> Assignment<S> {
    pub fn new(rank: RankData, eps1: S, eps2: S) -> Self {
        Assignment {
            rank,
            eps1,
            eps2,
            central: None,
            images: BTreeMap::new(),
        }
    }

    pub fn hbar(&self) -> S {
        self.eps1.add_ref(&self.eps2)
    }

    pub fn get(&self, g: &YangianGenerator) -> Result<&Completion<S>, YangianError> {
        self.images.get(g).ok_or(YangianError::Missing(*g))
    }

    pub fn insert(&mut self, g: YangianGenerator, x: Completion<S>) {
        self.images.insert(g, x);
    }

    /// `h_{i,1} − (ħ/2) h_{i,0}²`.
    pub fn htilde(&self, i: usize, st: &mut LoopStraightener) -> Result<Completion<S>, YangianError> {
        let h1 = self.get(&YangianGenerator::h(i, 1))?;
        let h0 = self.get(&YangianGenerator::h(i, 0))?;
        if !h0.is_finite() {
            return Err(TailError::UnsupportedArity("infinite level-0 image".into()).into());
        }
        let sq = h0.finite().mul(h0.finite(), st);
        let mut out = h1.clone();
        out.add_finite(&sq.scale(&self.hbar().mul_ref(&S::ratio(-1, 2))));
        Ok(out)
    }

    /// Generators whose image parity disagrees with the generator parity.
    pub fn parity_mismatches(&self) -> Vec<YangianGenerator> {
        self.images
            .iter()
            .filter(|(g, x)| x.parity(&self.rank).is_some_and(|p| p != g.parity(&self.rank)))
            .map(|(g, _)| *g)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalMode {
    Symbolic,
    Truncated { window: i32, s_max: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails { counterexample: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Largest `|mode|` occurring in the finite parts and pattern offsets of the
/// images used by `rel`; the guard band must exceed this.
pub fn guard_reach<S: Coefficient>(rel: &Relation, asg: &Assignment<S>) -> i64 {
    let mut reach = 0i64;
    for g in rel.generators() {
        if let Some(x) = asg.images.get(&g) {
            reach = reach.max(x.finite().max_abs_mode() as i64);
            for (k, _) in x.families() {
                for p in &k.factors {
                    reach = reach.max(p.konst.unsigned_abs() as i64);
                }
            }
        }
    }
    reach
}

fn eval_symbolic<S: Coefficient>(
    e: &Expr,
    asg: &Assignment<S>,
    st: &mut LoopStraightener,
) -> Result<Completion<S>, YangianError> {
    Ok(match e {
        Expr::Zero => Completion::zero(),
        Expr::Gen(g) => asg.get(g)?.clone(),
        Expr::HTilde(i) => asg.htilde(*i, st)?,
        Expr::Scale(k, e) => eval_symbolic(e, asg, st)?.scale(&k.value(&asg.eps1, &asg.eps2)),
        Expr::Sum(v) => {
            let mut out = Completion::zero();
            for t in v {
                out.add_assign(&eval_symbolic(t, asg, st)?);
            }
            out
        }
        Expr::Bracket(a, b) => {
            let (a, b) = (eval_symbolic(a, asg, st)?, eval_symbolic(b, asg, st)?);
            let out = a.bracket(&b, st)?;
            if out.has_doubles() {
                return Err(TailError::UnsupportedArity("two-index family in a bracket".into()).into());
            }
            out
        }
        Expr::Anti(a, b) => {
            let (a, b) = (eval_symbolic(a, asg, st)?, eval_symbolic(b, asg, st)?);
            let (ab, ba) = if a.is_finite() {
                (b.mul_left(a.finite(), st)?, b.mul_right(a.finite(), st)?)
            } else if b.is_finite() {
                (a.mul_right(b.finite(), st)?, a.mul_left(b.finite(), st)?)
            } else {
                return Err(TailError::UnsupportedArity("product of two infinite sums".into()).into());
            };
            ab.add(&ba)
        }
    })
}

/// Splits `x` into groups of terms sharing a coefficient up to sign.
fn coefficient_groups<S: Coefficient>(x: &Element<S>) -> Vec<(S, Element<BigRational>)> {
    let mut groups: Vec<(S, Element<BigRational>)> = Vec::new();
    for (m, k) in x.terms() {
        let neg = -k.clone();
        let slot = groups.iter_mut().find(|(g, _)| g == k || *g == neg);
        let (g, e) = match slot {
            Some(s) => s,
            None => {
                groups.push((k.clone(), Element::zero()));
                groups.last_mut().unwrap()
            }
        };
        let sgn = if g == k { 1 } else { -1 };
        e.add_term(m.clone(), BigRational::from_integer(sgn.into()));
    }
    groups
}

fn combine_groups<S: Coefficient>(
    x: &Element<S>,
    y: &Element<S>,
    st: &mut LoopStraightener,
    op: fn(&Element<BigRational>, &Element<BigRational>, &mut LoopStraightener) -> Element<BigRational>,
) -> Element<S> {
    let (gx, gy) = (coefficient_groups(x), coefficient_groups(y));
    let mut acc: Vec<(S, Element<BigRational>)> = Vec::new();
    for (a, ex) in &gx {
        for (b, ey) in &gy {
            let k = a.mul_ref(b);
            let r = op(ex, ey, st);
            if r.is_zero() {
                continue;
            }
            match acc.iter_mut().find(|(g, _)| *g == k) {
                Some((_, e)) => e.add_assign(&r),
                None => acc.push((k, r)),
            }
        }
    }
    let mut out = Element::zero();
    for (k, e) in acc {
        for (m, q) in e.into_terms() {
            out.add_term(m, k.mul_ref(&S::from_rational(&q)));
        }
    }
    out
}

/// Super bracket computed over rational coefficients, one coefficient class
/// at a time. Much faster than [`Element::bracket`] when the coefficients
/// are rational functions taking few distinct values.
pub fn grouped_bracket<S: Coefficient>(x: &Element<S>, y: &Element<S>, st: &mut LoopStraightener) -> Element<S> {
    combine_groups(x, y, st, |a, b, st| a.bracket(b, st))
}

pub fn grouped_product<S: Coefficient>(x: &Element<S>, y: &Element<S>, st: &mut LoopStraightener) -> Element<S> {
    combine_groups(x, y, st, |a, b, st| a.mul(b, st))
}

/// Expansion of `e` in which every infinite image is cut at `s_max`.
pub fn eval_expanded<S: Coefficient>(
    e: &Expr,
    images: &dyn Fn(&YangianGenerator) -> Result<Element<S>, YangianError>,
    hbar: &S,
    eps: (&S, &S),
    st: &mut LoopStraightener,
) -> Result<Element<S>, YangianError> {
    Ok(match e {
        Expr::Zero => Element::zero(),
        Expr::Gen(g) => images(g)?,
        Expr::HTilde(i) => {
            let h0 = images(&YangianGenerator::h(*i, 0))?;
            let sq = h0.mul(&h0, st);
            images(&YangianGenerator::h(*i, 1))?.add(&sq.scale(&hbar.mul_ref(&S::ratio(-1, 2))))
        }
        Expr::Scale(k, e) => eval_expanded(e, images, hbar, eps, st)?.scale(&k.value(eps.0, eps.1)),
        Expr::Sum(v) => {
            let mut out = Element::zero();
            for t in v {
                out.add_assign(&eval_expanded(t, images, hbar, eps, st)?);
            }
            out
        }
        Expr::Bracket(a, b) => {
            let a = eval_expanded(a, images, hbar, eps, st)?;
            let b = eval_expanded(b, images, hbar, eps, st)?;
            grouped_bracket(&a, &b, st)
        }
        Expr::Anti(a, b) => {
            let a = eval_expanded(a, images, hbar, eps, st)?;
            let b = eval_expanded(b, images, hbar, eps, st)?;
            grouped_product(&a, &b, st).add(&grouped_product(&b, &a, st))
        }
    })
}

fn first_windowed<S: Coefficient>(x: &Element<S>) -> Option<String> {
    x.terms().next().map(|(m, k)| format!("{k}\t{m}"))
}

/// Tests one relation. In truncated mode only monomials whose modes lie in
/// `[-window, window]` are compared, and `s_max` must clear the guard band.
pub fn evaluate_relation<S: Coefficient>(
    rel: &Relation,
    asg: &Assignment<S>,
    mode: EvalMode,
    st: &mut LoopStraightener,
) -> Result<Verdict, YangianError> {
    let (c, z) = asg.central.clone().unwrap_or_else(|| (S::zero(), S::zero()));
    let specialize = asg.central.is_some();
    match mode {
        EvalMode::Symbolic => {
            let lhs = eval_symbolic(&rel.lhs, asg, st)?;
            let rhs = eval_symbolic(&rel.rhs, asg, st)?;
            let mut diff = lhs.sub(&rhs);
            if specialize {
                diff = diff.specialize_central(&c, &z);
            }
            Ok(match diff.first_term() {
                None => Verdict::Holds,
                Some(t) => Verdict::Fails { counterexample: t },
            })
        }
        EvalMode::Truncated { window, s_max } => {
            let mut images = BTreeMap::new();
            for g in rel.generators() {
                images.insert(g, asg.get(&g)?.expand(s_max, st));
            }
            evaluate_expanded_relation(rel, &images, asg, window, st)
        }
    }
}

/// Outcome of checking one relation instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationOutcome {
    pub label: String,
    pub id: RelationId,
    pub params: RelParams,
    pub mode: EvalMode,
    pub verdict: Verdict,
}

/// Symbolic evaluation, falling back to truncation at `(window, s_max)` when
/// a bracket of two infinite sums is needed. `s_max` is raised to the guard
/// band `window + reach + 1` if it is smaller.
pub fn check_relation<S: Coefficient>(
    rel: &Relation,
    asg: &Assignment<S>,
    mode: EvalMode,
    fallback: (i32, i64),
    st: &mut LoopStraightener,
) -> Result<RelationOutcome, YangianError> {
    let guarded = |window: i32, s_max: i64| {
        let band = window as i64 + guard_reach(rel, asg) + 1;
        EvalMode::Truncated {
            window,
            s_max: s_max.max(band),
        }
    };
    let mode = match mode {
        EvalMode::Truncated { window, s_max } => guarded(window, s_max),
        m => m,
    };
    let (mode, verdict) = match evaluate_relation(rel, asg, mode, st) {
        Err(YangianError::Tail(TailError::UnsupportedArity(_))) if mode == EvalMode::Symbolic => {
            let m = guarded(fallback.0, fallback.1);
            (m, evaluate_relation(rel, asg, m, st)?)
        }
        other => (mode, other?),
    };
    Ok(RelationOutcome {
        label: rel.label(),
        id: rel.id,
        params: rel.params,
        mode,
        verdict,
    })
}

/// Checks every relation in parallel; the output order is the input order.
pub fn check_assignment<S: Coefficient>(
    rels: &[Relation],
    asg: &Assignment<S>,
    mode: EvalMode,
    fallback: (i32, i64),
) -> Vec<Result<RelationOutcome, YangianError>> {
    use rayon::prelude::*;
    rels.par_iter()
        .map_init(
            || straightener(asg.rank),
            |st, rel| check_relation(rel, asg, mode, fallback, st),
        )
        .collect()
}

/// Extends a level-≤1 assignment to levels `≤ r_max` by the mode recursion.
/// Images above level 1 are kept as expansions cut at `s_max`; the returned
/// map covers every level.
pub fn higher_modes<S: Coefficient>(
    asg: &Assignment<S>,
    r_max: u32,
    s_max: i64,
    st: &mut LoopStraightener,
) -> Result<BTreeMap<YangianGenerator, Element<S>>, YangianError> {
    if r_max > 3 {
        return Err(YangianError::LevelTooLarge(r_max));
    }
    let rank = asg.rank;
    let nn = rank.size();
    let mut out: BTreeMap<YangianGenerator, Element<S>> = BTreeMap::new();
    for (g, x) in &asg.images {
        if g.level <= 1 {
            out.insert(*g, x.expand(s_max, st));
        }
    }
    let half = (asg.eps1.clone() - asg.eps2.clone()).mul_ref(&S::ratio(1, 2));
    let mut htilde = Vec::with_capacity(nn);
    for i in 0..nn {
        htilde.push(asg.htilde(i, st)?.expand(s_max, st));
    }
    for r in 1..r_max.max(1) {
        for i in 0..nn {
            for sign in [1i64, -1] {
                let prev = out
                    .get(&YangianGenerator::x(sign, i, r))
                    .cloned()
                    .ok_or(YangianError::Missing(YangianGenerator::x(sign, i, r)))?;
                let (node, corr) = if rank.is_odd_node(i) {
                    (i + 1, S::from_int(rank.mm(i + 1, i)).mul_ref(&half))
                } else {
                    (i, S::zero())
                };
                let a = rank.a(node, i);
                let inv = S::from_int(sign * a)
                    .checked_inv()
                    .ok_or_else(|| YangianError::Singular(format!("1/a_{node}{i}")))?;
                let next = grouped_bracket(&htilde[node], &prev, st).scale(&inv).add(&prev.scale(&corr));
                out.insert(YangianGenerator::x(sign, i, r + 1), next);
            }
        }
        for i in 0..nn {
            let xp = &out[&YangianGenerator::x(1, i, r + 1)];
            let xm = &out[&YangianGenerator::x(-1, i, 0)];
            let hi = grouped_bracket(xp, xm, st);
            out.insert(YangianGenerator::h(i, r + 1), hi);
        }
    }
    Ok(out)
}

/// Evaluates `rel` on expanded images and compares in the window.
pub fn evaluate_expanded_relation<S: Coefficient>(
    rel: &Relation,
    images: &BTreeMap<YangianGenerator, Element<S>>,
    asg: &Assignment<S>,
    window: i32,
    st: &mut LoopStraightener,
) -> Result<Verdict, YangianError> {
    let lookup = |g: &YangianGenerator| images.get(g).cloned().ok_or(YangianError::Missing(*g));
    let hbar = asg.hbar();
    let lhs = eval_expanded(&rel.lhs, &lookup, &hbar, (&asg.eps1, &asg.eps2), st)?;
    let rhs = eval_expanded(&rel.rhs, &lookup, &hbar, (&asg.eps1, &asg.eps2), st)?;
    let mut diff = lhs.sub(&rhs);
    if let Some((c, z)) = &asg.central {
        diff = diff.specialize_central(c, z);
    }
    Ok(match first_windowed(&diff.truncate_project(window)) {
        None => Verdict::Holds,
        Some(t) => Verdict::Fails { counterexample: t },
    })
}

/// Monomials of `x` carrying a nonzero power of `c`.
pub fn central_terms<S: Coefficient>(x: &Element<S>) -> Element<S> {
    x.filter(|m: &Monomial| m.c > 0)
}
