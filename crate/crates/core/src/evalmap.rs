//! Images of the Yangian generators in the completed enveloping algebra.

use serde::{Deserialize, Serialize};

use crate::foundation::{FoundationError, RankData};
use crate::pbw::{Element, LoopStraightener};
use crate::scalar::{Coefficient, RatFunc};
use crate::tails::{family, Completion, TailError};
use crate::yangian::{Assignment, Kind, YangianGenerator};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Rank(#[from] FoundationError),
    #[error(transparent)]
    Tail(#[from] TailError),
    #[error("hbar = e1 + e2 vanishes, so c cannot be specialized")]
    SingularHbar,
    #[error("level-1 image for node {0} needs 1/{1}, which is zero")]
    SingularCartan(usize, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralPolicy {
    /// `c` and `z` stay PBW generators.
    #[default]
    Formal,
    /// `c = (n−m)ε1/ħ`, `z = 1`.
    Specialized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalParams<S> {
    pub rank: RankData,
    pub eps1: S,
    pub eps2: S,
    pub alpha: S,
    pub central: CentralPolicy,
}

impl EvalParams<RatFunc> {
    /// `ε1`, `ε2`, `α` left as indeterminates.
    pub fn formal(rank: RankData) -> Self {
        EvalParams {
            rank,
            eps1: RatFunc::eps1(),
            eps2: RatFunc::eps2(),
            alpha: RatFunc::alpha(),
            central: CentralPolicy::Formal,
        }
    }
}

impl<S: Coefficient> EvalParams<S> {
    pub fn new(rank: RankData, eps1: S, eps2: S, alpha: S) -> Self {
        EvalParams {
            rank,
            eps1,
            eps2,
            alpha,
            central: CentralPolicy::Formal,
        }
    }

    pub fn with_policy(mut self, central: CentralPolicy) -> Self {
        self.central = central;
        self
    }

    pub fn hbar(&self) -> S {
        self.eps1.add_ref(&self.eps2)
    }

    /// `ħc = (n − m)ε1`.
    pub fn hbar_c(&self) -> S {
        self.eps1.scale_int(self.rank.n() as i64 - self.rank.m() as i64)
    }

    /// The value of `c` forced by `ħc = (n − m)ε1`.
    pub fn c_value(&self) -> Result<S, EvalError> {
        let inv = self.hbar().checked_inv().ok_or(EvalError::SingularHbar)?;
        Ok(self.hbar_c().mul_ref(&inv))
    }

    /// Integer `k` in the coefficient `α − k ε1` of `h_i` in `ev(h_{i,1})`.
    pub fn shift(&self, i: usize) -> i64 {
        shift(&self.rank, i)
    }

    /// `α − shift(i)·ε1`.
    pub fn shifted_alpha(&self, i: usize) -> S {
        self.alpha.clone() - self.eps1.scale_int(self.shift(i))
    }
}

/// `m − n` at `i = 0`, `i − 2δ(i ≥ m+1)(i − m)` otherwise.
pub fn shift(rank: &RankData, i: usize) -> i64 {
    let (m, n, i) = (rank.m() as i64, rank.n() as i64, i as i64);
    if i == 0 {
        m - n
    } else if i > m {
        i - 2 * (i - m)
    } else {
        i
    }
}

fn check(rank: &RankData, i: usize) -> Result<(), EvalError> {
    rank.cartan_a(i, i)?;
    Ok(())
}

fn unit<S: Coefficient>(r: usize, c: usize, mode: i32, k: i64) -> Element<S> {
    Element::unit(r, c, mode).scale(&S::from_int(k))
}

/// `h_i` as an element of `U(gl-hat)`.
pub fn h_element<S: Coefficient>(rank: &RankData, i: usize) -> Element<S> {
    let nn = rank.size();
    if i == 0 {
        unit::<S>(1, 1, 0, -1).add(&unit(nn, nn, 0, -1)).add(&Element::central_c())
    } else {
        unit::<S>(i, i, 0, rank.sign(i)).add(&unit(i + 1, i + 1, 0, -rank.sign(i + 1)))
    }
}

/// `((−1)^{p(i)} E_ii − (−1)^{p(i+1)} E_{i+1,i+1}) t^a` for `i ≥ 1`.
pub fn h_loop<S: Coefficient>(rank: &RankData, i: usize, a: i32) -> Element<S> {
    unit::<S>(i, i, a, rank.sign(i)).add(&unit(i + 1, i + 1, a, -rank.sign(i + 1)))
}

/// Level-0 image as a finite element.
pub fn level0_element<S: Coefficient>(rank: &RankData, i: usize, kind: Kind) -> Result<Element<S>, EvalError> {
    check(rank, i)?;
    let nn = rank.size();
    Ok(match (kind, i) {
        (Kind::H, _) => h_element(rank, i),
        (Kind::XPlus, 0) => Element::unit(nn, 1, 1),
        (Kind::XMinus, 0) => unit(1, nn, -1, -1),
        (Kind::XPlus, _) => Element::unit(i, i + 1, 0),
        (Kind::XMinus, _) => unit(i + 1, i, 0, rank.sign(i)),
    })
}

pub fn ev_level0<S: Coefficient>(rank: &RankData, i: usize, kind: Kind) -> Result<Completion<S>, EvalError> {
    Ok(Completion::from_finite(level0_element(rank, i, kind)?))
}

/// The four (or, at `i = 0`, two) sums of `ev(h_{i,1})`, each family carrying
/// its full scalar coefficient.
pub fn h1_families<S: Coefficient>(
    p: &EvalParams<S>,
    i: usize,
    st: &mut LoopStraightener,
) -> Result<[Completion<S>; 4], EvalError> {
    check(&p.rank, i)?;
    let rank = &p.rank;
    let nn = rank.size();
    let hbar = p.hbar();
    let w = |k: i64| hbar.scale_int(k);
    let mut out: [Completion<S>; 4] = Default::default();
    if i == 0 {
        for k in 1..=nn {
            out[0].absorb(family(w(-rank.sign(k)), &[(nn, k, -1, 0), (k, nn, 1, 0)]), st)?;
            out[1].absorb(family(w(-rank.sign(k)), &[(1, k, -1, -1), (k, 1, 1, 1)]), st)?;
        }
        return Ok(out);
    }
    for k in 1..=nn {
        let (si, sj, sk) = (rank.sign(i), rank.sign(i + 1), rank.sign(k));
        if k <= i {
            out[0].absorb(family(w(si * sk), &[(i, k, -1, 0), (k, i, 1, 0)]), st)?;
            out[2].absorb(family(w(-sj * sk), &[(i + 1, k, -1, 0), (k, i + 1, 1, 0)]), st)?;
        } else {
            out[1].absorb(family(w(si * sk), &[(i, k, -1, -1), (k, i, 1, 1)]), st)?;
            out[3].absorb(family(w(-sj * sk), &[(i + 1, k, -1, -1), (k, i + 1, 1, 1)]), st)?;
        }
    }
    Ok(out)
}

/// The finite part `(α − shift·ε1)h_i + quadratic term` of `ev(h_{i,1})`.
pub fn h1_finite<S: Coefficient>(p: &EvalParams<S>, i: usize, st: &mut LoopStraightener) -> Result<Element<S>, EvalError> {
    check(&p.rank, i)?;
    let rank = &p.rank;
    let nn = rank.size();
    let hbar = p.hbar();
    let lin = h_element::<S>(rank, i).scale(&p.shifted_alpha(i));
    let quad = if i == 0 {
        let e11 = Element::unit(1, 1, 0).sub(&Element::central_c());
        Element::unit(nn, nn, 0).mul(&e11, st).scale(&hbar)
    } else {
        let k = -rank.sign(i) * rank.sign(i + 1);
        Element::unit(i, i, 0).mul(&Element::unit(i + 1, i + 1, 0), st).scale(&hbar.scale_int(k))
    };
    Ok(lin.add(&quad))
}

pub fn ev_h1<S: Coefficient>(p: &EvalParams<S>, i: usize, st: &mut LoopStraightener) -> Result<Completion<S>, EvalError> {
    let mut out = Completion::from_finite(h1_finite(p, i, st)?);
    for f in h1_families(p, i, st)? {
        out.add_assign(&f);
    }
    Ok(out)
}

/// `ev(h_{i,1}) − (ħ/2) h_i²`.
pub fn ev_htilde1<S: Coefficient>(p: &EvalParams<S>, i: usize, st: &mut LoopStraightener) -> Result<Completion<S>, EvalError> {
    let h = h_element::<S>(&p.rank, i);
    let sq = h.mul(&h, st).scale(&p.hbar().mul_ref(&S::ratio(-1, 2)));
    let mut out = ev_h1(p, i, st)?;
    out.add_finite(&sq);
    Ok(out)
}

/// The closed form of `ev(h̃_{i,1})` in which the quadratic part reads
/// `−(ħ/2)(E_ii² + E_{i+1,i+1}²)`, and at `i = 0`
/// `−(ħ/2)(E_NN² + E_11²) − cħE_NN`.
pub fn htilde_display<S: Coefficient>(
    p: &EvalParams<S>,
    i: usize,
    st: &mut LoopStraightener,
) -> Result<Completion<S>, EvalError> {
    check(&p.rank, i)?;
    let nn = p.rank.size();
    let hbar = p.hbar();
    let half = hbar.mul_ref(&S::ratio(-1, 2));
    let (a, b) = if i == 0 { (nn, 1) } else { (i, i + 1) };
    let ea = Element::<S>::unit(a, a, 0);
    let eb = Element::<S>::unit(b, b, 0);
    let mut fin = h_element::<S>(&p.rank, i).scale(&p.shifted_alpha(i));
    fin.add_assign(&ea.mul(&ea, st).add(&eb.mul(&eb, st)).scale(&half));
    if i == 0 {
        let cn = Element::central_c().mul(&Element::unit(nn, nn, 0), st);
        fin.add_assign(&cn.scale(&-hbar));
    }
    let mut out = Completion::from_finite(fin);
    for f in h1_families(p, i, st)? {
        out.add_assign(&f);
    }
    Ok(out)
}

/// `ev_htilde1(i) − htilde_display(i)`; zero when the closed form is right.
pub fn htilde_display_residual<S: Coefficient>(
    p: &EvalParams<S>,
    i: usize,
    st: &mut LoopStraightener,
) -> Result<Completion<S>, EvalError> {
    Ok(ev_htilde1(p, i, st)?.sub(&htilde_display(p, i, st)?))
}

/// Level-1 image of `x±_i` from the mode recursion at `r = 0`.
pub fn ev_x1<S: Coefficient>(
    p: &EvalParams<S>,
    i: usize,
    sign: i64,
    st: &mut LoopStraightener,
) -> Result<Completion<S>, EvalError> {
    let rank = &p.rank;
    check(rank, i)?;
    let x0 = level0_element::<S>(rank, i, Kind::x(sign))?;
    let (node, corr) = if rank.is_odd_node(i) {
        let half = (p.eps1.clone() - p.eps2.clone()).mul_ref(&S::ratio(1, 2));
        (i + 1, S::from_int(rank.mm(i + 1, i)).mul_ref(&half))
    } else {
        (i, S::zero())
    };
    let a = rank.a(node, i);
    if a == 0 {
        return Err(EvalError::SingularCartan(i, a));
    }
    let ht = ev_htilde1(p, node, st)?;
    let mut out = ht.bracket_finite(&x0, st)?.scale(&S::ratio(sign, a));
    out.add_finite(&x0.scale(&corr));
    Ok(out)
}

/// Replaces `c` and `z` by `(n−m)ε1/ħ` and `1`.
pub fn specialize_central<S: Coefficient>(x: &Completion<S>, p: &EvalParams<S>) -> Result<Completion<S>, EvalError> {
    Ok(x.specialize_central(&p.c_value()?, &S::one()))
}

/// Images of all generators of level ≤ 1. Relations are tested after
/// substituting `c = (n−m)ε1/ħ`, `z = 1`.
pub fn evaluation_assignment<S: Coefficient>(
    p: &EvalParams<S>,
    st: &mut LoopStraightener,
) -> Result<Assignment<S>, EvalError> {
    let rank = p.rank;
    let mut asg = Assignment::new(rank, p.eps1.clone(), p.eps2.clone());
    asg.central = Some((p.c_value()?, S::one()));
    for i in 0..rank.size() {
        for kind in [Kind::XPlus, Kind::XMinus, Kind::H] {
            asg.insert(YangianGenerator::new(kind, i, 0), ev_level0(&rank, i, kind)?);
        }
        asg.insert(YangianGenerator::h(i, 1), ev_h1(p, i, st)?);
        for sign in [1, -1] {
            asg.insert(YangianGenerator::x(sign, i, 1), ev_x1(p, i, sign, st)?);
        }
    }
    Ok(asg)
}
