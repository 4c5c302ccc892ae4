use affine_yangian::affine_gl::LoopGen;
use affine_yangian::evalmap::{h1_families, h_loop, EvalParams};
use affine_yangian::pbw::{straightener, Element, LoopStraightener, Monomial};
use affine_yangian::surjectivity::*;
use affine_yangian::tails::Completion;
use affine_yangian::{AlgebraElement, CompletionElement, RankData, Scalar};

fn rank(m: usize, n: usize) -> RankData {
    RankData::new(m, n).unwrap()
}

fn hbar() -> Scalar {
    Scalar::hbar()
}

fn k(n: i64) -> Scalar {
    Scalar::from_int(n)
}

/// `coeff · c · E_jj(a)`
fn c_diag(j: usize, a: i32, coeff: Scalar) -> AlgebraElement {
    let mut m = Monomial::from_factors(&[LoopGen::new(j, j, a)]);
    m.c = 1;
    Element::monomial(m, coeff)
}

fn window(x: &CompletionElement, n: i32, s_max: i64, st: &mut LoopStraightener) -> AlgebraElement {
    x.expand(s_max, st).truncate_project(n)
}

#[test]
fn t0_residual_is_the_h0_correction() {
    for (m, n) in [(2, 3), (3, 2), (2, 4), (3, 4)] {
        let r = rank(m, n);
        let p = EvalParams::formal(r);
        let mut st = straightener(r);
        let rep = t0_identity(&p, &mut st).unwrap();
        assert!(rep.lhs.is_finite(), "({m},{n}) tails survive");
        assert!(rep.rhs.is_finite());
        assert!(rep.regrouping_exact);
        assert!(rep.first_third_ok(), "({m},{n})");
        assert!(rep.second_fourth_ok(), "({m},{n})");
        assert!(!rep.holds());
        assert_eq!(rep.residual, t0_correction(&p, &mut st), "({m},{n})");
    }
}

#[test]
fn t0_truncated_cross_check() {
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    let mut st = straightener(r);
    let rep = t0_identity(&p, &mut st).unwrap();
    let mut raw = Completion::zero();
    for i in 0..r.size() {
        raw.add_assign(&affine_yangian::evalmap::ev_htilde1(&p, i, &mut st).unwrap());
    }
    let lhs = window(&raw, 4, 6, &mut st);
    let rhs = window(&rep.rhs.add(&t0_correction(&p, &mut st)), 4, 6, &mut st);
    assert_eq!(lhs, rhs);
}

#[test]
fn emn_witness_reaches_enn() {
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    let mut st = straightener(r);
    let w = emn_witness(&p, &mut st).unwrap();
    assert_eq!(w.target, Element::unit(5, 5, 0));
    // value = E_55 − h_0 with c = −ε1/ħ substituted
    let c = p.c_value().unwrap();
    let h0 = Element::unit(1, 1, 0).neg().sub(&Element::unit(5, 5, 0)).add(&Element::scalar(c));
    assert_eq!(w.value, Completion::from_finite(Element::unit(5, 5, 0).add(&h0)));
    assert!(w.verify(4, 6, &mut st).verified());
    // ħc = (2 − 3)ε1
    assert_eq!(p.hbar_c(), Scalar::eps1() * k(-1));
}

#[test]
fn degenerate_central_charge() {
    let r = rank(3, 2);
    let p = EvalParams::new(r, k(0), k(2), k(1));
    let mut st = straightener(r);
    assert_eq!(emn_witness(&p, &mut st).unwrap_err(), SurjError::DegenerateCentralCharge);
    assert_eq!(density_report(&p, 2, 6, &mut st).unwrap_err(), SurjError::DegenerateCentralCharge);
    assert_eq!(c2_witness(&p, 1, &mut st).unwrap_err(), SurjError::DegenerateCentralCharge);
}

#[test]
fn central_part_examples() {
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    let mut st = straightener(r);
    let d = h1_diag_commutator(&p, 1, 1, &mut st).unwrap();
    let want = c_diag(1, 1, -hbar()).add(&c_diag(2, 1, -hbar()));
    assert_eq!(d.central_part, Completion::from_finite(want));
    let d = h1_diag_commutator(&p, 1, -2, &mut st).unwrap();
    let want = c_diag(1, -2, hbar() * k(2)).add(&c_diag(2, -2, hbar() * k(2)));
    assert_eq!(d.central_part, Completion::from_finite(want));
    assert!(four_term_central(&p, 2, 0).is_zero());
    assert_eq!(h1_diag_commutator(&p, 1, 0, &mut st).unwrap_err(), SurjError::ZeroMode);
    assert_eq!(h1_diag_commutator(&p, 0, 1, &mut st).unwrap_err(), SurjError::InvalidNode(0, 4));
}

#[test]
fn commutator_splits_at_every_node() {
    for (m, n) in [(3, 2), (2, 3)] {
        let r = rank(m, n);
        let p = EvalParams::formal(r);
        let mut st = straightener(r);
        for i in 1..r.size() {
            for a in [-3, -2, -1, 1, 2, 3] {
                let d = h1_diag_commutator(&p, i, a, &mut st).unwrap();
                assert!(d.sl_check.in_sl, "({m},{n}) i={i} a={a}: {:?}", d.sl_check);
                // the four-term formula holds at every node, not only where p(i) = p(i+1)
                assert!(d.central_matches, "({m},{n}) i={i} a={a}");
                // first two terms plus the four claim terms reassemble the commutator
                let mut sum = leading_terms(&p, i, a, &mut st).unwrap();
                let mut sl = sum.clone();
                for term in ClaimTerm::ALL {
                    let c = claim1_terms(&p, i, a, term, &mut st).unwrap();
                    sum.add_assign(&c.computed);
                    sl.add_assign(&c.sl_part);
                }
                assert_eq!(sum, d.commutator);
                assert_eq!(sl, d.sl_part);
            }
        }
    }
}

#[test]
fn claim_displays() {
    for (m, n) in [(3, 2), (2, 3)] {
        let r = rank(m, n);
        let p = EvalParams::formal(r);
        let mut st = straightener(r);
        for i in 1..r.size() {
            for a in [-2, -1, 1, 2] {
                for term in ClaimTerm::ALL {
                    let c = claim1_terms(&p, i, a, term, &mut st).unwrap();
                    let gap = c.computed.sub(&c.display);
                    let corr = claim_display_correction(&p, i, a, term);
                    assert_eq!(gap, Completion::from_finite(corr.clone()), "({m},{n}) i={i} a={a} {term:?}");
                    assert_eq!(c.matches, corr.is_zero());
                    if matches!(term, ClaimTerm::Term4 | ClaimTerm::Term5) {
                        assert!(c.central_part.is_zero());
                        assert!(c.sl_check.in_sl);
                    }
                }
            }
        }
    }
}

#[test]
fn claim_examples() {
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    let mut st = straightener(r);
    let t3 = claim1_terms(&p, 1, 2, ClaimTerm::Term3, &mut st).unwrap();
    assert!(t3.matches);
    assert_eq!(t3.central_part, Completion::from_finite(c_diag(1, 2, hbar() * k(-2))));
    let t4 = claim1_terms(&p, 1, 2, ClaimTerm::Term4, &mut st).unwrap();
    assert!(t4.matches && t4.sl_check.in_sl);
    let t6 = claim1_terms(&p, 2, -1, ClaimTerm::Term6, &mut st).unwrap();
    assert!(t6.matches);
    assert_eq!(t6.central_part, Completion::from_finite(c_diag(3, -1, hbar())));
    // odd row, a < 0: the displayed (−1)^{p(i)} on the first delta sum is wrong
    let t = claim1_terms(&p, 4, -1, ClaimTerm::Term3, &mut st).unwrap();
    assert!(!t.matches);
    assert_eq!(t.central_part, Completion::from_finite(c_diag(4, -1, hbar())));
}

#[test]
fn families_split_as_the_commutator_does() {
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    let mut st = straightener(r);
    let fams = h1_families(&p, 2, &mut st).unwrap();
    let total = fams.iter().fold(Completion::zero(), |acc, f| acc.add(f));
    let bracket = total.bracket_finite(&h_loop(&r, 2, 1), &mut st).unwrap();
    let mut parts = Completion::zero();
    for term in ClaimTerm::ALL {
        parts.add_assign(&claim1_terms(&p, 2, 1, term, &mut st).unwrap().computed);
    }
    assert_eq!(bracket, parts);
}

#[test]
fn c2_witness_examples() {
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    let mut st = straightener(r);
    assert_eq!(c2_node(&r).unwrap(), 1);
    assert_eq!(c2_node(&rank(2, 3)).unwrap(), 1);
    for a in [-2, 1, 3] {
        let w = c2_witness(&p, a, &mut st).unwrap();
        assert_eq!(w.target, Element::unit(1, 1, a).add(&Element::unit(2, 2, a)));
        assert!(w.verify(3, 7, &mut st).verified(), "a={a}");
    }
}

#[test]
fn density_report_32() {
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    let mut st = straightener(r);
    let rep = density_report(&p, 2, 6, &mut st).unwrap();
    assert_eq!(rep.entries.len(), 25);
    assert!(rep.verified());
    let rule = |j: usize, a: i32| rep.entries.iter().find(|e| e.row == j && e.mode == a).unwrap().rule;
    assert_eq!(rule(5, 0), Rule::C1);
    assert_eq!(rule(1, 2), Rule::C2);
    assert_eq!(rule(3, 2), Rule::Sl);
    assert_eq!(rule(1, 0), Rule::Sl);
    // E_11(2) = ½((E_11 + E_22)(2) + h_1(2))
    let e = rep.entries.iter().find(|e| e.row == 1 && e.mode == 2).unwrap();
    let base = c2_witness(&p, 2, &mut st).unwrap();
    assert_eq!(e.witness.value, base.value.scale(&Scalar::ratio(1, 2)));
    let h12 = h_loop::<Scalar>(&r, 1, 2);
    let half = Scalar::ratio(1, 2);
    let want = base.residual.scale(&half).sub(&Completion::from_finite(h12.scale(&half)));
    assert_eq!(e.witness.residual, want);
}

#[test]
fn density_report_other_ranks() {
    for (m, n) in [(2, 3), (2, 4)] {
        let r = rank(m, n);
        let p = EvalParams::formal(r);
        let mut st = straightener(r);
        let rep = density_report(&p, 1, 5, &mut st).unwrap();
        assert!(rep.verified(), "({m},{n})");
        assert_eq!(rep.entries.len(), 3 * r.size());
    }
    let p = EvalParams::formal(rank(3, 2));
    assert_eq!(
        density_report(&p, 5, 9, &mut straightener(rank(3, 2))).unwrap_err(),
        SurjError::WindowTooLarge(5)
    );
}

#[test]
fn numeric_parameters() {
    let r = rank(3, 2);
    let p = EvalParams::new(r, k(2), k(3), k(5));
    let mut st = straightener(r);
    assert!(density_report(&p, 1, 5, &mut st).unwrap().verified());
}

#[test]
fn sl_check_rejects_supertrace() {
    let r = rank(3, 2);
    let mut st = straightener(r);
    let x: CompletionElement = Completion::from_finite(Element::unit(1, 1, 2).add(&Element::unit(2, 2, 2)));
    assert!(!completion_sl_check(&x, &mut st).in_sl);
    let y: CompletionElement = Completion::from_finite(Element::unit(1, 1, 2).sub(&Element::unit(2, 2, 2)));
    assert!(completion_sl_check(&y, &mut st).in_sl);
    let f = affine_yangian::tails::family(k(1), &[(1, 1, -1, 0), (2, 2, 1, 0)]);
    let z = Completion::from_family(f, &mut st).unwrap();
    assert!(!completion_sl_check(&z, &mut st).in_sl);
}
