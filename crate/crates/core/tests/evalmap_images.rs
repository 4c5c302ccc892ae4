use affine_yangian::evalmap::*;
use affine_yangian::pbw::{straightener, Element, LoopStraightener};
use affine_yangian::tails::Completion;
use affine_yangian::yangian::{Kind, YangianGenerator};
use affine_yangian::{AlgebraElement, CompletionElement, RankData, Scalar};

const DESK: [(usize, usize); 4] = [(2, 3), (3, 2), (2, 4), (3, 4)];

fn k(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn e(r: usize, c: usize, mode: i32) -> AlgebraElement {
    Element::unit(r, c, mode)
}

fn fin(x: AlgebraElement) -> CompletionElement {
    Completion::from_finite(x)
}

fn rank(m: usize, n: usize) -> RankData {
    RankData::new(m, n).unwrap()
}

fn level0(r: &RankData, i: usize, kind: Kind) -> AlgebraElement {
    ev_level0::<Scalar>(r, i, kind).unwrap().finite().clone()
}

#[test]
fn level0_images_match_the_displays() {
    let r = rank(3, 2);
    assert_eq!(level0(&r, 0, Kind::XPlus), e(5, 1, 1));
    assert_eq!(level0(&r, 0, Kind::XMinus), e(1, 5, -1).neg());
    assert_eq!(level0(&r, 1, Kind::H), e(1, 1, 0).sub(&e(2, 2, 0)));
    assert_eq!(level0(&r, 3, Kind::XMinus), e(4, 3, 0));
    // h_3 = E_33 + E_44 since p(4) = 1
    assert_eq!(level0(&r, 3, Kind::H), e(3, 3, 0).add(&e(4, 4, 0)));
    let h0 = e(1, 1, 0).neg().sub(&e(5, 5, 0)).add(&Element::central_c());
    assert_eq!(level0(&r, 0, Kind::H), h0);
    assert!(ev_level0::<Scalar>(&r, 5, Kind::H).is_err());
}

#[test]
fn x0_pair_brackets_to_h0() {
    // [E_51(1), −E_15(−1)] = −E_55 − E_11 + c: the cocycle contributes
    // 1·str(E_51 E_15) c = −c, negated by the sign of x⁻_0.
    let r = rank(3, 2);
    let mut st = straightener(r);
    let lhs = level0(&r, 0, Kind::XPlus).bracket(&level0(&r, 0, Kind::XMinus), &mut st);
    let rhs = e(5, 5, 0).neg().sub(&e(1, 1, 0)).add(&Element::central_c());
    assert_eq!(lhs, rhs);
}

#[test]
fn level0_is_a_homomorphism() {
    for (m, n) in DESK {
        let r = rank(m, n);
        let mut st = straightener(r);
        for i in 0..r.size() {
            let h = level0(&r, i, Kind::H);
            for j in 0..r.size() {
                let a = r.cartan_a(i, j).unwrap();
                for sign in [1, -1] {
                    let x = level0(&r, j, Kind::x(sign));
                    assert_eq!(h.bracket(&x, &mut st), x.scale(&k(sign * a)), "({m},{n}) [h_{i}, x{sign}_{j}]");
                }
                let xp = level0(&r, i, Kind::XPlus);
                let xm = level0(&r, j, Kind::XMinus);
                let want = if i == j { h.clone() } else { Element::zero() };
                assert_eq!(xp.bracket(&xm, &mut st), want, "({m},{n}) [x+_{i}, x-_{j}]");
            }
        }
    }
}

#[test]
fn shifts_follow_the_display() {
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    assert_eq!(p.shift(0), 1);
    assert_eq!(p.shift(2), 2);
    assert_eq!(p.shift(4), 2);
    assert_eq!(p.shifted_alpha(4), Scalar::alpha() - Scalar::eps1() * k(2));
    assert_eq!(shift(&rank(2, 4), 5), -1);
}

#[test]
fn node0_families() {
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    let mut st = straightener(r);
    let fams = h1_families(&p, 0, &mut st).unwrap();
    let mut want = Completion::zero();
    for kk in 1..=5 {
        let f = affine_yangian::tails::family(Scalar::hbar() * k(-r.sign(kk)), &[(5, kk, -1, 0), (kk, 5, 1, 0)]);
        want.absorb(f, &mut st).unwrap();
    }
    assert_eq!(fams[0], want);
    assert!(fams[2].is_zero() && fams[3].is_zero());
}

/// The display of `ev(h_{i,1})`, summands `s ≤ s_max`, multiplied out as written.
fn raw_display(p: &EvalParams<Scalar>, i: usize, s_max: i32, st: &mut LoopStraightener) -> AlgebraElement {
    let r = p.rank;
    let hb = p.hbar();
    let w = |x: i64| hb.clone() * k(x);
    let mut out = h_element::<Scalar>(&r, i).scale(&p.shifted_alpha(i));
    let kq = -r.sign(i) * r.sign(i + 1);
    out.add_assign(&e(i, i, 0).mul(&e(i + 1, i + 1, 0), st).scale(&w(kq)));
    for s in 0..=s_max {
        for kk in 1..=r.size() {
            let (si, sj, sk) = (r.sign(i), r.sign(i + 1), r.sign(kk));
            let off = if kk <= i { 0 } else { 1 };
            out.add_assign(&e(i, kk, -s - off).mul(&e(kk, i, s + off), st).scale(&w(si * sk)));
            out.add_assign(&e(i + 1, kk, -s - off).mul(&e(kk, i + 1, s + off), st).scale(&w(-sj * sk)));
        }
    }
    out
}

#[test]
fn h1_matches_the_display_in_a_window() {
    for (m, n) in [(3, 2), (2, 3)] {
        let r = rank(m, n);
        let p = EvalParams::formal(r);
        let mut st = straightener(r);
        for i in 1..r.size() {
            let got = ev_h1(&p, i, &mut st).unwrap().expand(6, &mut st).truncate_project(2);
            let want = raw_display(&p, i, 6, &mut st).truncate_project(2);
            assert_eq!(got, want, "({m},{n}) i={i}");
        }
    }
}

#[test]
fn h1_zero_slice() {
    // window 0 sees only the s = 0 summands of the k ≤ i sums
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    let mut st = straightener(r);
    let got = ev_h1(&p, 1, &mut st).unwrap().expand(3, &mut st).truncate_project(0);
    assert_eq!(got, raw_display(&p, 1, 0, &mut st).truncate_project(0));
}

#[test]
fn h1_has_degree_zero() {
    for (m, n) in DESK {
        let r = rank(m, n);
        let p = EvalParams::formal(r);
        let mut st = straightener(r);
        for i in 0..r.size() {
            let x = ev_h1(&p, i, &mut st).unwrap();
            assert_eq!(x.expand(4, &mut st).degree(), Some(0));
            for (key, _) in x.families() {
                assert_eq!(key.factors.iter().map(|f| f.slope).sum::<i32>(), 0);
                assert_eq!(key.factors.iter().map(|f| f.konst).sum::<i32>(), 0);
            }
        }
    }
}

#[test]
fn htilde_definition() {
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    let mut st = straightener(r);
    for i in 0..r.size() {
        let h = h_element::<Scalar>(&r, i);
        let sq = h.mul(&h, &mut st).scale(&(Scalar::hbar() * Scalar::ratio(1, 2)));
        let diff = ev_h1(&p, i, &mut st).unwrap().sub(&ev_htilde1(&p, i, &mut st).unwrap());
        assert_eq!(diff, fin(sq));
    }
}

#[test]
fn htilde_closed_form() {
    let half = Scalar::hbar() * Scalar::ratio(-1, 2);
    for (m, n) in DESK {
        let r = rank(m, n);
        let nn = r.size();
        let p = EvalParams::formal(r);
        let mut st = straightener(r);
        for i in 1..nn {
            assert!(htilde_display_residual(&p, i, &mut st).unwrap().is_zero(), "({m},{n}) i={i}");
        }
        // at i = 0 the quadratic part −(ħ/2)(E_NN² + E_11²) is present, but
        // the c-dependent part is ħcE_11 − (ħ/2)c² rather than −cħE_NN
        let c = Element::<Scalar>::central_c();
        let want = c
            .mul(&e(1, 1, 0).add(&e(nn, nn, 0)), &mut st)
            .scale(&Scalar::hbar())
            .add(&c.mul(&c, &mut st).scale(&half));
        assert_eq!(htilde_display_residual(&p, 0, &mut st).unwrap(), fin(want), "({m},{n})");
    }
}

#[test]
fn i1_quadratic_part() {
    // −ħE_11E_22 − (ħ/2)(E_11 − E_22)² = −(ħ/2)E_11² − (ħ/2)E_22²
    let r = rank(3, 2);
    let p = EvalParams::formal(r);
    let mut st = straightener(r);
    let mut x = ev_htilde1(&p, 1, &mut st).unwrap();
    for f in h1_families(&p, 1, &mut st).unwrap() {
        x = x.sub(&f);
    }
    assert!(x.is_finite());
    let quad = x.finite().filter(|m| m.len() == 2);
    let half = Scalar::hbar() * Scalar::ratio(-1, 2);
    let want = e(1, 1, 0).mul(&e(1, 1, 0), &mut st).add(&e(2, 2, 0).mul(&e(2, 2, 0), &mut st)).scale(&half);
    assert_eq!(quad, want);
}

#[test]
fn central_specialization() {
    let r = rank(3, 2);
    let p = EvalParams::formal(r).with_policy(CentralPolicy::Specialized);
    let mut st = straightener(r);
    let c = Element::<Scalar>::central_c();
    let x = fin(c.mul(&e(5, 5, 0), &mut st).scale(&Scalar::hbar()));
    let y = specialize_central(&x, &p).unwrap();
    assert_eq!(y, fin(e(5, 5, 0).scale(&(Scalar::eps1() * k(-1)))));
    let z = fin(Element::central_z().mul(&e(1, 2, 3), &mut st));
    assert_eq!(specialize_central(&z, &p).unwrap(), fin(e(1, 2, 3)));

    let zero = EvalParams::new(r, k(0), k(1), k(3));
    assert!(specialize_central(&x, &zero).unwrap().is_zero());
    let singular = EvalParams::new(r, k(1), k(-1), k(0));
    assert_eq!(singular.c_value(), Err(EvalError::SingularHbar));
}

#[test]
fn odd_images_are_odd() {
    for (m, n) in DESK {
        let r = rank(m, n);
        let p = EvalParams::formal(r);
        let mut st = straightener(r);
        let asg = evaluation_assignment(&p, &mut st).unwrap();
        assert!(asg.parity_mismatches().is_empty());
        for i in [0, m] {
            for level in [0, 1] {
                for sign in [1, -1] {
                    let g = YangianGenerator::x(sign, i, level);
                    assert_eq!(asg.get(&g).unwrap().parity(&r), Some(1), "{g}");
                }
            }
        }
        assert_eq!(asg.get(&YangianGenerator::h(0, 1)).unwrap().parity(&r), Some(0));
    }
}

#[test]
fn evaluation_at_numbers_agrees_with_formal() {
    let r = rank(2, 3);
    let formal = EvalParams::formal(r);
    let num = EvalParams::new(r, k(3), k(5), k(7));
    let mut st = straightener(r);
    for i in 0..r.size() {
        let f = ev_h1(&formal, i, &mut st).unwrap();
        let at = f.map_coefficients(|x| x.evaluate(&[3.into(), 5.into(), 7.into()].map(num_rational::BigRational::from_integer)).map(Scalar::from_rational).unwrap());
        assert_eq!(at, ev_h1(&num, i, &mut st).unwrap());
    }
}
