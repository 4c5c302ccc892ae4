use affine_yangian::affine_gl::LoopGen;
use affine_yangian::pbw::{straightener, Element, LoopStraightener, Monomial};
use affine_yangian::tails::{
    family, family_bracket_family, family_bracket_finite, resolve_deltas, Completion, IndexPoly, Pattern,
    TailFamily,
};
use affine_yangian::{Coefficient, RankData};
use num_rational::BigRational;
use proptest::prelude::*;

type Q = BigRational;
type E = Element<Q>;
type C = Completion<Q>;

fn q(n: i64) -> Q {
    Q::from_int(n)
}

fn r32() -> RankData {
    RankData::new(3, 2).unwrap()
}

fn window(x: &C, n: i32, s_max: i64, st: &mut LoopStraightener) -> E {
    x.expand(s_max, st).truncate_project(n)
}

fn mono(units: &[(usize, usize, i32)], c: u16) -> Monomial {
    let mut m = Monomial::from_factors(&units.iter().map(|&(r, k, s)| LoopGen::new(r, k, s)).collect::<Vec<_>>());
    m.c = c;
    m
}

#[test]
fn delta_resolution_examples() {
    let r = r32();
    let mut st = straightener(r);
    // δ_{s+a,0} s c E_22(−s)
    let base = |a: i32| {
        TailFamily::new(vec![Pattern::new(2, 2, -1, 0)], q(1))
            .with_coeff(IndexPoly::linear(1, 0))
            .with_central(1, 0)
            .with_delta(1, a)
    };
    assert!(resolve_deltas(&base(1), &mut st).unwrap().is_zero());
    let two = resolve_deltas(&base(-2), &mut st).unwrap();
    assert_eq!(two, C::from_finite(E::monomial(mono(&[(2, 2, -2)], 1), q(2))));
    // δ_{−s+a,0} s c E_22(s), a = 3
    let f = TailFamily::new(vec![Pattern::new(2, 2, 1, 0)], q(1))
        .with_coeff(IndexPoly::linear(1, 0))
        .with_central(1, 0)
        .with_delta(-1, 3);
    let three = resolve_deltas(&f, &mut st).unwrap();
    assert_eq!(three, C::from_finite(E::monomial(mono(&[(2, 2, 3)], 1), q(3))));
}

#[test]
fn family_with_finite_brackets() {
    let r = r32();
    let mut st = straightener(r);
    let f = family(q(1), &[(1, 2, -1, 0), (2, 1, 1, 0)]);
    assert!(family_bracket_finite(&f, &E::unit(1, 1, 0), &mut st).unwrap().is_zero());
    assert!(family_bracket_finite(&f, &E::central_c(), &mut st).unwrap().is_zero());
    let nonzero = family_bracket_finite(&f, &E::unit(1, 1, 2), &mut st).unwrap();
    assert!(!nonzero.is_zero());
}

#[test]
fn family_brackets() {
    let r = r32();
    let mut st = straightener(r);
    let f = family(q(1), &[(1, 2, -1, 0), (2, 1, 1, 0)]);
    assert!(family_bracket_family(&f, &f, &mut st)
        .unwrap()
        .canonicalize(&mut st)
        .map(|x| x.is_zero() || x.has_doubles())
        .unwrap());
    let ff = Completion::from_family(f.clone(), &mut st).unwrap();
    assert!(ff.bracket(&ff, &mut st).unwrap().is_zero());
    let g = family(q(1), &[(3, 4, -1, 0), (4, 3, 1, 0)]);
    assert!(family_bracket_family(&f, &g, &mut st).unwrap().is_zero());
    let h = family(q(1), &[(2, 3, -1, 0), (3, 2, 1, 0)]);
    let sym = family_bracket_family(&f, &h, &mut st).unwrap();
    assert!(!sym.is_zero());
    let (n, s_max) = (3, 8);
    let ef = Completion::from_family(f, &mut st).unwrap().expand(s_max, &mut st);
    let eh = Completion::from_family(h, &mut st).unwrap().expand(s_max, &mut st);
    let oracle = ef.bracket(&eh, &mut st).truncate_project(n);
    assert_eq!(window(&sym, n, s_max, &mut st), oracle);
    assert!(!oracle.is_zero());
}

#[test]
fn expand_examples() {
    let mut st = straightener(r32());
    let f = C::from_family(family(q(1), &[(1, 2, -1, 0), (2, 1, 1, 0)]), &mut st).unwrap();
    assert_eq!(f.expand(2, &mut st).len(), 3);
    assert!(C::zero().expand(5, &mut st).is_zero());
    assert!(f.sub(&f).is_zero());
}

#[test]
fn telescoping_sums_merge() {
    let r = r32();
    let mut st = straightener(r);
    let n = r.size();
    let mut x = C::zero();
    let mut diag = C::zero();
    for i in 1..=n {
        for k in 1..=i {
            let w = q(r.sign(i) * r.sign(k));
            x.add_assign(&C::from_family(family(w.clone(), &[(i, k, -1, 0), (k, i, 1, 0)]), &mut st).unwrap());
            if k < i {
                x.add_assign(&C::from_family(family(-w, &[(i, k, -1, 0), (k, i, 1, 0)]), &mut st).unwrap());
            }
        }
        diag.add_assign(&C::from_family(family(q(1), &[(i, i, -1, 0), (i, i, 1, 0)]), &mut st).unwrap());
    }
    assert_eq!(x, diag);
    // Shifted start: Σ_{s≥0} E(−s−1)E(s+1) = Σ_{s≥0} E(−s)E(s) − E(0)E(0)
    let shifted = C::from_family(family(q(1), &[(1, 1, -1, -1), (1, 1, 1, 1)]), &mut st).unwrap();
    let base = C::from_family(family(q(1), &[(1, 1, -1, 0), (1, 1, 1, 0)]), &mut st).unwrap();
    let e0 = E::unit(1, 1, 0);
    assert_eq!(shifted, base.sub(&C::from_finite(e0.mul(&e0, &mut st))));
}

/// A random completion built from the quadratic shapes that the evaluation
/// map produces, with small index offsets.
fn ev_shape() -> impl Strategy<Value = (Vec<(usize, usize, i32, i32, i64)>, Vec<(usize, usize, i32, i64)>)> {
    (
        proptest::collection::vec((1usize..=5, 1usize..=5, -2i32..=2, -2i32..=2, -3i64..=3), 1..=4),
        proptest::collection::vec((1usize..=5, 1usize..=5, -2i32..=2, -3i64..=3), 0..=3),
    )
}

fn build(
    shape: &(Vec<(usize, usize, i32, i32, i64)>, Vec<(usize, usize, i32, i64)>),
    st: &mut LoopStraightener,
) -> (C, Vec<TailFamily<Q>>, E) {
    let mut fin = E::zero();
    for &(a, b, s, k) in &shape.1 {
        fin.add_assign(&E::unit(a, b, s).scale(&q(k)));
    }
    let mut raw = Vec::new();
    let mut x = C::from_finite(fin.clone());
    for &(a, b, k1, k2, k) in &shape.0 {
        let f = family(q(k), &[(a, b, -1, k1), (b, a, 1, k2)]);
        x.absorb(f.clone(), st).unwrap();
        raw.push(f);
    }
    (x, raw, fin)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn canonical_form_matches_raw_expansion(shape in ev_shape()) {
        let mut st = straightener(r32());
        let (x, raw, fin) = build(&shape, &mut st);
        let (n, a) = (3, 4);
        let s_max = n as i64 + a + 1;
        let mut oracle = fin;
        for f in &raw {
            oracle.add_assign(&f.expand(s_max, &mut st));
        }
        prop_assert_eq!(window(&x, n, s_max, &mut st), oracle.truncate_project(n));
        prop_assert_eq!(x.canonicalize(&mut st).unwrap(), x);
    }

    #[test]
    fn equality_iff_window_agreement(shape in ev_shape(), shift in 1i32..=3, tweak in -1i64..=1) {
        let mut st = straightener(r32());
        let (x, raw, fin) = build(&shape, &mut st);
        // Same element, families re-indexed by `shift` with the dropped summands kept finite.
        let mut y = C::from_finite(fin);
        for f in &raw {
            let mut g = f.clone();
            for p in g.factors.iter_mut() {
                p.konst += p.slope * shift;
            }
            y.absorb(g, &mut st).unwrap();
            for s in 0..shift as i64 {
                y.add_finite(&f.instance(s, &mut st));
            }
        }
        y.add_finite(&E::unit(1, 2, 0).scale(&q(tweak)));
        let (n, s_max) = (3, 3 + 4 + 3 + 1);
        let same = window(&x, n, s_max, &mut st) == window(&y, n, s_max, &mut st);
        prop_assert_eq!(x == y, same);
        prop_assert_eq!(x == y, tweak == 0);
    }

    #[test]
    fn bracket_with_finite_commutes_with_expand(shape in ev_shape(), a in 1usize..=5, b in 1usize..=5, s in -2i32..=2) {
        let mut st = straightener(r32());
        let (x, _, _) = build(&shape, &mut st);
        let y = E::unit(a, b, s);
        let sym = x.bracket_finite(&y, &mut st).unwrap();
        let (n, s_max) = (3, 3 + 6 + 1);
        let oracle = x.expand(s_max, &mut st).bracket(&y, &mut st).truncate_project(n);
        prop_assert_eq!(window(&sym, n, s_max, &mut st), oracle);
    }

    #[test]
    fn delta_resolution_preserves_expansion(k in -3i32..=3, off in -2i32..=2, s_max in 3i64..=8) {
        let mut st = straightener(r32());
        let f = TailFamily::new(vec![Pattern::new(2, 2, -1, off)], q(1))
            .with_coeff(IndexPoly::linear(1, 0))
            .with_central(1, 0)
            .with_delta(1, k);
        let resolved = resolve_deltas(&f, &mut st).unwrap();
        prop_assert_eq!(resolved.expand(s_max, &mut st), f.expand(s_max, &mut st));
    }
}
