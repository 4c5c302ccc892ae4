use affine_yangian::affine_gl::{bracket_units, Generator, LoopGen};
use affine_yangian::pbw::{sl_membership, straightener, Element, Monomial};
use affine_yangian::{Coefficient, RankData};
use num_rational::BigRational;
use proptest::prelude::*;
use std::collections::BTreeMap;

type Q = BigRational;
type E = Element<Q>;

fn rank() -> RankData {
    RankData::superalgebra(2, 2)
}

/// Bubble sort with explicit brackets, no memo: an independent normal ordering.
fn naive_order(rank: &RankData, word: Vec<LoopGen>, c: u16, z: u16, k: i64, out: &mut BTreeMap<Monomial, i64>) {
    for i in 0..word.len().saturating_sub(1) {
        let (x, y) = (word[i], word[i + 1]);
        if x == y && x.parity(rank) == 1 {
            return;
        }
        if x > y {
            let sign = if x.parity(rank) * y.parity(rank) == 1 { -1 } else { 1 };
            let mut swapped = word.clone();
            swapped.swap(i, i + 1);
            naive_order(rank, swapped, c, z, sign * k, out);
            for (g, n) in bracket_units(rank, x, y) {
                let mut w: Vec<LoopGen> = word[..i].to_vec();
                let (mut c2, mut z2) = (c, z);
                match g {
                    Generator::Unit(u) => w.push(u),
                    Generator::C => c2 += 1,
                    Generator::Z => z2 += 1,
                }
                w.extend_from_slice(&word[i + 2..]);
                naive_order(rank, w, c2, z2, k * n, out);
            }
            return;
        }
    }
    let m = Monomial { factors: word.into_iter().collect(), c, z };
    *out.entry(m).or_insert(0) += k;
}

fn letter() -> impl Strategy<Value = LoopGen> {
    (1usize..=4, 1usize..=4, -2i32..=2).prop_map(|(r, c, s)| LoopGen::new(r, c, s))
}

fn monomial_word() -> impl Strategy<Value = Vec<LoopGen>> {
    proptest::collection::vec(letter(), 0..=3)
}

/// A homogeneous (in parity) element with a few terms.
fn element(parity: u8) -> impl Strategy<Value = E> {
    proptest::collection::vec((monomial_word(), -3i64..=3), 1..=3).prop_map(move |terms| {
        let r = rank();
        let mut st = straightener(r);
        let mut x = E::zero();
        for (w, k) in terms {
            let word: Vec<Generator> = w.into_iter().map(Generator::Unit).collect();
            let y = E::from_word(&mut st, &word, Q::from_int(k));
            x.add_assign(&y.filter(|m| m.parity(&r) == parity));
        }
        x
    })
}

fn sign(p: u8) -> Q {
    Q::from_int(if p % 2 == 1 { -1 } else { 1 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn straightener_matches_bubble_sort(w in proptest::collection::vec(letter(), 0..=5)) {
        let r = rank();
        let mut st = straightener(r);
        let word: Vec<Generator> = w.iter().copied().map(Generator::Unit).collect();
        let fast = E::from_word(&mut st, &word, Q::from_int(1));
        let mut slow = BTreeMap::new();
        naive_order(&r, w, 0, 0, 1, &mut slow);
        let mut oracle = E::zero();
        for (m, k) in slow {
            oracle.add_term(m, Q::from_int(k));
        }
        prop_assert_eq!(fast, oracle);
    }

    #[test]
    fn normal_form_is_confluent(w in proptest::collection::vec(letter(), 1..=5), cut in 0usize..5) {
        let r = rank();
        let mut st = straightener(r);
        let cut = cut.min(w.len());
        let g = |v: &[LoopGen]| v.iter().copied().map(Generator::Unit).collect::<Vec<_>>();
        let whole = E::from_word(&mut st, &g(&w), Q::from_int(1));
        let left = E::from_word(&mut st, &g(&w[..cut]), Q::from_int(1));
        let right = E::from_word(&mut st, &g(&w[cut..]), Q::from_int(1));
        prop_assert!(whole.is_normal(&r));
        prop_assert_eq!(left.mul(&right, &mut st), whole);
    }

    #[test]
    fn multiplication_is_associative(x in element(0), y in element(1), z in element(0)) {
        let mut st = straightener(rank());
        let a = x.mul(&y, &mut st).mul(&z, &mut st);
        let b = x.mul(&y.mul(&z, &mut st), &mut st);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn bracket_is_a_super_derivation(
        (px, py, x, y, z) in (0u8..2, 0u8..2, 0u8..2)
            .prop_flat_map(|(a, b, c)| (Just(a), Just(b), element(a), element(b), element(c)))
    ) {
        let mut st = straightener(rank());
        let lhs = x.bracket(&y.mul(&z, &mut st), &mut st);
        let rhs = x
            .bracket(&y, &mut st)
            .mul(&z, &mut st)
            .add(&y.mul(&x.bracket(&z, &mut st), &mut st).scale(&sign(px * py)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn degree_is_additive(x in element(0), y in element(1)) {
        let mut st = straightener(rank());
        let x = x.filter(|m| m.degree() == 1);
        let y = y.filter(|m| m.degree() == -2);
        let p = x.mul(&y, &mut st);
        if !p.is_zero() {
            prop_assert_eq!(p.degree(), Some(-1));
        }
    }

    #[test]
    fn sl_membership_survives_truncation(x in element(0), y in element(0), n in 0i32..=2) {
        let r = rank();
        let mut st = straightener(r);
        let sx = sl_membership(&r, &x).sl_part;
        let sy = sl_membership(&r, &y).sl_part;
        prop_assert!(sl_membership(&r, &sx).in_sl);
        let p = sx.mul(&sy, &mut st);
        prop_assert!(sl_membership(&r, &p).in_sl);
        prop_assert!(sl_membership(&r, &p.truncate_project(n)).in_sl);
    }
}

#[test]
fn cocycle_restricted_to_sl_has_no_z() {
    let r = rank();
    let mut st = straightener(r);
    let h = |k: usize, s: i32| {
        E::unit(k, k, s)
            .scale(&Q::from_int(r.sign(k)))
            .sub(&E::unit(k + 1, k + 1, s).scale(&Q::from_int(r.sign(k + 1))))
    };
    for i in 1..4 {
        for j in 1..4 {
            for s in -2..=2 {
                let b = h(i, s).bracket(&h(j, -s), &mut st);
                assert!(b.terms().all(|(m, _)| m.z == 0 && m.factors.is_empty()));
                assert!(sl_membership(&r, &b).in_sl);
            }
        }
    }
}
