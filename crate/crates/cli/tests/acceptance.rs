//! One line per acceptance criterion. Criteria 1 and 2 do not hold as
//! stated; for those the line reads FAIL and the run still checks that the
//! gap is exactly the known correction, so any other discrepancy fails the
//! target.

use std::time::Instant;

use affine_yangian::affine_gl::{Generator, LieElement, LoopGen};
use affine_yangian::evalmap::{evaluation_assignment, EvalParams};
use affine_yangian::pbw::{straightener, Element, LoopStraightener};
use affine_yangian::surjectivity::{self as surj, ClaimTerm};
use affine_yangian::tails::{family, Completion};
use affine_yangian::yangian::{check_assignment, minimal_relations, EvalMode, RelationId};
use affine_yangian::{Coefficient, RankData, Scalar};
use ayev::commands::{self, Identity};
use ayev::config::RunConfig;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Q = BigRational;

const DESK: [(usize, usize); 4] = [(2, 3), (3, 2), (2, 4), (3, 4)];

struct Outcome {
    pass: bool,
    /// Whether the run matches what is known about the criterion.
    expected: bool,
    note: String,
}

fn cfg(m: usize, n: usize) -> RunConfig {
    RunConfig {
        m: Some(m),
        n: Some(n),
        ..RunConfig::default()
    }
}

fn criterion1() -> Outcome {
    let mut expected = true;
    let mut slowest = 0f64;
    for (m, n) in DESK {
        let t = Instant::now();
        let rep = commands::check_identity(&cfg(m, n), Identity::T0).unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        let main = rep.entries.iter().find(|e| e.id == "t0").unwrap();
        let steps_ok = rep.entries.iter().filter(|e| e.id != "t0").all(|e| e.passed());
        expected &= steps_ok && !main.passed() && main.details["residual_is_h0_correction"] == "true";
    }
    Outcome {
        pass: false,
        expected,
        note: format!(
            "cancellation steps exact on 4 ranks; residual is hbar*c*(E1,1 + EN,N) - hbar*c^2/2, not zero; slowest rank {slowest:.1}s"
        ),
    }
}

fn criterion2() -> Outcome {
    let t = Instant::now();
    let mut central_ok = true;
    let mut displays = 0;
    let mut mismatched = 0;
    let mut gaps_ok = true;
    for (m, n) in [(3, 2), (2, 3)] {
        let r = RankData::new(m, n).unwrap();
        let p = EvalParams::formal(r);
        let mut st = straightener(r);
        for i in 1..r.size() {
            for a in [-2, -1, 1, 2] {
                let d = surj::h1_diag_commutator(&p, i, a, &mut st).unwrap();
                central_ok &= d.central_matches && d.sl_check.in_sl;
                for term in ClaimTerm::ALL {
                    let c = surj::claim1_terms(&p, i, a, term, &mut st).unwrap();
                    displays += 1;
                    let gap = c.computed.sub(&c.display);
                    let corr = surj::claim_display_correction(&p, i, a, term);
                    gaps_ok &= gap == Completion::from_finite(corr.clone());
                    if !c.matches {
                        mismatched += 1;
                        gaps_ok &= term == ClaimTerm::Term3 && r.p(i) == 1 && a < 0;
                    }
                }
            }
        }
    }
    Outcome {
        pass: central_ok && mismatched == 0,
        expected: central_ok && gaps_ok,
        note: format!(
            "central formula and sl part hold at every node; {mismatched}/{displays} claim displays off by the sign on the third term at odd nodes, a < 0; {:.1}s",
            t.elapsed().as_secs_f64()
        ),
    }
}

fn criterion3() -> Outcome {
    let t = Instant::now();
    let mut pass = true;
    let mut count = 0;
    let mut truncated = 0;
    for (m, n) in DESK {
        let r = RankData::new(m, n).unwrap();
        let mut st = straightener(r);
        let asg = evaluation_assignment(&EvalParams::formal(r), &mut st).unwrap();
        let rels = minimal_relations(&r).unwrap();
        for out in check_assignment(&rels, &asg, EvalMode::Symbolic, (4, 6)) {
            let out = out.unwrap();
            count += 1;
            pass &= out.verdict.holds();
            let level11 = out.id == RelationId::Eq21 && out.params.r == Some(1) && out.params.s == Some(1);
            match out.mode {
                EvalMode::Truncated { window, .. } => {
                    truncated += 1;
                    pass &= level11 && window == 4;
                }
                EvalMode::Symbolic => pass &= !level11,
            }
        }
    }
    Outcome {
        pass,
        expected: pass,
        note: format!(
            "{count} relation instances on 4 ranks, {truncated} level (1,1) instances in truncated mode N=4; {:.1}s",
            t.elapsed().as_secs_f64()
        ),
    }
}

fn criterion4() -> Outcome {
    let mut pass = true;
    let mut targets = 0;
    for (m, n) in [(3, 2), (2, 3)] {
        let mut c = cfg(m, n);
        c.window = Some(2);
        let rep = commands::density_report(&c).unwrap();
        targets += rep.entries.len();
        pass &= rep.ok() && rep.entries.len() == 5 * (m + n);
        pass &= rep.entries.iter().any(|e| e.id == format!("E{0},{0}(0)", m + n));
        c.eps1 = Some("0".into());
        let bad = commands::density_report(&c).unwrap();
        pass &= !bad.ok() && bad.error.as_deref().is_some_and(|e| e.contains("degenerate central charge"));
    }
    Outcome {
        pass,
        expected: pass,
        note: format!("{targets} diagonal targets witnessed for (3|2) and (2|3); eps1 = 0 reports degenerate central charge"),
    }
}

fn sgn(p: u8) -> Q {
    Q::from_int(if p % 2 == 1 { -1 } else { 1 })
}

fn jacobi_holds(r: &RankData) -> (bool, usize) {
    let mut gens: Vec<Generator> = vec![Generator::C, Generator::Z];
    for a in 1..=r.size() {
        for b in 1..=r.size() {
            for s in -2..=2 {
                gens.push(Generator::unit(a, b, s));
            }
        }
    }
    let basis: Vec<LieElement<Q>> = gens.iter().map(|&g| LieElement::basis(g)).collect();
    let k = gens.len();
    let ok = (0..k).into_par_iter().all(|x| {
        let px = gens[x].parity(r);
        (0..k).all(|y| {
            let py = gens[y].parity(r);
            let xy = basis[x].bracket(r, &basis[y]);
            if xy != basis[y].bracket(r, &basis[x]).scale(&-sgn(px * py)) {
                return false;
            }
            if y < x {
                return true;
            }
            // cyclic sum is invariant under permutations once antisymmetry holds
            (y..k).all(|z| {
                let pz = gens[z].parity(r);
                let t1 = basis[x].bracket(r, &basis[y].bracket(r, &basis[z])).scale(&sgn(px * pz));
                let t2 = basis[y].bracket(r, &basis[z].bracket(r, &basis[x])).scale(&sgn(py * px));
                let t3 = basis[z].bracket(r, &xy).scale(&sgn(pz * py));
                t1.add(&t2).add(&t3).is_zero()
            })
        })
    });
    (ok, k)
}

fn random_word(rng: &mut ChaCha8Rng, r: &RankData) -> Vec<LoopGen> {
    let len = rng.gen_range(1..=6);
    (0..len)
        .map(|_| LoopGen::new(rng.gen_range(1..=r.size()), rng.gen_range(1..=r.size()), rng.gen_range(-2..=2)))
        .collect()
}

fn pbw_confluent(rng: &mut ChaCha8Rng) -> bool {
    let r = RankData::new(2, 3).unwrap();
    let mut st = straightener(r);
    let g = |v: &[LoopGen]| v.iter().copied().map(Generator::Unit).collect::<Vec<_>>();
    (0..200).all(|_| {
        let w = random_word(rng, &r);
        let whole = Element::<Q>::from_word(&mut st, &g(&w), Q::from_int(1));
        whole.is_normal(&r)
            && (0..=w.len()).all(|cut| {
                let left = Element::<Q>::from_word(&mut st, &g(&w[..cut]), Q::from_int(1));
                let right = Element::<Q>::from_word(&mut st, &g(&w[cut..]), Q::from_int(1));
                left.mul(&right, &mut st) == whole
            })
    })
}

/// A random matrix with zero supertrace, as (row, col, entry).
fn random_sl(rng: &mut ChaCha8Rng, r: &RankData) -> Vec<(usize, usize, i64)> {
    let mut x: Vec<(usize, usize, i64)> = (0..rng.gen_range(1..=4))
        .map(|_| (rng.gen_range(1..=r.size()), rng.gen_range(1..=r.size()), rng.gen_range(-3..=3)))
        .collect();
    let str_x: i64 = x.iter().filter(|e| e.0 == e.1).map(|e| r.sign(e.0) * e.2).sum();
    x.push((1, 1, -str_x));
    x
}

fn cocycle_consistent(rng: &mut ChaCha8Rng) -> bool {
    let r = RankData::new(3, 2).unwrap();
    (0..100).all(|_| {
        let (xs, ys) = (random_sl(rng, &r), random_sl(rng, &r));
        let a = rng.gen_range(-2..=2);
        let b = if rng.gen_bool(0.5) { -a } else { rng.gen_range(-2..=2) };
        let lift = |m: &[(usize, usize, i64)], s: i32| {
            let mut e = LieElement::<Q>::zero();
            for &(i, j, k) in m {
                e.add_term(Generator::unit(i, j, s), Q::from_int(k));
            }
            e
        };
        let br = lift(&xs, a).bracket(&r, &lift(&ys, b));
        // a δ_{a+b,0} str(XY)
        let mut str_xy = 0;
        for &(i, j, x) in &xs {
            for &(k, l, y) in &ys {
                if j == k && i == l {
                    str_xy += r.sign(i) * x * y;
                }
            }
        }
        let want = if a + b == 0 { a as i64 * str_xy } else { 0 };
        br.coefficient(&Generator::Z) == Q::from_int(0) && br.coefficient(&Generator::C) == Q::from_int(want)
    })
}

fn criterion5() -> Outcome {
    let t = Instant::now();
    let mut pass = true;
    let mut triples = 0usize;
    for size in 2..=5 {
        for m in 1..size {
            let (ok, k) = jacobi_holds(&RankData::superalgebra(m, size - m));
            pass &= ok;
            triples += k * (k + 1) * (k + 2) / 6;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pbw = pbw_confluent(&mut rng);
    let cocycle = cocycle_consistent(&mut rng);
    Outcome {
        pass: pass && pbw && cocycle,
        expected: pass && pbw && cocycle,
        note: format!(
            "super-Jacobi on {triples} basis triples over 10 ranks, antisymmetry on all pairs, modes -2..2; PBW {pbw}; cocycle {cocycle}; {:.1}s",
            t.elapsed().as_secs_f64()
        ),
    }
}

type C = Completion<Q>;

fn random_completion(rng: &mut ChaCha8Rng, st: &mut LoopStraightener) -> (C, Vec<affine_yangian::tails::TailFamily<Q>>, Element<Q>) {
    let mut fin = Element::zero();
    for _ in 0..rng.gen_range(0..=3) {
        let u = Element::unit(rng.gen_range(1..=5), rng.gen_range(1..=5), rng.gen_range(-2..=2));
        fin.add_assign(&u.scale(&Q::from_int(rng.gen_range(-3..=3))));
    }
    let mut x = C::from_finite(fin.clone());
    let mut raw = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let (a, b) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let k = Q::from_int(rng.gen_range(-3..=3));
        let f = family(k, &[(a, b, -1, rng.gen_range(-2..=2)), (b, a, 1, rng.gen_range(-2..=2))]);
        x.absorb(f.clone(), st).unwrap();
        raw.push(f);
    }
    (x, raw, fin)
}

fn criterion6() -> Outcome {
    let r = RankData::new(3, 2).unwrap();
    let mut st = straightener(r);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (n, s_max) = (3, 11);
    let mut agree = 0;
    let mut equal = 0;
    for trial in 0..100 {
        let (x, raw, fin) = random_completion(&mut rng, &mut st);
        let y = if trial % 3 == 0 {
            random_completion(&mut rng, &mut st).0
        } else {
            // same element with every family re-indexed, maybe nudged
            let shift = rng.gen_range(1..=3);
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
            if rng.gen_bool(0.5) {
                y.add_finite(&Element::unit(1, 2, rng.gen_range(-3..=3)));
            }
            y
        };
        let symbolic = x == y;
        let windowed = x.expand(s_max, &mut st).truncate_project(n) == y.expand(s_max, &mut st).truncate_project(n);
        agree += usize::from(symbolic == windowed);
        equal += usize::from(symbolic);
    }
    Outcome {
        pass: agree == 100,
        expected: agree == 100,
        note: format!("{agree}/100 random pairs agree at N=3 ({equal} equal)"),
    }
}

fn criterion7() -> Outcome {
    use affine_yangian::tails::IndexPoly;
    let r = RankData::new(3, 2).unwrap();
    let clean = evaluation_assignment(&EvalParams::formal(r), &mut straightener(r)).unwrap();
    let rels: Vec<_> = minimal_relations(&r)
        .unwrap()
        .into_iter()
        .filter(|x| !(x.id == RelationId::Eq21 && x.params.r == Some(1) && x.params.s == Some(1)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut caught = 0;
    let gens: Vec<_> = clean.images.keys().copied().collect();
    for _ in 0..20 {
        let g = gens[rng.gen_range(0..gens.len())];
        let x = clean.images[&g].clone();
        let finite: Vec<_> = x.finite().terms().map(|(m, _)| m.clone()).collect();
        let families: Vec<_> = x.families().map(|(k, _)| k.clone()).collect();
        let mut y = x.clone();
        let pick = rng.gen_range(0..finite.len() + families.len());
        if pick < finite.len() {
            y.add_finite(&Element::monomial(finite[pick].clone(), Scalar::from_int(1)));
        } else {
            let f = families[pick - finite.len()].family(IndexPoly::constant(Scalar::from_int(1)));
            y.absorb(f, &mut straightener(r)).unwrap();
        }
        let mut asg = clean.clone();
        asg.insert(g, y);
        let touched: Vec<_> = rels.iter().filter(|x| x.generators().contains(&g)).cloned().collect();
        if check_assignment(&touched, &asg, EvalMode::Symbolic, (2, 5))
            .into_iter()
            .any(|o| !o.unwrap().verdict.holds())
        {
            caught += 1;
        }
    }
    Outcome {
        pass: caught == 20,
        expected: caught == 20,
        note: format!("{caught}/20 single-coefficient perturbations break a relation"),
    }
}

fn main() {
    let criteria: [fn() -> Outcome; 7] =
        [criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7];
    let mut unexpected = 0;
    for (k, f) in criteria.iter().enumerate() {
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let tag = if o.expected { "" } else { "  [UNEXPECTED]" };
        println!("{verdict}  criterion {}  {}{tag}", k + 1, o.note);
        unexpected += usize::from(!o.expected);
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria deviate from the recorded analysis");
        std::process::exit(1);
    }
}
