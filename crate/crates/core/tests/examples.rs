//! Worked examples for each public operation, with expected values computed by hand.

use iofpar::canonical::{canonical_word, check_wellformed_reconstruction, reconstruct, reconstruction_frame};
use iofpar::monoid::{
    closure, enumerate_monoid, gen_u, gen_v, gen_x, generators, is_member_direct, is_member_prop1, FailedCondition,
};
use iofpar::normalform::{check_q0, compute_aw, enumerate_wn, in_q0, recognize, BlockSequence, NormalFormWord, Q0Violation};
use iofpar::relations::{instantiate_relations, verify_relation, Family, Params};
use iofpar::rewriter::{apply_once, Direction, Rewriter};
use iofpar::verify::{verify_presentation, VerifyConfig};
use iofpar::word::parse_blocks;
use iofpar::{Block, Error, Limits, PartialInjection, PointSet, Word};

fn pi(n: usize, pairs: &[(usize, usize)]) -> PartialInjection {
    PartialInjection::from_pairs(n, pairs).unwrap()
}

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

#[test]
fn composition_and_inverse() {
    let u2 = gen_u(2, 6).unwrap();
    assert_eq!(PartialInjection::identity(6).unwrap().compose(&u2).unwrap(), u2);
    let u1 = gen_u(1, 6).unwrap();
    assert_eq!(u1.compose(&u1).unwrap(), pi(6, &[(5, 5), (6, 6)]));
    let e = PartialInjection::empty(6).unwrap();
    assert_eq!(e.compose(&u1).unwrap(), e);
    assert_eq!(u2.inverse(), pi(6, &[(3, 1), (4, 2), (6, 6)]));
    assert_eq!(u2.inverse().inverse(), u2);
    assert!(matches!(u1.compose(&gen_u(1, 5).unwrap()), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn partial_identities() {
    let d = PointSet::range(1, 6).difference(PointSet::from_iter([3]));
    assert_eq!(PartialInjection::partial_identity(d, 6).unwrap(), gen_v(3, 6).unwrap());
    assert!(PartialInjection::partial_identity(PointSet::empty(), 4).unwrap().is_empty_map());
    assert_eq!(PartialInjection::partial_identity(PointSet::full(4), 4).unwrap(), PartialInjection::identity(4).unwrap());
}

#[test]
fn membership_examples() {
    let f = pi(6, &[(1, 3), (2, 4), (6, 6)]);
    assert!(is_member_prop1(&f).is_member);
    assert_eq!(f, gen_u(2, 6).unwrap());
    let r = is_member_prop1(&pi(6, &[(1, 2)]));
    assert_eq!(r.failed_condition, Some(FailedCondition::Parity));
    let r = is_member_prop1(&pi(6, &[(1, 3), (2, 6)]));
    assert!(matches!(r.failed_condition, Some(FailedCondition::Step1(_))), "{r:?}");
    for f in PartialInjection::all(2).unwrap() {
        assert_eq!(is_member_prop1(&f).is_member, is_member_direct(&f));
    }
}

#[test]
fn generators_and_enumeration() {
    assert_eq!(gen_u(1, 6).unwrap(), pi(6, &[(1, 3), (5, 5), (6, 6)]));
    assert_eq!(gen_x(1, 6).unwrap(), pi(6, &[(3, 1), (5, 5), (6, 6)]));
    assert_eq!(gen_v(3, 6).unwrap(), pi(6, &[(1, 1), (2, 2), (4, 4), (5, 5), (6, 6)]));
    assert!(matches!(gen_u(5, 6), Err(Error::OutOfRange { .. })));
    let l = Limits::default();
    assert_eq!(enumerate_monoid(1, &l).unwrap().len(), 2);
    let m2 = enumerate_monoid(2, &l).unwrap();
    assert_eq!(m2.len(), 4);
    assert!(m2.contains(&pi(2, &[(2, 2)])) && m2.contains(&pi(2, &[(1, 1)])));
    assert_eq!(closure(&[], 3).unwrap(), vec![PartialInjection::identity(3).unwrap()]);
    let c = closure(&[gen_v(1, 2).unwrap()], 2).unwrap();
    assert_eq!(c.len(), 2);
    assert_eq!(closure(&generators(5).unwrap(), 5).unwrap(), enumerate_monoid(5, &l).unwrap());
    assert!(matches!(enumerate_monoid(12, &l), Err(Error::Resource { .. })));
}

#[test]
fn word_examples() {
    assert_eq!(w("u1 u1").evaluate(6).unwrap(), pi(6, &[(5, 5), (6, 6)]));
    assert_eq!(Word::empty().evaluate(4).unwrap(), PartialInjection::identity(4).unwrap());
    assert_eq!(w("v3 u2").evaluate(6).unwrap(), w("u2").evaluate(6).unwrap());
    assert_eq!(w("x1 x3").reverse_inverse(), w("x3 x1"));
    assert_eq!(w("u1 x3 v2").reverse_inverse(), w("v2 x3 u1"));
    assert_eq!(Block::u(1, 2).expand(), w("u1 u3"));
    assert_eq!(Block::x(4, 1).expand(), w("x4"));
    assert_eq!(parse_blocks(&w("u1 u3 x5")).unwrap(), vec![Block::u(1, 2), Block::x(5, 1)]);
    assert!(w("u5").evaluate(6).is_err());
    assert!("q1".parse::<Word>().is_err());
}

#[test]
fn relation_examples() {
    let rs6 = instantiate_relations(6);
    let find = |rs: &[iofpar::relations::RelationInstance], fam: Family, lhs: &str| {
        rs.iter().find(|r| r.family == fam && r.lhs == w(lhs)).cloned().unwrap()
    };
    assert_eq!(find(&rs6, Family::R7, "u1 u1").rhs, w("v1 v2 v3 v4"));
    let r4 = find(&rs6, Family::R4, "v1 u2");
    assert_eq!((r4.rhs.clone(), r4.params), (w("u2 v3"), Params::IJ(1, 2)));
    assert_eq!(find(&instantiate_relations(4), Family::L1, "u2 u1").rhs, w("v1 v2 v3 v4"));
    assert_eq!(w("u1 u4").evaluate(8).unwrap(), w("v7 u1 u3").evaluate(8).unwrap());
    assert_eq!(w("x2 u2").evaluate(7).unwrap(), w("v1 v2 v5").evaluate(7).unwrap());
    for n in 1..=6 {
        for i in 1..=n {
            assert_eq!(w(&format!("v{i} v{i}")).evaluate(n).unwrap(), w(&format!("v{i}")).evaluate(n).unwrap());
        }
        for r in instantiate_relations(n) {
            assert!(verify_relation(&r, n).unwrap().ok, "{r}");
        }
    }
    assert_eq!(instantiate_relations(1).len(), 1);
}

#[test]
fn block_sequence_examples() {
    assert!(in_q0(&BlockSequence::new(vec![Block::u(1, 2)]), 6));
    let bad = BlockSequence::new(vec![Block::u(1, 1), Block::u(2, 1)]);
    assert!(matches!(check_q0(&bad, 6), Err(Q0Violation::USpacing(..))));
    let one = BlockSequence::new(vec![Block::u(1, 2)]);
    assert_eq!(compute_aw(&one, 8), PointSet::from_iter([7, 8]));
    assert_eq!(compute_aw(&one, 6), PointSet::empty());
    let nf = NormalFormWord::new(PointSet::from_iter([7, 8]), one, 8).unwrap();
    assert_eq!(nf.render(), w("v7 v8 u1 u3"));
    let pure = NormalFormWord::new(PointSet::range(1, 4), BlockSequence::default(), 6).unwrap();
    assert_eq!(pure.render(), w("v1 v2 v3 v4"));
    assert_eq!(recognize(&w("u1 u2"), 6), None);
    assert_eq!(recognize(&w("v7 v8 u1 u3"), 8), Some(nf));
    let w1 = enumerate_wn(1, &Limits::default()).unwrap();
    assert_eq!(w1.iter().map(|nf| nf.render()).collect::<Vec<_>>(), vec![Word::empty(), w("v1")]);
}

#[test]
fn rewriter_examples() {
    let rw = Rewriter::new(6).unwrap();
    let (nf, trace) = rw.normalize(&w("u1 u1")).unwrap();
    assert_eq!(nf.render(), w("v1 v2 v3 v4"));
    assert!(!trace.steps.is_empty());
    let (nf, _) = rw.normalize(&w("v3 u2")).unwrap();
    assert_eq!(nf.blocks.blocks, vec![Block::u(2, 1)]);
    assert!(nf.a.is_empty());
    let (nf, trace) = Rewriter::new(8).unwrap().normalize(&w("v7 u1 u3")).unwrap();
    assert_eq!(nf.render(), w("v7 u1 u3"));
    assert!(trace.steps.is_empty());
    let r10 = instantiate_relations(8)
        .into_iter()
        .find(|r| r.family == Family::R10 && r.params == Params::I(1))
        .unwrap();
    assert_eq!(apply_once(&w("u1 u4"), &r10, Direction::Forward, 0).unwrap(), w("v7 u1 u3"));
    assert!(matches!(apply_once(&w("u1 u4"), &r10, Direction::Forward, 1), Err(Error::Application { .. })));
}

#[test]
fn canonical_examples() {
    let f = pi(8, &[(1, 5), (7, 7), (8, 8)]);
    let nf = canonical_word(&f, 8).unwrap();
    assert!(nf.a.is_empty());
    assert_eq!(nf.render(), w("u1 u3"));
    assert_eq!(canonical_word(&pi(5, &[(5, 5)]), 5).unwrap().render(), w("v1 v2 v3 v4"));
    let u2 = gen_u(2, 6).unwrap();
    assert_eq!(canonical_word(&u2, 6).unwrap().render().evaluate(6).unwrap(), u2);
    assert!(matches!(canonical_word(&pi(6, &[(1, 2)]), 6), Err(Error::Domain(_))));
    assert!(matches!(canonical_word(&PartialInjection::empty(3).unwrap(), 3), Err(Error::Domain(_))));

    let nf = recognize(&w("u1 u3"), 8).unwrap();
    assert_eq!(reconstruct(&nf, 8).unwrap(), f);
    let pure = recognize(&w("v2 v4"), 5).unwrap();
    assert_eq!(reconstruct(&pure, 5).unwrap(), pi(5, &[(1, 1), (3, 3), (5, 5)]));
    let frame = reconstruction_frame(&BlockSequence::new(vec![Block::u(1, 2)]), 8).unwrap();
    let k = frame.indicators[0];
    assert_eq!((frame.a[0] - k.u, frame.b[0] - k.x), (6, 2));
    assert!(check_wellformed_reconstruction(&pure, 5));
}

#[test]
fn report_examples() {
    let l = Limits::default();
    let mut cfg = VerifyConfig::new(5);
    cfg.budget = 500;
    let r = verify_presentation(&cfg, &l).unwrap();
    assert!(r.presentation_verified);
    assert_eq!(r.monoid_size, r.wn_size);
    assert_eq!(r.closure_size, r.monoid_size);
    let r1 = verify_presentation(&VerifyConfig { budget: 50, ..VerifyConfig::new(1) }, &l).unwrap();
    assert_eq!((r1.monoid_size, r1.wn_size), (2, 2));
    assert!(r1.presentation_verified);
    assert!(matches!(verify_presentation(&VerifyConfig::new(40), &l), Err(Error::Resource { .. })));
}
