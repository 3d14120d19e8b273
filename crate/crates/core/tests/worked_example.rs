use std::path::PathBuf;
use std::sync::Arc;

use laxkit::distance::{
    behavioural_distance, check_certificate, distance_chain, least_certificate_gap, Certificate,
    Direction, DistanceOptions,
};
use laxkit::logic::{logical_distance, parse, print, Evaluator, Formula};
use laxkit::{Coalgebra, FuzzyRel, Lifting, LiftingSpec, Scalar};

fn fixture(path: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(path);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn q(s: &str) -> Scalar {
    Scalar::parse(s).unwrap()
}

struct Setup {
    a: Coalgebra,
    b: Coalgebra,
    l: Lifting,
    cert: Certificate,
}

fn small() -> Setup {
    let a = Coalgebra::from_json_str(&fixture("small-bisim/A.json")).unwrap();
    let b = Coalgebra::from_json_str(&fixture("small-bisim/B.json")).unwrap();
    let spec = LiftingSpec::from_json(
        &serde_json::from_str(&fixture("small-bisim/lifting.json")).unwrap(),
    )
    .unwrap();
    let l = Lifting::bind(spec, a.functor().clone()).unwrap();
    let cert = Certificate::from_json(
        &serde_json::from_str(&fixture("small-bisim/certificate.json")).unwrap(),
    )
    .unwrap();
    Setup { a, b, l, cert }
}

#[test]
fn certificate_is_tight_on_listed_pairs() {
    let s = small();
    let report = check_certificate(&s.l, &s.a, &s.b, &s.cert).unwrap();
    assert!(report.ok);
    for (a, b, v) in [
        ("a1", "b1", "1/5"),
        ("a2", "b3", "1/10"),
        ("a3", "b2", "1/20"),
    ] {
        let p = report.find(a, b, Direction::Forward).unwrap();
        assert_eq!(p.lifted, q(v));
        assert!(p.tight());
        assert!(report.find(a, b, Direction::Converse).unwrap().ok());
    }
    assert_eq!(report.pairs.len(), 6);
}

#[test]
fn lowered_certificate_fails_by_one_twentieth() {
    let mut s = small();
    s.cert.relation.set(0, 0, q("3/20"));
    let report = check_certificate(&s.l, &s.a, &s.b, &s.cert).unwrap();
    assert!(!report.ok);
    let p = report.find("a1", "b1", Direction::Forward).unwrap();
    assert_eq!(format!("{}", num_rational_text(&p.slack)), "-1/20");
}

fn num_rational_text(r: &num_rational::BigRational) -> String {
    laxkit::fuzzy::format_rational(r)
}

#[test]
fn fixpoint_reached_exactly() {
    let s = small();
    let chain = distance_chain(&s.l, &s.a, &s.b, 3).unwrap();
    assert_eq!(chain[1].get(0, 0), &q("3/20"));
    assert_eq!(chain[2].get(0, 0), &q("1/5"));
    assert_eq!(chain[2], chain[3]);

    let res = behavioural_distance(&s.l, &s.a, &s.b, &DistanceOptions::default()).unwrap();
    assert!(res.exact);
    assert!(res.iterations <= 3);
    assert_eq!(res.matrix, chain[2]);

    let all_one = Certificate {
        kind: s.cert.kind,
        relation: FuzzyRel::constant(s.a.carrier().clone(), s.b.carrier().clone(), Scalar::one()),
    };
    assert!(check_certificate(&s.l, &s.a, &s.b, &all_one).unwrap().ok);
    let gap =
        least_certificate_gap(&s.l, &s.a, &s.b, &all_one, &DistanceOptions::default()).unwrap();
    let expected = res
        .matrix
        .values()
        .iter()
        .map(|v| v.complement())
        .max()
        .unwrap();
    assert_eq!(gap, expected);

    let fix = Certificate {
        kind: s.cert.kind,
        relation: res.matrix.clone(),
    };
    assert_eq!(
        least_certificate_gap(&s.l, &s.a, &s.b, &fix, &DistanceOptions::default()).unwrap(),
        Scalar::zero()
    );
}

#[test]
fn synthesized_formula_separates_a1_from_b1() {
    let s = small();
    let ld = logical_distance(&s.l, &s.a, &s.b, 2).unwrap();
    assert_eq!(ld.matrix.get(0, 0), &q("1/5"));
    let phi = &ld.witnesses[0];
    assert_eq!(phi.rank(), 2);

    let reparsed = parse(&print(phi)).unwrap();
    assert_eq!(&reparsed, phi);
    let back = Formula::from_json(&phi.to_json()).unwrap();
    assert_eq!(&back, phi);

    let mut ev = Evaluator::with_lifting(&ld.union, &s.l);
    let gap = ev
        .eval(&reparsed, ld.left[0])
        .unwrap()
        .ominus(&ev.eval(&reparsed, ld.right[0]).unwrap());
    assert_eq!(gap, q("1/5"));
    let _: &Arc<Formula> = phi;
}

#[test]
fn weighted_ts_converges_geometrically() {
    let a = Coalgebra::from_json_str(&fixture("sim-distance/A.json")).unwrap();
    let b = Coalgebra::from_json_str(&fixture("sim-distance/B.json")).unwrap();
    let spec = LiftingSpec::from_json(
        &serde_json::from_str(&fixture("sim-distance/lifting.json")).unwrap(),
    )
    .unwrap();
    let l = Lifting::bind(spec, a.functor().clone()).unwrap();
    let chain = distance_chain(&l, &a, &b, 6).unwrap();
    // (s1, t0): d = 1/4 + d/2, so d_n = 1/2 - 2^{-n-1}.
    for (n, d) in chain.iter().enumerate() {
        let expected = Scalar::new(
            num_rational::BigRational::new(1.into(), 2.into())
                - num_rational::BigRational::new(1.into(), (1u64 << (n + 1)).into()),
        )
        .unwrap();
        assert_eq!(d.get(1, 0), &expected, "n = {n}");
        assert_eq!(d.get(1, 1), &Scalar::zero());
    }
}
