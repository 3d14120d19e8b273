use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use laxkit::distance::{
    behavioural_distance, check_certificate, distance_chain, fixpoint_step, Certificate,
    CertificateKind, DistanceOptions,
};
use laxkit::lifting::{modalities_for, HausdorffVariant, PairMode};
use laxkit::logic::{moss_eval, parse, presentation_of, print, Evaluator, Formula};
use laxkit::random::{self, trial_rng, GenConfig, ModalSource};
use laxkit::systems::{element_from_json, element_to_json};
use laxkit::{Coalgebra, FunctorSpec, FuzzyRel, LabelSpace, Lifting, LiftingSpec, Scalar};

fn labelled() -> Arc<FunctorSpec> {
    let labels = LabelSpace::numeric(["0", "1/3", "2/3", "1"]).unwrap();
    Arc::new(FunctorSpec::pair(
        FunctorSpec::constant(labels),
        FunctorSpec::pfin(FunctorSpec::Id),
    ))
}

fn functors() -> Vec<Arc<FunctorSpec>> {
    vec![
        Arc::new(FunctorSpec::pfin(FunctorSpec::Id)),
        Arc::new(FunctorSpec::dfin(FunctorSpec::Id)),
        Arc::new(FunctorSpec::maybe(FunctorSpec::dfin(FunctorSpec::Id))),
        labelled(),
    ]
}

/// A lifting per entry of [`functors`].
fn liftings() -> Vec<Lifting> {
    let half = Scalar::parse("1/2").unwrap();
    let specs = [
        LiftingSpec::hausdorff(HausdorffVariant::Sym, LiftingSpec::Id),
        LiftingSpec::kantorovich(LiftingSpec::Id),
        LiftingSpec::maybe(LiftingSpec::wasserstein(LiftingSpec::Id)),
        LiftingSpec::pair(
            PairMode::WeightedSum(half.clone(), half),
            LiftingSpec::Const,
            LiftingSpec::hausdorff(HausdorffVariant::Sym, LiftingSpec::Id),
        )
        .unwrap(),
    ];
    specs
        .into_iter()
        .zip(functors())
        .map(|(s, f)| Lifting::bind(s, f).unwrap())
        .collect()
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (0i64..=12).prop_map(|k| Scalar::ratio(k, 12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncated_arithmetic_is_adjoint(x in scalar(), y in scalar(), z in scalar()) {
        prop_assert_eq!(x.ominus(&y) <= z, x <= y.oplus(&z));
        prop_assert_eq!(x.complement().complement(), x);
    }

    #[test]
    fn composition_is_associative_with_unit(seed in any::<u64>(), m in 1usize..4, n in 1usize..4, k in 1usize..4) {
        let cfg = GenConfig::default();
        let mut rng = trial_rng(seed, 0);
        let (a, b, c) = (random::carrier("a", m), random::carrier("b", n), random::carrier("c", k));
        let r = random::relation(&mut rng, a.clone(), b.clone(), &cfg);
        let s = random::relation(&mut rng, b.clone(), c.clone(), &cfg);
        let t = random::relation(&mut rng, c.clone(), a.clone(), &cfg);
        let left = r.compose(&s).unwrap().compose(&t).unwrap();
        let right = r.compose(&s.compose(&t).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(FuzzyRel::diagonal(a).compose(&r).unwrap(), r.clone());
        prop_assert_eq!(r.converse().converse(), r);
    }

    #[test]
    fn presentations_round_trip(seed in any::<u64>(), which in 0usize..4, len in 1usize..5) {
        let functor = functors()[which].clone();
        let mut rng = trial_rng(seed, 1);
        let t = random::element(&mut rng, &functor, len, &GenConfig::default());
        let p = presentation_of(&t);
        prop_assert_eq!(p.instantiate(&functor).unwrap(), t.clone());
        prop_assert!(p.shape.type_check(&functor, p.arity()).is_ok());

        let v = element_to_json(&functor, &t, &|x| serde_json::json!(x));
        let mut diags = Vec::new();
        let leaf = |v: &serde_json::Value| v.as_u64().map(|x| x as usize).ok_or_else(|| "leaf".to_string());
        let back = element_from_json(&functor, &v, &leaf, "$", &mut diags);
        prop_assert_eq!(back, Some(t));
        prop_assert!(diags.is_empty());
    }

    #[test]
    fn systems_round_trip_through_json(seed in any::<u64>(), which in 0usize..4, len in 1usize..6) {
        let mut rng = trial_rng(seed, 2);
        let sys = random::system(&mut rng, functors()[which].clone(), "s", len, &GenConfig::default());
        let back = Coalgebra::from_json_str(&sys.to_json().to_string()).unwrap();
        prop_assert_eq!(back, sys);
    }

    #[test]
    fn chain_is_monotone_and_fixpoints_are_fixed(seed in any::<u64>(), which in 0usize..4) {
        let l = &liftings()[which];
        let mut rng = trial_rng(seed, 3);
        let cfg = GenConfig::default();
        let (m, n) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let a = random::system(&mut rng, l.functor().clone(), "a", m, &cfg);
        let b = random::system(&mut rng, l.functor().clone(), "b", n, &cfg);
        let chain = distance_chain(l, &a, &b, 6).unwrap();
        for w in chain.windows(2) {
            prop_assert!(w[0].is_below(&w[1]).unwrap());
        }
        let res = behavioural_distance(l, &a, &b, &DistanceOptions { max_iter: 60, ..Default::default() }).unwrap();
        if res.exact {
            prop_assert_eq!(fixpoint_step(l, &a, &b, &res.matrix).unwrap(), res.matrix.clone());
            let cert = Certificate { kind: CertificateKind::Simulation, relation: res.matrix.clone() };
            prop_assert!(check_certificate(l, &a, &b, &cert).unwrap().ok);
        }
    }

    #[test]
    fn single_system_distances(seed in any::<u64>(), which in 0usize..4) {
        let l = &liftings()[which];
        let mut rng = trial_rng(seed, 4);
        let len = rng.gen_range(1..=4);
        let sys = random::system(&mut rng, l.functor().clone(), "s", len, &GenConfig::default());
        let diag = Certificate {
            kind: CertificateKind::Bisimulation,
            relation: FuzzyRel::diagonal(sys.carrier().clone()),
        };
        prop_assert!(check_certificate(l, &sys, &sys, &diag).unwrap().ok);
        let res = behavioural_distance(l, &sys, &sys, &DistanceOptions { max_iter: 60, ..Default::default() }).unwrap();
        prop_assert!(res.matrix.is_hemimetric().unwrap());
        // Every lifting here preserves converse.
        prop_assert!(res.matrix.is_pseudometric().unwrap());
    }

    #[test]
    fn simulations_compose(seed in any::<u64>()) {
        let l = &liftings()[0];
        let mut rng = trial_rng(seed, 5);
        let cfg = GenConfig::default();
        let sys: Vec<Coalgebra> = ["a", "b", "c"]
            .iter()
            .map(|p| { let k = rng.gen_range(1..=4); random::system(&mut rng, l.functor().clone(), p, k, &cfg) })
            .collect();
        let opts = DistanceOptions::default();
        let ab = behavioural_distance(l, &sys[0], &sys[1], &opts).unwrap().matrix;
        let bc = behavioural_distance(l, &sys[1], &sys[2], &opts).unwrap().matrix;
        let ac = behavioural_distance(l, &sys[0], &sys[2], &opts).unwrap().matrix;
        let composed = ab.compose(&bc).unwrap();
        let cert = Certificate { kind: CertificateKind::Simulation, relation: composed.clone() };
        prop_assert!(check_certificate(l, &sys[0], &sys[2], &cert).unwrap().ok);
        prop_assert!(ac.is_below(&composed).unwrap());
    }

    #[test]
    fn moss_modalities_are_monotone_and_nonexpansive(seed in any::<u64>(), which in 0usize..4) {
        let l = &liftings()[which];
        let mut rng = trial_rng(seed, 6);
        let cfg = GenConfig::default();
        let (x, k) = (rng.gen_range(1..=4), rng.gen_range(1..=3));
        let shape = random::element(&mut rng, l.functor(), k, &cfg);
        let t = random::element(&mut rng, l.functor(), x, &cfg);
        let f: Vec<Vec<Scalar>> = (0..k).map(|_| (0..x).map(|_| random::scalar(&mut rng, &cfg)).collect()).collect();
        let bump = random::scalar(&mut rng, &cfg);
        let up: Vec<Vec<Scalar>> = f.iter().map(|col| col.iter().map(|v| v.oplus(&bump)).collect()).collect();
        let fa: Vec<&[Scalar]> = f.iter().map(Vec::as_slice).collect();
        let ua: Vec<&[Scalar]> = up.iter().map(Vec::as_slice).collect();
        let lo = moss_eval(l, &shape, &fa, &t).unwrap();
        let hi = moss_eval(l, &shape, &ua, &t).unwrap();
        prop_assert!(lo <= hi);
        prop_assert!(hi.ominus(&lo) <= bump);
    }

    #[test]
    fn formulas_print_and_parse_back(seed in any::<u64>(), moss in any::<bool>()) {
        let cfg = GenConfig::default();
        let mut rng = trial_rng(seed, 7);
        let functor = labelled();
        let named: Vec<(String, usize)> = modalities_for(&functor).iter().map(|m| (m.name().to_string(), m.arity())).collect();
        let source = if moss { ModalSource::Moss(&functor) } else { ModalSource::Named(&named) };
        let phi = random::formula(&mut rng, 4, &source, !moss, &cfg);
        let text = print(&phi);
        prop_assert_eq!(&parse(&text).unwrap(), &phi);
        prop_assert_eq!(print(&parse(&text).unwrap()), text);
        prop_assert_eq!(&Formula::from_json(&phi.to_json()).unwrap(), &phi);
    }

    #[test]
    fn negation_is_complement(seed in any::<u64>()) {
        let cfg = GenConfig::default();
        let mut rng = trial_rng(seed, 8);
        let functor = labelled();
        let named: Vec<(String, usize)> = modalities_for(&functor).iter().map(|m| (m.name().to_string(), m.arity())).collect();
        let len = rng.gen_range(1..=4);
        let sys = random::system(&mut rng, functor.clone(), "s", len, &cfg);
        let phi = random::formula(&mut rng, 4, &ModalSource::Named(&named), true, &cfg);
        let mut ev = Evaluator::new(&sys);
        let t = ev.table(&phi).unwrap();
        let n = ev.table(&Formula::neg(phi)).unwrap();
        for (x, y) in t.iter().zip(n.iter()) {
            prop_assert_eq!(&x.complement(), y);
        }
    }
}
