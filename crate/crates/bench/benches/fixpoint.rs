use std::hint::black_box;
use std::path::Path;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;

use laxkit::distance::{behavioural_distance, DistanceOptions};
use laxkit::lifting::HausdorffVariant;
use laxkit::random::{self, trial_rng, GenConfig};
use laxkit::{Coalgebra, FunctorSpec, LabelSpace, Lifting, LiftingSpec, Scalar};

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/small-bisim")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn small_example(c: &mut Criterion) {
    let a = Coalgebra::from_json_str(&fixture("A.json")).unwrap();
    let b = Coalgebra::from_json_str(&fixture("B.json")).unwrap();
    let spec =
        LiftingSpec::from_json(&serde_json::from_str(&fixture("lifting.json")).unwrap()).unwrap();
    let l = Lifting::bind(spec, a.functor().clone()).unwrap();
    let opts = DistanceOptions::default();
    c.bench_function("fixpoint/small-bisim", |bench| {
        bench.iter(|| black_box(behavioural_distance(&l, &a, &b, &opts).unwrap()))
    });
}

fn random_systems(c: &mut Criterion) {
    let labels = LabelSpace::numeric(["0", "1/3", "2/3", "1"]).unwrap();
    let functor = Arc::new(FunctorSpec::pair(
        FunctorSpec::constant(labels),
        FunctorSpec::pfin(FunctorSpec::Id),
    ));
    let half = Scalar::parse("1/2").unwrap();
    let spec = LiftingSpec::pair(
        laxkit::lifting::PairMode::WeightedSum(half.clone(), half),
        LiftingSpec::Const,
        LiftingSpec::hausdorff(HausdorffVariant::Sym, LiftingSpec::Id),
    )
    .unwrap();
    let l = Lifting::bind(spec, functor.clone()).unwrap();
    let cfg = GenConfig::default();
    let opts = DistanceOptions {
        max_iter: 40,
        ..DistanceOptions::default()
    };

    let mut group = c.benchmark_group("fixpoint/random");
    group.sample_size(10);
    for states in [4usize, 8, 16] {
        let mut rng = trial_rng(11, states as u64);
        let a = random::system(&mut rng, functor.clone(), "a", states, &cfg);
        let m = rng.gen_range(states / 2..=states);
        let b = random::system(&mut rng, functor.clone(), "b", m, &cfg);
        group.bench_with_input(
            BenchmarkId::from_parameter(states),
            &(a, b),
            |bench, (a, b)| {
                bench.iter(|| black_box(behavioural_distance(&l, a, b, &opts).unwrap()))
            },
        );
    }
    group.finish();
}

criterion_group!(benches, small_example, random_systems);
criterion_main!(benches);
