use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fuzzy_kripke::algebra::{Algebra, TruthValue};
use fuzzy_kripke::bisim::{greatest_pre, SimType};
use fuzzy_kripke::fuzzrel::{FuzzyMat, FuzzyVec};
use fuzzy_kripke::hm::{hm_check, HmOptions};
use fuzzy_kripke::model::KripkeModel;
use fuzzy_kripke::par::Exec;
use fuzzy_kripke::syntax::Fragment;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn model(r: &mut ChaCha8Rng, n: usize, prefix: &str) -> KripkeModel {
    let values: Vec<TruthValue> = (0..=10).map(|i| TruthValue::ratio(i, 10).unwrap()).collect();
    let mut pick = || values.choose(r).unwrap().clone();
    let relations = BTreeMap::from([(1, FuzzyMat::from_fn(n, n, |_, _| pick())), (2, FuzzyMat::from_fn(n, n, |_, _| pick()))]);
    let valuation = BTreeMap::from([("p".to_string(), (0..n).map(|_| pick()).collect::<FuzzyVec>())]);
    let worlds = (0..n).map(|i| format!("{prefix}{i}")).collect();
    KripkeModel::new(Algebra::Godel, worlds, vec![1, 2], relations, valuation).unwrap()
}

fn load(name: &str) -> KripkeModel {
    KripkeModel::load(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn fixpoint(c: &mut Criterion) {
    let mut g = c.benchmark_group("greatest_pre");
    g.sample_size(10);
    let mut r = ChaCha8Rng::seed_from_u64(1);
    for n in [8, 24] {
        let (m, m2) = (model(&mut r, n, "a"), model(&mut r, n, "b"));
        for (label, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(label, n), &n, |b, _| {
                b.iter(|| greatest_pre(black_box(&m), black_box(&m2), SimType::Rb, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn hennessy_milner(c: &mut Criterion) {
    let mut g = c.benchmark_group("hm_check");
    g.sample_size(10);
    let (m, m2) = (load("ex71_m.json"), load("ex71_m2.json"));
    for (label, exec) in MODES {
        let options = HmOptions { exec, ..HmOptions::default() };
        g.bench_function(BenchmarkId::new(label, "ex71-full"), |b| {
            b.iter(|| hm_check(black_box(&m), black_box(&m2), Fragment::Full, &options).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, fixpoint, hennessy_milner);
criterion_main!(benches);
