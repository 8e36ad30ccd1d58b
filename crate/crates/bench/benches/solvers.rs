use std::hint::black_box;

use abdkit::model::{rels, NamedConstraint};
use abdkit::oracle::oracle_abduce;
use abdkit::reductions::{reduce_is10_eq_to_wsat, wsat_bruteforce};
use abdkit::solvers::{solve_2affine, solve_by_h_enumeration, solve_ess_positive, solve_m_setcover};
use abdkit::{AbductionInstance, ConstraintLanguage, Relation, Variant};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` variables, `2n` random constraints, a third of the variables as
/// hypotheses and up to three manifestations.
fn instance(seed: u64, pool: Vec<Relation>, n: usize) -> AbductionInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lang = ConstraintLanguage::from_relations(pool).unwrap();
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let cons = (0..2 * n)
        .map(|_| {
            let relation = rng.gen_range(0..lang.len());
            let args = (0..lang.get(relation).arity()).map(|_| names.choose(&mut rng).unwrap().clone()).collect();
            NamedConstraint { relation, args }
        })
        .collect();
    let h: Vec<String> = names.choose_multiple(&mut rng, n / 3).cloned().collect();
    let m: Vec<String> = names.choose_multiple(&mut rng, 3.min(n)).cloned().collect();
    AbductionInstance::from_named(lang, cons, h, m, Some(n / 6)).unwrap()
}

fn specialised(c: &mut Criterion) {
    let mut g = c.benchmark_group("specialised");
    for n in [12, 24, 48] {
        let pos = instance(1, vec![rels::or(2), rels::or(3), rels::t()], n);
        g.bench_with_input(BenchmarkId::new("ess_positive", n), &pos, |b, i| {
            b.iter(|| solve_ess_positive(black_box(i), Variant::AtMost))
        });
        let aff = instance(2, vec![rels::eq(), rels::neq(), rels::t()], n);
        g.bench_with_input(BenchmarkId::new("2affine", n), &aff, |b, i| {
            b.iter(|| solve_2affine(black_box(i), Variant::Exact))
        });
        let dual = instance(3, vec![rels::imp(), rels::or(2), rels::dual_horn3()], n);
        g.bench_with_input(BenchmarkId::new("M_setcover", n), &dual, |b, i| {
            b.iter(|| solve_m_setcover(black_box(i), Variant::AtMost))
        });
    }
    g.finish();
}

fn exhaustive(c: &mut Criterion) {
    let mut g = c.benchmark_group("exhaustive");
    g.sample_size(20);
    for n in [9, 12, 15] {
        let horn = instance(4, vec![rels::imp(), rels::horn3(), rels::nand(2)], n);
        g.bench_with_input(BenchmarkId::new("H_enumeration", n), &horn, |b, i| {
            b.iter(|| solve_by_h_enumeration(black_box(i), Variant::Exact))
        });
        g.bench_with_input(BenchmarkId::new("oracle", n), &horn, |b, i| {
            b.iter(|| oracle_abduce(black_box(i), Variant::Exact))
        });
        let is10 = instance(5, vec![rels::imp(), rels::nand(2), rels::t()], n);
        g.bench_with_input(BenchmarkId::new("is10_wsat", n), &is10, |b, i| {
            b.iter(|| wsat_bruteforce(&reduce_is10_eq_to_wsat(black_box(i)).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, specialised, exhaustive);
criterion_main!(benches);
