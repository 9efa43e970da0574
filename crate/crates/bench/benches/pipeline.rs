use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use unitsum_bench::{context, random_elements, random_words};
use unitsum_core::expansion::{certify_field, greedy_expand_with_retry, unit_sum_representation, DEFAULT_MAX_DEPTH};
use unitsum_core::geometry::verify_covering_exact;
use unitsum_core::rewriting::rewrite_to_signed;

fn critical_sets(c: &mut Criterion) {
    let mut g = c.benchmark_group("critical_set");
    g.sample_size(10);
    for id in ["q-sqrt-1-4zeta4", "q-sqrt-7-4zeta4", "x4-x+1"] {
        g.bench_with_input(BenchmarkId::from_parameter(id), id, |b, id| {
            b.iter(|| {
                let ctx = context(id);
                black_box(ctx.critical_set().unwrap().count())
            })
        });
    }
    g.finish();
}

fn certify(c: &mut Criterion) {
    let mut g = c.benchmark_group("certify_field");
    g.sample_size(10);
    for id in ["q-sqrt-1-2zeta4", "x4-x+1"] {
        let ctx = context(id);
        ctx.critical_set().unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(id), &ctx, |b, ctx| {
            b.iter(|| black_box(certify_field(ctx, DEFAULT_MAX_DEPTH).unwrap().max_depth))
        });
    }
    g.finish();
}

fn expansion(c: &mut Criterion) {
    let ctx = context("q-sqrt-1-2zeta4");
    ctx.critical_set().unwrap();
    let alphas = random_elements(&ctx, 32, 20, 1);
    c.bench_function("greedy_expand/32", |b| {
        b.iter(|| {
            for a in &alphas {
                black_box(greedy_expand_with_retry(&ctx, a).unwrap());
            }
        })
    });
    c.bench_function("unit_sum_representation/32", |b| {
        b.iter(|| {
            for a in &alphas {
                black_box(unit_sum_representation(&ctx, a, DEFAULT_MAX_DEPTH).unwrap());
            }
        })
    });
}

fn rewriting(c: &mut Criterion) {
    let mut g = c.benchmark_group("rewrite_to_signed");
    for bound in [3, 50] {
        let words = random_words(100, 4, bound, 2);
        g.bench_with_input(BenchmarkId::from_parameter(bound), &words, |b, words| {
            b.iter(|| {
                for w in words {
                    black_box(rewrite_to_signed(w).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn covering(c: &mut Criterion) {
    let ctx = context("q-sqrt-19-11zeta3");
    let eps = ctx.emb.embed_main(&ctx.base);
    c.bench_function("verify_covering_exact/q-sqrt-19-11zeta3", |b| {
        b.iter(|| black_box(verify_covering_exact(&eps, &ctx.alphabet.images_main, &ctx.region, ctx.w).status))
    });
}

criterion_group!(benches, critical_sets, certify, expansion, rewriting, covering);
criterion_main!(benches);
