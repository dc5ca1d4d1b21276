use std::hint::black_box;

use blf_bench::fixtures;
use blf_core::catalog::{family_x, family_y};
use blf_core::chartforms::{verify_corner_sum_model, verify_focus_focus_model};
use blf_core::diagram::canonical_form;
use blf_core::explore::random_diagram;
use blf_core::homology::{dehn_twist, Cycle, MappingClass};
use blf_core::io::{parse_diagram, serialize_diagram};
use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn monodromy(c: &mut Criterion) {
    c.bench_function("dehn_twist_word_64", |b| {
        b.iter(|| {
            (1..=64).fold(MappingClass::IDENTITY, |acc, i| {
                let t = dehn_twist(black_box(Cycle::new(i % 5 + 1, 1))).unwrap();
                if i % 2 == 0 {
                    acc * t
                } else {
                    acc * t.inverse()
                }
            })
        })
    });
}

fn families(c: &mut Criterion) {
    c.bench_function("family_x_6_7", |b| {
        b.iter(|| family_x(black_box(6), 7).unwrap())
    });
    c.bench_function("family_y_6_6_7", |b| {
        b.iter(|| family_y(black_box(6), 6, 7).unwrap())
    });
}

fn surgery(c: &mut Criterion) {
    c.bench_function("random_diagram_12_steps", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        b.iter(|| random_diagram(&mut rng, 12))
    });
    let ds = fixtures();
    c.bench_function("canonical_form", |b| {
        b.iter(|| ds.iter().map(canonical_form).count())
    });
    c.bench_function("serialize_parse", |b| {
        b.iter(|| {
            for d in &ds {
                let bytes = serialize_diagram(d);
                black_box(parse_diagram(&bytes).unwrap());
            }
        })
    });
}

fn charts(c: &mut Criterion) {
    c.bench_function("verify_corner_sum_model_1e4", |b| {
        b.iter(|| verify_corner_sum_model(10_000, 7))
    });
    c.bench_function("verify_focus_focus_model_1e4", |b| {
        b.iter(|| verify_focus_focus_model(10_000, 7))
    });
}

criterion_group!(benches, monodromy, families, surgery, charts);
criterion_main!(benches);
