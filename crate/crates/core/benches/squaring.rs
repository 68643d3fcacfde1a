use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lucasian::lucas::s_iterate_with;
use lucasian::modulus::{GenericModulus, Reducer, SpecialFormModulus};
use lucasian::Sign;
use num_bigint::BigUint;

fn squaring(c: &mut Criterion) {
    let mut group = c.benchmark_group("square-minus-two");
    group.sample_size(20);
    for m in [2_500u64, 5_000, 10_000] {
        let special = SpecialFormModulus::new(3, m, Sign::Minus);
        let generic = GenericModulus::new(special.modulus().clone());
        let seed = BigUint::from(18u32);
        group.bench_with_input(BenchmarkId::new("special-form", m), &m, |b, _| {
            b.iter(|| s_iterate_with(&seed, 100, &special).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("long-division", m), &m, |b, _| {
            b.iter(|| s_iterate_with(&seed, 100, &generic).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, squaring);
criterion_main!(benches);
