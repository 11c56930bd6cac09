use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use floqsim::decoders::max_weight_matching;
use floqsim::{compile, DecoderKind, Family};
use floqsim_bench::Fixture;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SHOTS: usize = 256;

fn decode(c: &mut Criterion) {
    for family in [Family::Hcf, Family::Hf] {
        let mut g = c.benchmark_group(format!("decode/{family}"));
        g.throughput(Throughput::Elements(SHOTS as u64));
        for ell in [1, 2, 3] {
            // 48 steps, near the comparison point
            let fx = Fixture::memory(family, ell, 48 / family.period(), 3e-3, SHOTS);
            for kind in [DecoderKind::Mwpm, DecoderKind::BpOsd] {
                let prepared = fx.decoder(kind);
                g.bench_with_input(BenchmarkId::new(kind.name(), fx.n), &fx.syndromes, |b, ss| {
                    let mut w = prepared.worker();
                    b.iter(|| {
                        for s in ss {
                            let _ = black_box(w.decode(s));
                        }
                    })
                });
            }
        }
        g.finish();
    }
}

fn compile_dem(c: &mut Criterion) {
    let mut g = c.benchmark_group("compile");
    g.sample_size(10);
    for family in [Family::Hcf, Family::Hf] {
        let fx = Fixture::memory(family, 2, 48 / family.period(), 1e-3, 0);
        g.bench_function(BenchmarkId::new(family.name(), fx.n), |b| b.iter(|| compile(black_box(&fx.circuit))));
    }
    g.finish();
}

fn blossom(c: &mut Criterion) {
    let mut g = c.benchmark_group("blossom");
    for n in [16, 64, 128] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let edges: Vec<(usize, usize, i64)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, rng.gen_range(1..1_000_000)))
            .collect();
        g.bench_with_input(BenchmarkId::new("complete", n), &edges, |b, es| {
            b.iter_batched(|| es.clone(), |es| max_weight_matching(n, &es, true), BatchSize::SmallInput)
        });
    }
    g.finish();
}

criterion_group!(benches, decode, compile_dem, blossom);
criterion_main!(benches);
