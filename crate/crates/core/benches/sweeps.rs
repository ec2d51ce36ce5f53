use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cantor_lab::block_map::BlockAlphabet;
use cantor_lab::dimension::box_count_graph;
use cantor_lab::rational::ratio;
use cantor_lab::salem::WeightMatrix;
use cantor_lab::{CantorDigits, Strategy};

const STRATEGIES: [(&str, Strategy); 2] = [
    ("sequential", Strategy::Sequential),
    ("parallel", Strategy::Parallel),
];

fn box_counting(c: &mut Criterion) {
    let a = BlockAlphabet::new(5, 0).unwrap();
    let mut group = c.benchmark_group("box_count_graph");
    group.sample_size(10);
    for m in [6, 8] {
        for (name, s) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, m), &m, |b, &m| {
                b.iter(|| box_count_graph(&a, m, u64::MAX, s).unwrap())
            });
        }
    }
    group.finish();
}

fn monotonicity_probe(c: &mut Criterion) {
    let a = BlockAlphabet::new(7, 3).unwrap();
    let mut group = c.benchmark_group("monotonicity_probe");
    for (name, s) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| a.monotonicity_probe(5000, 1, s)));
    }
    group.finish();
}

fn oscillation_probe(c: &mut Criterion) {
    let m = WeightMatrix::constant(vec![ratio(3, 5), ratio(-1, 5), ratio(3, 5)]).unwrap();
    let point = CantorDigits::zero_tail(m.schedule().clone(), vec![1; 40]).unwrap();
    let mut group = c.benchmark_group("oscillation_probe");
    for (name, s) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| m.oscillation_probe(&point, 40, s).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, box_counting, monotonicity_probe, oscillation_probe);
criterion_main!(benches);
