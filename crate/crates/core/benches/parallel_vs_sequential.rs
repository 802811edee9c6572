use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use polyquant::lie::{close_under_bracket, Closure};
use polyquant::par::Exec;
use polyquant::phasepoly::{ClassicalPoly, VariableSpace};
use polyquant::quantize::{affine_quantization, q1_scan, weyl_map, Sign};
use polyquant::weyl::{symmetrization_commutator_scan, SymmetricPowers, WeylElement, WeylSignature};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn q1_scans(c: &mut Criterion) {
    let mut group = c.benchmark_group("q1_scan");
    group.sample_size(10);
    let affine = affine_quantization(Sign::Plus);
    let weyl = weyl_map(&VariableSpace::canonical(2), &WeylSignature::quantum(2)).unwrap();
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("affine_deg6", name), &exec, |b, &e| {
            b.iter(|| q1_scan(&affine, 6, e).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("weyl_w4_deg2", name), &exec, |b, &e| {
            b.iter(|| q1_scan(&weyl, 2, e).unwrap())
        });
    }
    group.finish();
}

fn example_images() -> (Vec<WeylElement>, polyquant::lie::FinLieAlgebra) {
    let s = VariableSpace::canonical(2);
    let v = |i| ClassicalPoly::var(&s, i);
    let Closure::Closed(alg) = close_under_bracket(&[v(0), v(3), &(&v(0) * &v(3)) + &v(1), v(2)], 64).unwrap() else {
        panic!("closure did not terminate");
    };
    let sig = WeylSignature::quantum(2);
    let (z1, z2, w1, w2) = (WeylElement::z(&sig, 0), WeylElement::z(&sig, 1), WeylElement::w(&sig, 0), WeylElement::w(&sig, 1));
    (vec![WeylElement::identity(&sig), z1.clone(), w2.clone(), &(&z1 * &w2) + &z2, w1], alg)
}

fn symmetrization(c: &mut Criterion) {
    let (images, alg) = example_images();
    let mut group = c.benchmark_group("symmetrization");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("powers_deg5", name), &exec, |b, &e| {
            b.iter(|| SymmetricPowers::new(images.clone(), 5, e).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("commutator_scan_deg4", name), &exec, |b, &e| {
            b.iter(|| symmetrization_commutator_scan(&images, alg.structure_constants(), 4, e).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, q1_scans, symmetrization);
criterion_main!(benches);
