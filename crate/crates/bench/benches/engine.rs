use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use orbindex::heat::{g_heat_trace, QuadratureSpec};
use orbindex::index::{kawasaki_index, sum_identity};
use orbindex::io::report::verify_report;
use orbindex::sector::{build_cutoff, SectionChoice};
use orbindex::Cyclotomic;
use orbindex_bench::fixture;

fn index_engine(c: &mut Criterion) {
    let e_z4 = fixture("e_z4.json");
    let sphere = fixture("s2_z3_o7.json");
    let p4 = fixture("p4.json");
    let smooth = fixture("p4_smooth.json");
    c.bench_function("kawasaki e_z4 exact", |b| b.iter(|| kawasaki_index::<Cyclotomic>(black_box(&e_z4)).unwrap()));
    c.bench_function("kawasaki s2_z3_o7 exact", |b| b.iter(|| kawasaki_index::<Cyclotomic>(black_box(&sphere)).unwrap()));
    c.bench_function("sum identity p4 exact", |b| {
        b.iter(|| sum_identity::<Cyclotomic>(black_box(&p4), &SectionChoice::Canonical).unwrap())
    });
    c.bench_function("sum identity p4 smooth float", |b| {
        b.iter(|| sum_identity::<Complex64>(black_box(&smooth), &SectionChoice::Canonical).unwrap())
    });
    c.bench_function("verify p4 exact", |b| b.iter(|| verify_report::<Cyclotomic>(black_box(&p4)).unwrap()));
}

fn heat_lab(c: &mut Criterion) {
    let p4 = fixture("p4.json");
    let quad = QuadratureSpec::default();
    let mut group = c.benchmark_group("heat p4");
    group.sample_size(10);
    for label in ["r2_edge", "r_origin", "t10"] {
        let class = p4.resolve(label).unwrap();
        group.bench_function(label, |b| b.iter(|| g_heat_trace(&p4, &class, black_box(0.1), &quad).unwrap()));
    }
    group.finish();
}

fn cutoff(c: &mut Criterion) {
    let smooth = fixture("p4_smooth.json");
    let cut = build_cutoff(&smooth).unwrap();
    let group = smooth.cryst().unwrap();
    c.bench_function("smooth partition sum", |b| b.iter(|| cut.partition_sum_f64(group, black_box([0.37, -1.21]))));
}

criterion_group!(benches, index_engine, heat_lab, cutoff);
criterion_main!(benches);
