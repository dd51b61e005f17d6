use criterion::{black_box, criterion_group, criterion_main, Criterion};
use roadfield::{geometry, simulate, value, EffectiveRoadHamiltonian, ModelParams, RoadLagrangian};

fn bench_hamiltonians(c: &mut Criterion) {
    let p = ModelParams::default();
    let ham = EffectiveRoadHamiltonian::new(&p);
    c.bench_function("effective_road_hamiltonian", |b| {
        b.iter(|| black_box(ham.value(black_box(1.7))))
    });
    let lagr = RoadLagrangian::new(&p);
    c.bench_function("road_lagrangian", |b| b.iter(|| black_box(lagr.value(black_box(3.5)))));
}

fn bench_value(c: &mut Criterion) {
    let p = ModelParams::default();
    c.bench_function("lax_oleinik_solve", |b| {
        b.iter(|| value::solve(1.0, black_box(2.0), black_box(1.0), &p).unwrap().value)
    });
}

fn bench_geometry(c: &mut Criterion) {
    let p = ModelParams::default();
    c.bench_function("road_speed", |b| b.iter(|| geometry::road_speed(&p).unwrap()));
    c.bench_function("directional_speed", |b| {
        b.iter(|| geometry::directional_speed(black_box(1.0), &p).unwrap())
    });
}

fn bench_simulator(c: &mut Criterion) {
    let p = ModelParams::default();
    let mut st = simulate::init_state(&p, 15.0, 15.0, 0.25, 1.0).unwrap();
    c.bench_function("simulator_step_121x61", |b| b.iter(|| st.step().unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_hamiltonians, bench_value, bench_geometry, bench_simulator
}
criterion_main!(benches);
