use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rodmech_core::dynamics::{step, PotentialModel, StepScheme};
use rodmech_core::models::{build_torus, TorusParams};
use rodmech_core::rotations::RodriguesVector;

fn rotation_algebra(c: &mut Criterion) {
    let a = RodriguesVector::new(0.3, -1.1, 0.7);
    let b = RodriguesVector::new(-0.2, 0.4, 0.9);
    c.bench_function("compose", |bench| {
        bench.iter(|| black_box(a).compose(black_box(&b)).unwrap())
    });
    c.bench_function("rotation_matrix", |bench| {
        bench.iter(|| black_box(a).rotation_matrix())
    });
}

fn torus_forces(c: &mut Criterion) {
    let (mut state, model) = build_torus(&TorusParams::default()).unwrap();
    // push into the wall so contact terms are live
    for body in &mut state.bodies {
        body.position.x -= 0.01;
    }
    c.bench_function("torus_forces_and_moments", |bench| {
        bench.iter(|| model.forces_and_moments(black_box(&state)).unwrap())
    });
}

fn torus_steps(c: &mut Criterion) {
    let (state, model) = build_torus(&TorusParams::default()).unwrap();
    let cached = model.forces_and_moments(&state).unwrap();
    for scheme in [StepScheme::Vti1, StepScheme::Vti2, StepScheme::Vti3] {
        c.bench_function(&format!("torus_step_{}", scheme.name()), |bench| {
            bench.iter(|| step(scheme, black_box(&state), &model, 1e-3, &cached).unwrap())
        });
    }
}

criterion_group!(benches, rotation_algebra, torus_forces, torus_steps);
criterion_main!(benches);
