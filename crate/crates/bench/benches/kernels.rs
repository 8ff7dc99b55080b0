use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qutritlab::control::table1_tomography_set;
use qutritlab::device::{dressed_cavity_pull, DeviceParams};
use qutritlab::qcore::random::{random_density, random_hermitian};
use qutritlab::qcore::{eig_hermitian, DensityMatrix};
use qutritlab::tomography::{build_design, mle_state, Measurement, Shots};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn eig_36(c: &mut Criterion) {
    let m = random_hermitian(36, &mut ChaCha8Rng::seed_from_u64(1));
    c.bench_function("eig_hermitian 36x36", |b| b.iter(|| eig_hermitian(black_box(&m)).unwrap()));
}

fn mle(c: &mut Criterion) {
    let design = build_design(&table1_tomography_set(), Measurement::degenerate_ground()).unwrap();
    let rho = DensityMatrix::new(random_density(3, &mut ChaCha8Rng::seed_from_u64(2))).unwrap();
    let shots = Shots::Exact { values: design.predict(rho.matrix()) };
    c.bench_function("mle_state exact data", |b| b.iter(|| mle_state(black_box(&design), black_box(&shots)).unwrap()));
}

fn pulls(c: &mut Criterion) {
    let device = DeviceParams::duffing(7182.0, 20.0, 6877.2, -310.0, 1.71);
    c.bench_function("dressed_cavity_pull", |b| b.iter(|| dressed_cavity_pull(black_box(&device)).unwrap()));
}

criterion_group!(kernels, eig_36, mle, pulls);
criterion_main!(kernels);
