use criterion::{black_box, criterion_group, criterion_main, Criterion};

use casimir_bench::{settings, si_si, si_sio2};
use casimir_core::asymptotics::c4_dissimilar;
use casimir_core::lifshitz::{free_energy, pressure, zero_temperature_energy};
use casimir_core::specfun::polylog;

fn special_functions(c: &mut Criterion) {
    c.bench_function("polylog3_0.9", |b| b.iter(|| polylog(3, black_box(0.9))));
    c.bench_function("c4_dissimilar", |b| b.iter(|| c4_dissimilar(black_box(11.67), black_box(3.84))));
}

fn lifshitz(c: &mut Criterion) {
    let ns = settings();
    let mut g = c.benchmark_group("lifshitz");
    g.sample_size(10);
    let room = si_si(1e-6, 300.0);
    g.bench_function("free_energy_si_si_1um_300K", |b| b.iter(|| free_energy(black_box(&room), &ns)));
    let cold = si_sio2(400e-9, 10.0);
    g.bench_function("free_energy_si_sio2_400nm_10K", |b| b.iter(|| free_energy(black_box(&cold), &ns)));
    g.bench_function("pressure_si_sio2_400nm_10K", |b| b.iter(|| pressure(black_box(&cold), &ns)));
    g.bench_function("zero_temperature_energy_si_sio2", |b| {
        b.iter(|| zero_temperature_energy(black_box(&cold), &ns))
    });
    g.finish();
}

criterion_group!(benches, special_functions, lifshitz);
criterion_main!(benches);
