//! Pooled against single-thread execution of the core kernels. Build with
//! `--no-default-features` to time the rayon-free code path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mhdb::dynamics::{rhs, Params};
use mhdb::experiments::{make_initial_condition, InitialCondition, Preset};
use mhdb::timestepper::Stepper;

fn thread_counts() -> Vec<usize> {
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    if all > 1 {
        vec![1, all]
    } else {
        vec![1]
    }
}

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("kernels/{}", mhdb::execution_mode()));
    group.sample_size(10);
    for n in [32, 64] {
        let mut p = Params::new(n);
        p.nu = 1e-3;
        p.eta = 1e-3;
        p.g = 1.0;
        let d = p.domain().unwrap();
        let spec = InitialCondition::new(Preset::RandomSobolev, 1.0).with_theta(1.0);
        let s = make_initial_condition(&d, &spec, 1).unwrap();
        let stepper = Stepper::new(&p).unwrap();
        for threads in thread_counts() {
            group.bench_with_input(BenchmarkId::new(format!("inverse_transform/n{n}"), threads), &threads, |bch, &t| {
                mhdb::with_threads(Some(t), || {
                    bch.iter(|| d.inverse_transform(&s.theta).unwrap());
                    Ok(())
                })
                .unwrap()
            });
            group.bench_with_input(BenchmarkId::new(format!("rhs/n{n}"), threads), &threads, |bch, &t| {
                mhdb::with_threads(Some(t), || {
                    bch.iter(|| rhs(&d, &s, &p).unwrap());
                    Ok(())
                })
                .unwrap()
            });
            group.bench_with_input(BenchmarkId::new(format!("step/n{n}"), threads), &threads, |bch, &t| {
                mhdb::with_threads(Some(t), || {
                    bch.iter(|| stepper.step(&s).unwrap());
                    Ok(())
                })
                .unwrap()
            });
        }
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
