//! Rayon dispatch against a single worker on the same build. Running with
//! `--no-default-features` measures the compiled-in sequential path instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as C64;
use std::hint::black_box;

use quartic_helmholtz::kernels::{quartic_green, ProblemParams};
use quartic_helmholtz::par;
use quartic_helmholtz::resolvent::kernel_space::kernel_space_extend;
use quartic_helmholtz::resolvent::{Geometry, QuarticResolvent};
use quartic_helmholtz::spectral::{Field, SpectralGrid};

fn label() -> &'static str {
    if cfg!(feature = "parallel") {
        "rayon"
    } else {
        "sequential_build"
    }
}

fn blob(grid: SpectralGrid) -> Field {
    Field::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|t| t * t).sum();
        C64::new((-r2).exp() * (1.0 + 0.3 * x[0]), 0.0)
    })
}

fn run_both<F: Fn() + Sync>(c: &mut Criterion, group: &str, work: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new(label(), "all_threads"), |b| b.iter(&work));
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    g.bench_function(BenchmarkId::new(label(), "one_thread"), |b| b.iter(|| single.install(&work)));
    g.finish();
}

fn kernel_table(c: &mut Criterion) {
    let params = ProblemParams::linear(-1.0, 0.0, 3).unwrap();
    run_both(c, "quartic_green_table", || {
        let v = par::map_range(100_000, |i| quartic_green(&params, 1e-3 + 1e-3 * i as f64).unwrap());
        black_box(v);
    });
}

fn resolvent_3d(c: &mut Criterion) {
    let params = ProblemParams::linear(-1.0, 0.0, 3).unwrap();
    let grid = SpectralGrid::new(3, 64, 12.0).unwrap();
    let res =
        QuarticResolvent::with_default_schedule(&params, &grid, Geometry::cube(&grid, 0.5, 3.0).unwrap()).unwrap();
    let f = blob(grid).real_part();
    run_both(c, "resolvent_apply_3d_m64", || {
        black_box(res.apply_real(&f));
    });
}

fn extension_2d(c: &mut Criterion) {
    let params = ProblemParams::linear(-1.0, 0.0, 2).unwrap();
    let f = blob(SpectralGrid::new(2, 64, 8.0).unwrap());
    run_both(c, "kernel_space_extend_2d_x4", || {
        black_box(kernel_space_extend(&params, &f, 4, true).unwrap());
    });
}

criterion_group!(benches, kernel_table, resolvent_3d, extension_2d);
criterion_main!(benches);
