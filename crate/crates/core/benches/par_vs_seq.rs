//! Rayon vs sequential on the two hot loops: block operator application and
//! tiled reductions. Without the `parallel` feature both arms run sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dirac_moire::fourier::{assemble, FourierGrid};
use dirac_moire::par::{tiled_sum, Exec};
use dirac_moire::model::DiracJunction;
use faer::Mat;
use num_complex::Complex64 as C64;
use std::hint::black_box;

const MODES: [(Exec, &str); 2] = [(Exec::Parallel, "parallel"), (Exec::Sequential, "sequential")];

fn apply_block(c: &mut Criterion) {
    faer::set_global_parallelism(faer::Par::Seq);
    let dj = DiracJunction::default();
    let mut g = c.benchmark_group("apply_block");
    g.sample_size(10);
    for n in [8usize, 16] {
        let grid = FourierGrid::new(&[dj.lx, dj.ly], &[n, n]).unwrap();
        let op = assemble(&dj.operator(), &grid).unwrap();
        let x = Mat::from_fn(op.dim(), 16, |i, j| C64::new(((i * 7 + j) as f64).sin(), ((i + 3 * j) as f64).cos()));
        for (exec, name) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &x, |b, x| b.iter(|| black_box(op.apply_block(x, exec))));
        }
    }
    g.finish();
}

fn reduction(c: &mut Criterion) {
    let mut g = c.benchmark_group("tiled_sum");
    let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
    for (exec, name) in MODES {
        g.bench_function(name, |b| b.iter(|| black_box(tiled_sum(exec, 1 << 20, 4096, f))));
    }
    g.finish();
}

criterion_group!(benches, apply_block, reduction);
criterion_main!(benches);
