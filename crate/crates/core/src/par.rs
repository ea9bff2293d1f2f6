//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper preserves index order in its output, so reductions that sum
//! the returned partials sequentially are independent of the thread count.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Parallel,
    Sequential,
}

static DEFAULT_EXEC: AtomicU8 = AtomicU8::new(0);

/// Process-wide default used by the numerical kernels.
pub fn default_exec() -> Exec {
    match DEFAULT_EXEC.load(Ordering::Relaxed) {
        1 => Exec::Sequential,
        _ => Exec::Parallel,
    }
}

pub fn set_default_exec(exec: Exec) {
    let v = match exec {
        Exec::Parallel => 0,
        Exec::Sequential => 1,
    };
    DEFAULT_EXEC.store(v, Ordering::Relaxed);
}

pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// Sizes the global pool; one thread also switches the kernels to the
/// sequential path. Only the first call can size the pool.
pub fn configure_threads(n: usize) -> Result<(), String> {
    if n == 0 {
        return Err("thread count must be positive".into());
    }
    if n == 1 {
        set_default_exec(Exec::Sequential);
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())?;
    Ok(())
}

/// `(0..n).map(f).collect()`, fanned out over the pool when allowed.
pub fn map_range<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Ordered map over a slice.
pub fn map_slice<S, T, F>(exec: Exec, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Runs `f(chunk_index, chunk)` over consecutive chunks of `data`.
pub fn for_each_chunk_mut<T, F>(exec: Exec, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if chunk == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = exec;
    for (i, c) in data.chunks_mut(chunk).enumerate() {
        f(i, c);
    }
}

/// Sum of per-tile partials in fixed order.
pub fn ordered_sum(parts: &[f64]) -> f64 {
    parts.iter().fold(0.0, |a, b| a + b)
}

/// Deterministic tiled reduction: `sum_{i<n} f(i)` with tiles of `tile` indices.
pub fn tiled_sum<F>(exec: Exec, n: usize, tile: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let tile = tile.max(1);
    let ntiles = n.div_ceil(tile);
    let parts = map_range(exec, ntiles, |t| {
        let lo = t * tile;
        let hi = (lo + tile).min(n);
        (lo..hi).fold(0.0, |a, i| a + f(i))
    });
    ordered_sum(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let a = tiled_sum(Exec::Parallel, 10_001, 97, f);
        let b = tiled_sum(Exec::Sequential, 10_001, 97, f);
        assert_eq!(a.to_bits(), b.to_bits());
        let v = map_range(Exec::Parallel, 50, |i| i * i);
        assert_eq!(v, (0..50).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn chunks_cover_everything() {
        let mut data = vec![0usize; 103];
        for_each_chunk_mut(Exec::Parallel, &mut data, 10, |ci, c| {
            for (j, x) in c.iter_mut().enumerate() {
                *x = ci * 10 + j;
            }
        });
        assert!(data.iter().enumerate().all(|(i, &x)| i == x));
    }
}
