//! Data-parallel helpers. With the `parallel` feature these dispatch to rayon;
//! without it they run the same closures sequentially. Reductions always use
//! fixed-size blocks summed in order, so results do not depend on the thread
//! count or on the feature.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Block length for deterministic reductions.
pub const REDUCE_BLOCK: usize = 4096;

pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

pub fn for_each_zip_mut<T, U, F>(a: &mut [T], b: &[U], f: F)
where
    T: Send,
    U: Sync,
    F: Fn(&mut T, &U) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| f(x, y));
    #[cfg(not(feature = "parallel"))]
    a.iter_mut().zip(b.iter()).for_each(|(x, y)| f(x, y));
}

pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Σ_{i<n} f(i), summed per block then across blocks in index order.
pub fn sum_range<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let blocks = n.div_ceil(REDUCE_BLOCK);
    let partial = map_range(blocks, |b| {
        let lo = b * REDUCE_BLOCK;
        let hi = (lo + REDUCE_BLOCK).min(n);
        let mut s = 0.0;
        for i in lo..hi {
            s += f(i);
        }
        s
    });
    partial.iter().sum()
}

/// max_{i<n} f(i) (0 for n = 0).
pub fn max_range<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let blocks = n.div_ceil(REDUCE_BLOCK);
    let partial = map_range(blocks, |b| {
        let lo = b * REDUCE_BLOCK;
        let hi = (lo + REDUCE_BLOCK).min(n);
        (lo..hi).map(&f).fold(0.0f64, f64::max)
    });
    partial.into_iter().fold(0.0, f64::max)
}

/// Whether the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocked_sum_is_order_fixed() {
        let n = 3 * REDUCE_BLOCK + 17;
        let s = sum_range(n, |i| 1.0 / (1.0 + i as f64));
        let mut seq = 0.0;
        for b in 0..n.div_ceil(REDUCE_BLOCK) {
            let mut p = 0.0;
            for i in b * REDUCE_BLOCK..((b + 1) * REDUCE_BLOCK).min(n) {
                p += 1.0 / (1.0 + i as f64);
            }
            seq += p;
        }
        assert_eq!(s.to_bits(), seq.to_bits());
    }

    #[test]
    fn chunks_cover_everything() {
        let mut v = vec![0usize; 100];
        for_each_chunk_mut(&mut v, 7, |i, c| c.iter_mut().for_each(|x| *x = i));
        assert_eq!(v[0], 0);
        assert_eq!(v[99], 14);
        assert_eq!(max_range(10, |i| i as f64), 9.0);
    }
}
