//! Sorted-run merging with deduplication, plus the dense integer path used
//! by additive sumsets.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Merges two strictly increasing slices into a strictly increasing vector.
pub fn merge_dedup<T: Ord + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Pairwise tree merge of sorted, deduplicated runs.
pub fn merge_runs<T: Ord + Clone + Send + Sync>(mut runs: Vec<Vec<T>>, cap: usize) -> Result<Vec<T>> {
    if runs.is_empty() {
        return Ok(Vec::new());
    }
    while runs.len() > 1 {
        let next: Vec<Vec<T>> = runs
            .par_chunks(2)
            .map(|pair| match pair {
                [a, b] => merge_dedup(a, b),
                [a] => a.clone(),
                _ => unreachable!(),
            })
            .collect();
        if next.iter().any(|r| r.len() > cap) {
            return Err(Error::CapExceeded { cap });
        }
        runs = next;
    }
    Ok(runs.pop().unwrap_or_default())
}

/// All `x op y`, where `op` is monotone in `y` for each fixed `x`, so each
/// `x` yields a sorted run. Runs are merged blockwise to bound memory.
pub fn combine_runs<T, F>(xs: &[T], ys: &[T], cap: usize, op: F) -> Result<Vec<T>>
where
    T: Ord + Clone + Send + Sync,
    F: Fn(&T, &T) -> T + Sync,
{
    const BLOCK: usize = 64;
    let blocks: Vec<Vec<T>> = xs
        .par_chunks(BLOCK)
        .map(|chunk| {
            let runs: Vec<Vec<T>> = chunk
                .iter()
                .map(|x| {
                    let mut run: Vec<T> = ys.iter().map(|y| op(x, y)).collect();
                    run.dedup();
                    run
                })
                .collect();
            merge_runs(runs, cap)
        })
        .collect::<Result<_>>()?;
    merge_runs(blocks, cap)
}

/// Largest value range handled with a bitmap (128 MiB of bits).
pub const DENSE_RANGE_LIMIT: u64 = 1 << 30;

/// Sumset of two sorted `i64` slices. Callers guarantee `|x| + |y|` cannot
/// overflow.
pub fn sumset_i64(xs: &[i64], ys: &[i64], cap: usize) -> Result<Vec<i64>> {
    if xs.is_empty() || ys.is_empty() {
        return Ok(Vec::new());
    }
    let lo = xs[0] + ys[0];
    let hi = xs[xs.len() - 1] + ys[ys.len() - 1];
    let range = (hi - lo) as u64 + 1;
    if range <= DENSE_RANGE_LIMIT {
        let words = dense_marks(xs, ys, lo, range);
        let count: u64 = words.iter().map(|w| w.load(Ordering::Relaxed).count_ones() as u64).sum();
        if count as usize > cap {
            return Err(Error::CapExceeded { cap });
        }
        let mut out = Vec::with_capacity(count as usize);
        for (wi, w) in words.iter().enumerate() {
            let mut bits = w.load(Ordering::Relaxed);
            while bits != 0 {
                let b = bits.trailing_zeros() as i64;
                out.push(lo + ((wi as i64) << 6) + b);
                bits &= bits - 1;
            }
        }
        Ok(out)
    } else {
        combine_runs(xs, ys, cap, |x, y| x + y)
    }
}

/// Number of distinct `op(x, y)`, where `op` is increasing in `x` for each
/// fixed `y`. A k-way merge over one run per `y`; memory is `O(|ys|)`.
pub fn count_combine<T, F>(xs: &[T], ys: &[T], op: F) -> usize
where
    T: Ord,
    F: Fn(&T, &T) -> T,
{
    if xs.is_empty() || ys.is_empty() {
        return 0;
    }
    let mut heap: BinaryHeap<Reverse<(T, usize, usize)>> =
        ys.iter().enumerate().map(|(r, y)| Reverse((op(&xs[0], y), r, 0))).collect();
    let mut count = 0;
    let mut last: Option<T> = None;
    while let Some(Reverse((v, r, i))) = heap.pop() {
        if i + 1 < xs.len() {
            heap.push(Reverse((op(&xs[i + 1], &ys[r]), r, i + 1)));
        }
        if last.as_ref().is_none_or(|l| l.cmp(&v) != std::cmp::Ordering::Equal) {
            count += 1;
            last = Some(v);
        }
    }
    count
}

/// `|xs + ys|` without materializing the sumset.
pub fn count_sumset_i64(xs: &[i64], ys: &[i64]) -> usize {
    if xs.is_empty() || ys.is_empty() {
        return 0;
    }
    let lo = xs[0] + ys[0];
    let hi = xs[xs.len() - 1] + ys[ys.len() - 1];
    if ((hi - lo) as u64) < DENSE_RANGE_LIMIT {
        let words = dense_marks(xs, ys, lo, (hi - lo) as u64 + 1);
        words.iter().map(|w| w.load(Ordering::Relaxed).count_ones() as usize).sum()
    } else {
        count_combine(xs, ys, |x, y| x + y)
    }
}

fn dense_marks(xs: &[i64], ys: &[i64], lo: i64, range: u64) -> Vec<AtomicU64> {
    let words: Vec<AtomicU64> = (0..range.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
    let mark = |x: &i64| {
        for y in ys {
            let off = (x + y - lo) as u64;
            words[(off >> 6) as usize].fetch_or(1 << (off & 63), Ordering::Relaxed);
        }
    };
    if xs.len() * ys.len() < 1 << 16 {
        xs.iter().for_each(mark);
    } else {
        xs.par_iter().for_each(mark);
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_dedup_basic() {
        assert_eq!(merge_dedup(&[1, 3, 5], &[2, 3, 6]), vec![1, 2, 3, 5, 6]);
        assert_eq!(merge_dedup::<i32>(&[], &[1]), vec![1]);
    }

    #[test]
    fn dense_and_sparse_paths_agree() {
        let xs = vec![0i64, 3, 7, 100];
        let ys = vec![-5i64, 0, 2];
        let dense = sumset_i64(&xs, &ys, usize::MAX).unwrap();
        let sparse = combine_runs(&xs, &ys, usize::MAX, |a, b| a + b).unwrap();
        assert_eq!(dense, sparse);
        let wide = vec![0i64, 1 << 40];
        let out = sumset_i64(&wide, &[0, 1], usize::MAX).unwrap();
        assert_eq!(out, vec![0, 1, 1 << 40, (1 << 40) + 1]);
    }

    #[test]
    fn cap_is_enforced() {
        let xs: Vec<i64> = (0..100).collect();
        let ys: Vec<i64> = (0..100).map(|v| v * 1000).collect();
        assert_eq!(sumset_i64(&xs, &ys, 50), Err(Error::CapExceeded { cap: 50 }));
    }

    #[test]
    fn counting_matches_materialized() {
        let xs = vec![0i64, 3, 7, 100, 101];
        let ys = vec![-5i64, 0, 2, 95];
        let full = sumset_i64(&xs, &ys, usize::MAX).unwrap();
        assert_eq!(count_sumset_i64(&xs, &ys), full.len());
        assert_eq!(count_combine(&xs, &ys, |a, b| a + b), full.len());
        let wide = vec![0i64, 1 << 40, 1 << 41];
        assert_eq!(count_sumset_i64(&wide, &wide), 5);
    }
}
