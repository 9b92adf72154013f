//! Deterministic partitioned sweeps.
//!
//! A range is cut into `partitions` contiguous chunks that are processed on
//! the rayon pool; results are concatenated in range order, so the output
//! never depends on the partition count or on scheduling.

use std::ops::RangeInclusive;

use rayon::prelude::*;

/// Splits `range` into at most `partitions` contiguous, non-empty chunks.
pub fn chunks(range: RangeInclusive<u64>, partitions: usize) -> Vec<RangeInclusive<u64>> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo > hi {
        return Vec::new();
    }
    let len = hi - lo + 1;
    let parts = (partitions.max(1) as u64).min(len);
    let base = len / parts;
    let extra = len % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = lo;
    for i in 0..parts {
        let size = base + u64::from(i < extra);
        out.push(start..=start + size - 1);
        start += size;
    }
    out
}

/// Maps `f` over every value in `range`, keeping the `Some` results in order.
pub fn partitioned_filter_map<T, F>(range: RangeInclusive<u64>, partitions: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync,
{
    chunks(range, partitions)
        .into_par_iter()
        .map(|chunk| chunk.filter_map(&f).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Fallible variant of [`partitioned_filter_map`]; the first error in range
/// order wins.
pub fn try_partitioned_filter_map<T, E, F>(
    range: RangeInclusive<u64>,
    partitions: usize,
    f: F,
) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<Option<T>, E> + Sync,
{
    let parts: Vec<Result<Vec<T>, E>> = chunks(range, partitions)
        .into_par_iter()
        .map(|chunk| {
            let mut v = Vec::new();
            for x in chunk {
                if let Some(t) = f(x)? {
                    v.push(t);
                }
            }
            Ok(v)
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Sums `f` over `range`; integer addition makes this partition-independent.
pub fn partitioned_sum<F>(range: RangeInclusive<u64>, partitions: usize, f: F) -> u64
where
    F: Fn(u64) -> u64 + Sync,
{
    chunks(range, partitions)
        .into_par_iter()
        .map(|chunk| chunk.map(&f).sum::<u64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range() {
        for parts in 1..12 {
            let cs = chunks(3..=40, parts);
            let flat: Vec<u64> = cs.iter().flat_map(|c| c.clone()).collect();
            assert_eq!(flat, (3..=40).collect::<Vec<_>>());
            assert!(cs.len() <= parts);
        }
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 5..=4;
        assert!(chunks(empty, 3).is_empty());
        assert_eq!(chunks(1..=2, 8).len(), 2);
    }

    #[test]
    fn order_is_independent_of_partitions() {
        let f = |x: u64| (!x.is_multiple_of(3)).then_some(x * x);
        let one = partitioned_filter_map(1..=1000, 1, f);
        let eight = partitioned_filter_map(1..=1000, 8, f);
        assert_eq!(one, eight);
        assert_eq!(partitioned_sum(1..=100, 7, |x| x), 5050);
    }
}
