//! Inputs shared by the benchmarks.

/// Non-square determinants with long continued-fraction periods.
pub const LONG_PERIOD_D: [u64; 4] = [9_999_991, 99_999_989, 999_999_937, 9_999_999_967];

/// Non-square `d` in `[lo, hi]`.
pub fn nonsquares(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&d| !pellian_core::arith::is_square_u64(d)).collect()
}
