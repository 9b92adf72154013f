//! Counting points of bounded height on `t^2 - d u^2 = 1`.
//!
//! `N(B)` counts integer triples with `max(|t|, |d|, |u|) <= B` and `u != 0`,
//! where `d` runs over non-squares `2 <= d <= B`; every positive solution
//! `(t, u)` stands for four sign choices. `S(x, alpha)` counts powers of the
//! fundamental unit below `d^{1/2 + alpha}`.

mod decompose;
mod exponents;

pub use decompose::{decompose_solution, recompose, Decomposition, SplitCase};
pub use exponents::{
    combined_exponent, count_n_eta, lemma21_envelope, m_of_k, reuss_bound, DyadicBox, Envelope, EnvelopeRow,
    ExponentData, ReussBound, ENVELOPE_CSV_HEADER,
};

use std::f64::consts::PI;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_square_u64, isqrt_u128};
use crate::error::{invalid, Result};
use crate::pell::{
    compare_surd_with_power, fundamental_solution, fundamental_solution_bounded, log_unit_u128,
    next_power_u128,
};
use crate::report::{ser_f64, ser_opt_f64};
use crate::sweep::{partitioned_sum, try_partitioned_filter_map};

/// Sign choices `(+-t, +-u)` per positive solution.
pub const SIGN_MULTIPLICITY: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Walk `d` and enumerate powers of the fundamental unit.
    PerD,
    /// The literal triple loop.
    Brute,
}

impl std::str::FromStr for Strategy {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_d" => Ok(Strategy::PerD),
            "brute" => Ok(Strategy::Brute),
            _ => Err(invalid(format!("unknown strategy {s:?}, expected per_d or brute"))),
        }
    }
}

/// Positive solutions `(t, u)` for `d` with `t <= t_max`, in increasing order.
pub fn solutions_below(d: u64, t_max: u128) -> Result<Vec<(u128, u128)>> {
    let Some(eps) = fundamental_solution_bounded(d, t_max)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    let mut cur = Some(eps);
    while let Some(c) = cur.filter(|c| c.0 <= t_max) {
        out.push(c);
        cur = next_power_u128(d, eps, c);
    }
    Ok(out)
}

fn check_b(b: u64) -> Result<()> {
    if b < 2 {
        return Err(invalid(format!("N(B) needs B >= 2, got {b}")));
    }
    if b > 1 << 40 {
        return Err(invalid(format!("B = {b} is beyond the supported range")));
    }
    Ok(())
}

/// `N(B)` with the chosen strategy.
pub fn count_n(b: u64, strategy: Strategy) -> Result<u64> {
    count_n_partitioned(b, strategy, 1)
}

pub fn count_n_partitioned(b: u64, strategy: Strategy, partitions: usize) -> Result<u64> {
    check_b(b)?;
    match strategy {
        Strategy::PerD => {
            let per_d = try_partitioned_filter_map(2..=b, partitions, |d| {
                if is_square_u64(d) {
                    return Ok(None);
                }
                // u < t, so the height is max(t, d).
                Ok::<_, crate::error::Error>(Some(solutions_below(d, b as u128)?.len() as u64))
            })?;
            Ok(SIGN_MULTIPLICITY * per_d.iter().sum::<u64>())
        }
        Strategy::Brute => Ok(partitioned_sum(1..=b, partitions, |t| brute_row(t, b))),
    }
}

// Triples (t, d, u) with fixed t >= 1 and d, u <= b.
fn brute_row(t: u64, b: u64) -> u64 {
    let t2m1 = (t as u128) * (t as u128) - 1;
    let mut n = 0;
    for d in 2..=b {
        for u in 1..=b {
            let du2 = d as u128 * u as u128 * u as u128;
            if du2 > t2m1 {
                break;
            }
            if du2 == t2m1 {
                n += SIGN_MULTIPLICITY;
            }
        }
    }
    n
}

/// `N(B)` for every `2 <= B <= b_max` from a single triple loop, indexed by `B`.
pub fn count_n_brute_table(b_max: u64) -> Result<Vec<u64>> {
    check_b(b_max)?;
    let mut hist = vec![0u64; b_max as usize + 1];
    for t in 1..=b_max {
        let t2m1 = (t as u128) * (t as u128) - 1;
        for d in 2..=b_max {
            for u in 1..=b_max {
                let du2 = d as u128 * u as u128 * u as u128;
                if du2 > t2m1 {
                    break;
                }
                if du2 == t2m1 {
                    hist[t.max(d).max(u) as usize] += SIGN_MULTIPLICITY;
                }
            }
        }
    }
    let mut acc = 0;
    for h in hist.iter_mut() {
        acc += *h;
        *h = acc;
    }
    Ok(hist)
}

/// One row of a `N(B)` sweep.
#[derive(Debug, Clone, Serialize)]
pub struct CountRecord {
    #[serde(rename = "B")]
    pub b: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub strategy: Strategy,
    /// Wall time, only when timing was requested; left empty otherwise so
    /// repeated sweeps produce identical files.
    #[serde(serialize_with = "ser_opt_f64")]
    pub seconds: Option<f64>,
}

pub const COUNT_CSV_HEADER: [&str; 4] = ["B", "N", "strategy", "seconds"];

pub fn count_n_sweep(
    bs: &[u64],
    strategy: Strategy,
    partitions: usize,
    timing: bool,
) -> Result<Vec<CountRecord>> {
    bs.iter()
        .map(|&b| {
            let start = Instant::now();
            let n = count_n_partitioned(b, strategy, partitions)?;
            Ok(CountRecord {
                b,
                n,
                strategy,
                seconds: timing.then(|| start.elapsed().as_secs_f64()),
            })
        })
        .collect()
}

/// Gap below which the logarithmic comparison defers to exact arithmetic.
const LOG_GAP: f64 = 1e-10;

fn exponent_parts(alpha: Rational64) -> Result<(u32, u32)> {
    if alpha <= Rational64::zero() {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    // 1/2 + alpha = (den + 2 num) / (2 den)
    let e = Rational64::new(1, 2) + alpha;
    let (p, q) = (e.numer().to_u32(), e.denom().to_u32());
    match (p, q) {
        (Some(p), Some(q)) if p <= 1 << 12 && q <= 1 << 12 => Ok((p, q)),
        _ => Err(invalid(format!("alpha = {alpha} has too large a numerator or denominator"))),
    }
}

/// Number of `n >= 1` with `eps_d^n <= d^{1/2 + alpha}`.
fn s_count_for_d(d: u64, p: u32, q: u32) -> Result<u64> {
    let e = p as f64 / q as f64;
    let log_bound = e * (d as f64).ln();
    let include = |t: &BigUint, u: &BigUint, log_eta: f64| -> bool {
        let gap = log_eta - log_bound;
        if gap < -LOG_GAP {
            true
        } else if gap > LOG_GAP {
            false
        } else {
            compare_surd_with_power(t, u, d, p, q) != std::cmp::Ordering::Greater
        }
    };
    // t < eta <= d^e, so t never exceeds ceil(d^e).
    if log_bound < 120.0 * std::f64::consts::LN_2 {
        let t_max = log_bound.exp().ceil() as u128 + 2;
        let sols = solutions_below(d, t_max)?;
        let mut n = 0;
        for (t, u) in sols {
            if !include(&BigUint::from(t), &BigUint::from(u), log_unit_u128(t)) {
                break;
            }
            n += 1;
        }
        return Ok(n);
    }
    let eps = fundamental_solution(d)?;
    let mut cur = eps.clone();
    let mut n = 0;
    while include(&cur.t, &cur.u, cur.log()) {
        n += 1;
        cur = cur.mul(&eps);
    }
    Ok(n)
}

/// `S(x, alpha)`: units `eps_d^n <= d^{1/2 + alpha}` over non-square `2 <= d <= x`.
pub fn count_s(x: u64, alpha: Rational64) -> Result<u64> {
    count_s_partitioned(x, alpha, 1)
}

pub fn count_s_partitioned(x: u64, alpha: Rational64, partitions: usize) -> Result<u64> {
    if x < 2 {
        return Err(invalid(format!("S(x, alpha) needs x >= 2, got {x}")));
    }
    let (p, q) = exponent_parts(alpha)?;
    let per_d = try_partitioned_filter_map(2..=x, partitions, |d| {
        if is_square_u64(d) {
            return Ok(None);
        }
        s_count_for_d(d, p, q).map(Some)
    })?;
    Ok(per_d.iter().sum())
}

/// The main term `(4 alpha^2 / pi^2) x^{1/2} (log x)^2`.
pub fn hooley_main_term(x: u64, alpha: Rational64) -> f64 {
    let a = alpha.to_f64().unwrap_or(f64::NAN);
    let lx = (x as f64).ln();
    4.0 * a * a / (PI * PI) * (x as f64).sqrt() * lx * lx
}

/// `S(x, alpha)` divided by its conjectured main term.
pub fn hooley_ratio(x: u64, alpha: Rational64) -> Result<f64> {
    hooley_ratio_partitioned(x, alpha, 1)
}

pub fn hooley_ratio_partitioned(x: u64, alpha: Rational64, partitions: usize) -> Result<f64> {
    if alpha > Rational64::new(1, 2) {
        return Err(invalid(format!("the main term is only claimed for alpha <= 1/2, got {alpha}")));
    }
    let s = count_s_partitioned(x, alpha, partitions)?;
    Ok(s as f64 / hooley_main_term(x, alpha))
}

#[derive(Debug, Clone, Serialize)]
pub struct HooleyRecord {
    pub x: u64,
    #[serde(serialize_with = "crate::report::ser_display")]
    pub alpha: Rational64,
    #[serde(rename = "S")]
    pub s: u64,
    #[serde(serialize_with = "ser_f64")]
    pub ratio: f64,
}

pub const HOOLEY_CSV_HEADER: [&str; 4] = ["x", "alpha", "S", "ratio"];

pub fn hooley_sweep(xs: &[u64], alpha: Rational64, partitions: usize) -> Result<Vec<HooleyRecord>> {
    xs.iter()
        .map(|&x| {
            let s = count_s_partitioned(x, alpha, partitions)?;
            Ok(HooleyRecord {
                x,
                alpha,
                s,
                ratio: s as f64 / hooley_main_term(x, alpha),
            })
        })
        .collect()
}

/// The pieces of `N(2B) - N(B)` by dyadic range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DyadicSplit {
    #[serde(rename = "B")]
    pub b: u64,
    /// `B < d <= 2B`, `t <= 2B`.
    pub m1: u64,
    /// `d <= B`, `B < t <= 2B`.
    pub m2: u64,
    /// `sqrt(B) < d <= B`, `B < t <= 2B`.
    pub m3: u64,
}

pub fn dyadic_split(b: u64) -> Result<DyadicSplit> {
    if b < 4 {
        return Err(invalid(format!("dyadic split needs B >= 4, got {b}")));
    }
    check_b(2 * b)?;
    let (mut m1, mut m2, mut m3) = (0, 0, 0);
    for d in 2..=2 * b {
        if is_square_u64(d) {
            continue;
        }
        for (t, _) in solutions_below(d, 2 * b as u128)? {
            if d > b {
                m1 += SIGN_MULTIPLICITY;
            } else if t > b as u128 {
                m2 += SIGN_MULTIPLICITY;
                if (d as u128) * (d as u128) > b as u128 {
                    m3 += SIGN_MULTIPLICITY;
                }
            }
        }
    }
    Ok(DyadicSplit { b, m1, m2, m3 })
}

/// `u` with `t^2 - d u^2 = 1`, if one exists.
pub fn pell_u(t: u64, d: u64) -> Option<u64> {
    let t2m1 = (t as u128).checked_mul(t as u128)?.checked_sub(1)?;
    if t2m1 == 0 || t2m1 % d as u128 != 0 {
        return None;
    }
    let u2 = t2m1 / d as u128;
    let u = isqrt_u128(u2);
    (u * u == u2).then_some(u as u64)
}
