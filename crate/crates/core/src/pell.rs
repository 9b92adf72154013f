//! Continued fractions of `sqrt(d)` and the Pell equation `t^2 - d u^2 = +-1`.
//!
//! The expansion itself runs on machine integers (the `P_i, Q_i` state never
//! exceeds `2 sqrt(d)`); convergents are assembled from the partial quotients
//! with a binary-splitting matrix product so that fundamental solutions with
//! tens of thousands of digits stay cheap.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_square_u64, isqrt_u64};
use crate::error::{Error, Result};

/// Largest determinant accepted at the API level.
pub const MAX_D: u64 = i64::MAX as u64;

pub(crate) fn check_d(d: u64) -> Result<()> {
    if !(2..=MAX_D).contains(&d) {
        return Err(Error::DeterminantOutOfRange(d));
    }
    if is_square_u64(d) {
        return Err(Error::PerfectSquare(d));
    }
    Ok(())
}

/// One full period of the continued fraction of `sqrt(d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion {
    pub d: u64,
    /// `a_0, a_1, ..., a_l` where `l` is the period length and `a_l = 2 a_0`.
    pub partial_quotients: Vec<u64>,
    /// `(P_i, Q_i)` for `i = 0..=l`, with `(P_0, Q_0) = (0, 1)` and `Q_l = 1`.
    pub states: Vec<(u64, u64)>,
}

impl CfExpansion {
    pub fn a0(&self) -> u64 {
        self.partial_quotients[0]
    }

    pub fn period_length(&self) -> usize {
        self.partial_quotients.len() - 1
    }

    /// The repeating block `a_1, ..., a_l`.
    pub fn period(&self) -> &[u64] {
        &self.partial_quotients[1..]
    }

    /// Partial quotient `a_i` for any `i >= 0`.
    pub fn quotient(&self, i: usize) -> u64 {
        if i == 0 {
            self.a0()
        } else {
            self.period()[(i - 1) % self.period_length()]
        }
    }
}

/// Single step of the `(P, Q, a)` recurrence.
#[inline]
fn cf_step(d: u64, a0: u64, p: u64, q: u64, a: u64) -> (u64, u64, u64) {
    let p_next = (a as u128 * q as u128 - p as u128) as u64;
    let q_next = ((d as u128 - p_next as u128 * p_next as u128) / q as u128) as u64;
    let a_next = (a0 + p_next) / q_next;
    (p_next, q_next, a_next)
}

pub fn cf_expand_sqrt(d: u64) -> Result<CfExpansion> {
    check_d(d)?;
    let a0 = isqrt_u64(d);
    let mut partial_quotients = vec![a0];
    let mut states = vec![(0, 1)];
    let (mut p, mut q, mut a) = (0u64, 1u64, a0);
    loop {
        (p, q, a) = cf_step(d, a0, p, q, a);
        partial_quotients.push(a);
        states.push((p, q));
        if q == 1 {
            break;
        }
    }
    Ok(CfExpansion {
        d,
        partial_quotients,
        states,
    })
}

/// `[[p_n, p_{n-1}], [q_n, q_{n-1}]]` for the quotients `a_0..a_n`.
type Mat = [BigUint; 4];

fn mat_mul(x: &Mat, y: &Mat) -> Mat {
    [
        &x[0] * &y[0] + &x[1] * &y[2],
        &x[0] * &y[1] + &x[1] * &y[3],
        &x[2] * &y[0] + &x[3] * &y[2],
        &x[2] * &y[1] + &x[3] * &y[3],
    ]
}

fn quotient_product(qs: &[u64]) -> Mat {
    if qs.len() <= 24 {
        // Entries stay small here; a u128 fast path would only matter for
        // tiny periods.
        let mut m: Mat = [
            BigUint::one(),
            BigUint::zero(),
            BigUint::zero(),
            BigUint::one(),
        ];
        for &a in qs {
            let a = BigUint::from(a);
            m = [&m[0] * &a + &m[1], m[0].clone(), &m[2] * &a + &m[3], m[2].clone()];
        }
        return m;
    }
    let (lo, hi) = qs.split_at(qs.len() / 2);
    mat_mul(&quotient_product(lo), &quotient_product(hi))
}

/// Convergent `p_n / q_n` of the continued fraction `[a_0; a_1, ..., a_n]`.
pub fn convergent(quotients: &[u64]) -> (BigUint, BigUint) {
    let [p, _, q, _] = quotient_product(quotients);
    (p, q)
}

/// A solution of `t^2 - d u^2 = norm` with `norm = +-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PellSolution {
    pub d: u64,
    #[serde(serialize_with = "crate::report::ser_display")]
    pub t: BigUint,
    #[serde(serialize_with = "crate::report::ser_display")]
    pub u: BigUint,
    pub norm: i8,
}

impl PellSolution {
    /// Builds a solution after checking `t^2 - d u^2 = norm` exactly.
    pub fn new(d: u64, t: BigUint, u: BigUint, norm: i8) -> Result<Self> {
        let sol = PellSolution { d, t, u, norm };
        if sol.exact_norm() != BigInt::from(norm) || !matches!(norm, 1 | -1) {
            return Err(Error::NotASolution {
                t: sol.t.to_string(),
                d: d.to_string(),
                u: sol.u.to_string(),
            });
        }
        Ok(sol)
    }

    /// `t^2 - d u^2`, recomputed.
    pub fn exact_norm(&self) -> BigInt {
        let t2 = BigInt::from(&self.t * &self.t);
        let du2 = BigInt::from(&self.u * &self.u * self.d);
        t2 - du2
    }

    pub fn is_valid(&self) -> bool {
        self.exact_norm() == BigInt::from(self.norm)
    }

    /// `log(t + u sqrt(d))`, with relative error around `1e-15`.
    pub fn log(&self) -> f64 {
        log_unit(&self.t, self.norm)
    }

    /// Exact test of `t + u sqrt(d) <= bound`.
    pub fn le_integer(&self, bound: &BigUint) -> bool {
        surd_le_integer(&self.t, &self.u, self.d, bound)
    }

    /// Product `(t + u sqrt d)(other.t + other.u sqrt d)`.
    pub fn mul(&self, other: &PellSolution) -> PellSolution {
        debug_assert_eq!(self.d, other.d);
        PellSolution {
            d: self.d,
            t: &self.t * &other.t + &self.u * &other.u * self.d,
            u: &self.t * &other.u + &self.u * &other.t,
            norm: self.norm * other.norm,
        }
    }
}

/// Exact test of `t + u sqrt(d) <= bound` for nonnegative `t, u`.
pub fn surd_le_integer(t: &BigUint, u: &BigUint, d: u64, bound: &BigUint) -> bool {
    if t > bound {
        return false;
    }
    let gap = bound - t;
    u * u * d <= &gap * &gap
}

/// Natural log of a big integer from its bit length and leading 64 bits.
pub fn log_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().map_or(f64::NAN, |v| (v as f64).ln());
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `log(t + u sqrt d)` for a unit of norm `norm`, using `u sqrt d = sqrt(t^2 - norm)`
/// so the result only depends on `log t` and a correction bounded by `log 2`.
pub fn log_unit(t: &BigUint, norm: i8) -> f64 {
    let log_t = log_biguint(t);
    // t^{-2}; underflows harmlessly to 0 for huge t.
    let inv_t2 = (-2.0 * log_t).exp();
    log_t + (1.0 + (1.0 - norm as f64 * inv_t2).sqrt()).ln()
}

/// Smallest `t, u >= 1` with `|t^2 - d u^2| = 1`; the norm is `-1` exactly
/// when the period of `sqrt(d)` is odd.
pub fn fundamental_unit_pm(d: u64) -> Result<PellSolution> {
    let cf = cf_expand_sqrt(d)?;
    Ok(unit_from_expansion(&cf))
}

fn unit_from_expansion(cf: &CfExpansion) -> PellSolution {
    let l = cf.period_length();
    let (t, u) = convergent(&cf.partial_quotients[..l]);
    let norm = if l.is_multiple_of(2) { 1 } else { -1 };
    PellSolution {
        d: cf.d,
        t,
        u,
        norm,
    }
}

/// The fundamental solution `eps_d = t_1 + u_1 sqrt(d)` of `t^2 - d u^2 = 1`.
pub fn fundamental_solution(d: u64) -> Result<PellSolution> {
    let unit = fundamental_unit_pm(d)?;
    Ok(if unit.norm == 1 {
        unit
    } else {
        unit.mul(&unit)
    })
}

/// Fundamental solution if `t_1 <= t_max`, otherwise `None`.
///
/// Walks the convergents with `u128` arithmetic and stops as soon as `p_i`
/// exceeds `t_max`: since `p_i` is increasing, `t_1 >= p_i` from then on.
/// This is the fast path for sweeps that only care about small units.
pub fn fundamental_solution_bounded(d: u64, t_max: u128) -> Result<Option<(u128, u128)>> {
    check_d(d)?;
    let a0 = isqrt_u64(d);
    let (mut p_prev, mut p) = (1u128, a0 as u128);
    let (mut q_prev, mut q) = (0u128, 1u128);
    let (mut cp, mut cq, mut a) = (0u64, 1u64, a0);
    loop {
        if p > t_max {
            return Ok(None);
        }
        (cp, cq, a) = cf_step(d, a0, cp, cq, a);
        if cq == 1 {
            // (p, q) is the last convergent of the first period.
            return Ok(if p.pow(2) > (d as u128) * q * q {
                Some((p, q))
            } else {
                // norm -1: square it.
                let t = p
                    .checked_mul(p)
                    .and_then(|pp| q.checked_mul(q)?.checked_mul(d as u128)?.checked_add(pp));
                match t {
                    Some(t) if t <= t_max => Some((t, 2 * p * q)),
                    _ => None,
                }
            });
        }
        let next_p = (a as u128).checked_mul(p).and_then(|x| x.checked_add(p_prev));
        let next_q = (a as u128).checked_mul(q).and_then(|x| x.checked_add(q_prev));
        match (next_p, next_q) {
            (Some(np), Some(nq)) => {
                (p_prev, p) = (p, np);
                (q_prev, q) = (q, nq);
            }
            _ => return Ok(None),
        }
    }
}

/// `eps_d^n` via `t_{k+1} = t_1 t_k + d u_1 u_k`, `u_{k+1} = t_1 u_k + u_1 t_k`.
pub fn nth_solution(d: u64, n: u32) -> Result<PellSolution> {
    if n == 0 {
        return Err(crate::error::invalid("nth_solution needs n >= 1"));
    }
    let eps = fundamental_solution(d)?;
    let mut cur = eps.clone();
    for _ in 1..n {
        cur = cur.mul(&eps);
    }
    Ok(cur)
}

/// `log eps_d`. The evaluation carries a relative error near `1e-15`; targets
/// tighter than `1e-14` are refused rather than silently missed.
pub fn log_eps(d: u64, relative_error_target: f64) -> Result<f64> {
    if relative_error_target < 1e-14 {
        return Err(Error::PrecisionUnavailable(relative_error_target));
    }
    Ok(fundamental_solution(d)?.log())
}

/// `eps_{z^2+1} = (2z^2 + 1) + 2z sqrt(z^2 + 1)`.
pub fn family_z2p1(z: u64) -> Result<PellSolution> {
    if z == 0 {
        return Err(crate::error::invalid("family_z2p1 needs z >= 1"));
    }
    let zb = BigUint::from(z);
    let d = z
        .checked_mul(z)
        .and_then(|x| x.checked_add(1))
        .filter(|&d| d <= MAX_D)
        .ok_or(Error::DeterminantOutOfRange(u64::MAX))?;
    PellSolution::new(d, &zb * &zb * 2u8 + 1u8, zb * 2u8, 1)
}

/// For `z = 3k`: `eps_{9k^2+3} = (6k^2 + 1) + 2k sqrt(9k^2 + 3)`.
pub fn family_9k2p3(k: u64) -> Result<PellSolution> {
    if k == 0 {
        return Err(crate::error::invalid("family_9k2p3 needs k >= 1"));
    }
    let kb = BigUint::from(k);
    let d = k
        .checked_mul(k)
        .and_then(|x| x.checked_mul(9))
        .and_then(|x| x.checked_add(3))
        .filter(|&d| d <= MAX_D)
        .ok_or(Error::DeterminantOutOfRange(u64::MAX))?;
    PellSolution::new(d, &kb * &kb * 6u8 + 1u8, kb * 2u8, 1)
}

/// All `eps_d^n`, `n >= 1`, with `t_n <= t_bound`, in increasing order.
pub fn solutions_up_to(d: u64, t_bound: &BigUint) -> Result<Vec<PellSolution>> {
    let eps = fundamental_solution(d)?;
    let mut out = Vec::new();
    let mut cur = eps.clone();
    while &cur.t <= t_bound {
        let next = cur.mul(&eps);
        out.push(cur);
        cur = next;
    }
    Ok(out)
}

/// Exact comparison of `t + u sqrt(d)` against `d^(p/q)`.
pub fn compare_surd_with_power(t: &BigUint, u: &BigUint, d: u64, p: u32, q: u32) -> Ordering {
    // (t + u sqrt d)^q = A + B sqrt d
    let (mut a, mut b) = (BigUint::one(), BigUint::zero());
    for _ in 0..q {
        (a, b) = (&a * t + &b * u * d, &a * u + &b * t);
    }
    let target = BigUint::from(d).pow(p);
    if a > target {
        return Ordering::Greater;
    }
    let gap = &target - &a;
    let lhs = &b * &b * d;
    let rhs = &gap * &gap;
    // B sqrt d vs gap; B sqrt d is irrational unless B = 0.
    lhs.cmp(&rhs)
}

/// Exact `u128` recurrence for powers of a small unit; `None` on overflow.
pub(crate) fn next_power_u128(d: u64, eps: (u128, u128), cur: (u128, u128)) -> Option<(u128, u128)> {
    let d = d as u128;
    let t = eps.0.checked_mul(cur.0)?.checked_add(d.checked_mul(eps.1)?.checked_mul(cur.1)?)?;
    let u = eps.0.checked_mul(cur.1)?.checked_add(eps.1.checked_mul(cur.0)?)?;
    Some((t, u))
}

/// `log(t + u sqrt d)` for a `u128` solution of norm `+1`.
pub(crate) fn log_unit_u128(t: u128) -> f64 {
    log_unit(&BigUint::from(t), 1)
}

/// Largest `log eps_d / (sqrt(d) log d)` over non-square `d <= d_max`.
/// The quotient is bounded, with an unknown constant; this only reports it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogEpsGrowth {
    pub d_max: u64,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub max_ratio: f64,
    pub argmax_d: u64,
}

pub fn log_eps_growth(d_max: u64, partitions: usize) -> Result<LogEpsGrowth> {
    if d_max < 2 {
        return Err(crate::error::invalid(format!("need d_max >= 2, got {d_max}")));
    }
    let rows = crate::sweep::try_partitioned_filter_map(2..=d_max, partitions, |d| {
        if is_square_u64(d) {
            return Ok(None);
        }
        let df = d as f64;
        Ok::<_, Error>(Some((fundamental_solution(d)?.log() / (df.sqrt() * df.ln()), d)))
    })?;
    let (max_ratio, argmax_d) = rows.into_iter().fold((0.0, 0), |a, x| if x.0 > a.0 { x } else { a });
    Ok(LogEpsGrowth {
        d_max,
        max_ratio,
        argmax_d,
    })
}
