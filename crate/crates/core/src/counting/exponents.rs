//! Dyadic boxes `d_1 u_1^2 - d_2 u_2^2 = eta` and the exponent bookkeeping
//! for the two upper bounds on their point counts.
//!
//! Exponents are in `log_B` scale: `D_i = B^{delta_i}`, `U_i = B^{mu_i}`, and on
//! the constraint surface `D_i U_i^2 = B` one has `mu_i = (1 - delta_i) / 2`.

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::report::ser_f64;

/// `N_eta(D_1, D_2, U_1, U_2)`: integers `d_i ~ D_i`, `u_i ~ U_i` (meaning
/// `N < n <= 2N`) with `d_1 u_1^2 - d_2 u_2^2 = eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadicBox {
    pub eta: i8,
    pub d1: f64,
    pub d2: f64,
    pub u1: f64,
    pub u2: f64,
}

/// Integers `n` with `anchor < n <= 2 anchor`.
fn dyadic_range(anchor: f64) -> std::ops::RangeInclusive<u64> {
    (anchor.floor() as u64 + 1)..=((2.0 * anchor).floor() as u64)
}

impl DyadicBox {
    pub fn new(eta: i8, d1: f64, d2: f64, u1: f64, u2: f64) -> Result<Self> {
        if !matches!(eta, 1 | -1 | 2 | -2) {
            return Err(invalid(format!("eta must be +-1 or +-2, got {eta}")));
        }
        for (name, x) in [("D1", d1), ("D2", d2), ("U1", u1), ("U2", u2)] {
            if !(x.is_finite() && x >= 0.5) {
                return Err(invalid(format!("anchor {name} = {x} must be >= 1/2")));
            }
            if x > 1e12 {
                return Err(invalid(format!("anchor {name} = {x} is too large to enumerate")));
            }
        }
        Ok(DyadicBox { eta, d1, d2, u1, u2 })
    }

    pub fn contains(&self, d1: u64, d2: u64, u1: u64, u2: u64) -> bool {
        dyadic_range(self.d1).contains(&d1)
            && dyadic_range(self.d2).contains(&d2)
            && dyadic_range(self.u1).contains(&u1)
            && dyadic_range(self.u2).contains(&u2)
    }
}

/// Exact count: loop over `(d_2, u_2, u_1)` and solve for `d_1`.
pub fn count_n_eta(b: &DyadicBox) -> u64 {
    let d1_range = dyadic_range(b.d1);
    let mut n = 0;
    for d2 in dyadic_range(b.d2) {
        for u2 in dyadic_range(b.u2) {
            let rhs = d2 as i128 * (u2 as i128).pow(2) + b.eta as i128;
            if rhs <= 0 {
                continue;
            }
            for u1 in dyadic_range(b.u1) {
                let sq = (u1 as i128).pow(2);
                if rhs % sq == 0 && d1_range.contains(&((rhs / sq) as u64)) {
                    n += 1;
                }
            }
        }
    }
    n
}

/// `m(k) = (9/16) k (2 - k)`, exactly.
pub fn m_of_k(k: Rational64) -> Rational64 {
    Rational64::new(9, 16) * k * (Rational64::from_integer(2) - k)
}

fn m_of_k_f64(k: f64) -> f64 {
    9.0 / 16.0 * k * (2.0 - k)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentData {
    /// `log(D_1 D_2) / log B`.
    #[serde(serialize_with = "ser_f64")]
    pub k: f64,
    /// `log M / log B`.
    #[serde(serialize_with = "ser_f64")]
    pub m: f64,
    #[serde(rename = "M", serialize_with = "ser_f64")]
    pub big_m: f64,
}

impl ExponentData {
    pub fn new(k: f64, b: f64) -> Self {
        let m = m_of_k_f64(k);
        ExponentData {
            k,
            m,
            big_m: b.powf(m),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReussBound {
    /// `min((U_1 U_2 M)^{1/2} + U_1 + U_2, (D_1 D_2 M)^{1/2} + D_1 + D_2)`, without the
    /// `(D_2 U_2)^eps` factor.
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    #[serde(serialize_with = "ser_f64")]
    pub log_m: f64,
    /// Exponent of the dominant terms in `log_B` scale.
    #[serde(serialize_with = "ser_f64")]
    pub exponent: f64,
}

/// Evaluates the bound with `log M = (9/8) log(D_1 D_2) log(U_1 U_2) / log(D_1 U_1^2)`.
pub fn reuss_bound(bx: &DyadicBox, b: f64) -> Result<ReussBound> {
    if [bx.d1, bx.d2, bx.u1, bx.u2].iter().any(|&x| x <= 1.0) || b <= 1.0 {
        return Err(invalid("reuss_bound needs all anchors and B above 1"));
    }
    let (ld1, ld2, lu1, lu2) = (bx.d1.ln(), bx.d2.ln(), bx.u1.ln(), bx.u2.ln());
    let log_m = 9.0 / 8.0 * (ld1 + ld2) * (lu1 + lu2) / (ld1 + 2.0 * lu1);
    let m = log_m.exp();
    let first = (bx.u1 * bx.u2 * m).sqrt() + bx.u1 + bx.u2;
    let second = (bx.d1 * bx.d2 * m).sqrt() + bx.d1 + bx.d2;
    let lb = b.ln();
    let e1 = ((lu1 + lu2 + log_m) / 2.0).max(lu1).max(lu2) / lb;
    let e2 = ((ld1 + ld2 + log_m) / 2.0).max(ld1).max(ld2) / lb;
    Ok(ReussBound {
        value: first.min(second),
        log_m,
        exponent: e1.min(e2),
    })
}

/// `min` of both bound exponents at `(k, delta_1)` on the constraint surface.
pub fn combined_exponent(k: f64, delta1: f64) -> f64 {
    let delta2 = k - delta1;
    let mu1 = (1.0 - delta1) / 2.0;
    let mu2 = (1.0 - delta2) / 2.0;
    let m = m_of_k_f64(k);
    let reuss = ((mu1 + mu2 + m) / 2.0)
        .max(mu1)
        .max(mu2)
        .min(((k + m) / 2.0).max(delta1).max(delta2));
    let second = (k / 2.0).max(delta1 + mu2);
    reuss.min(second)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnvelopeRow {
    #[serde(serialize_with = "ser_f64")]
    pub k: f64,
    #[serde(serialize_with = "ser_f64")]
    pub exponent: f64,
}

pub const ENVELOPE_CSV_HEADER: [&str; 2] = ["k", "exponent"];

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub resolution: usize,
    #[serde(serialize_with = "ser_f64")]
    pub supremum: f64,
    #[serde(serialize_with = "ser_f64")]
    pub argmax_k: f64,
    /// Smallest and largest `delta_1` attaining the supremum at `argmax_k`
    /// (within `1e-12`).
    #[serde(serialize_with = "ser_f64")]
    pub argmax_delta1_lo: f64,
    #[serde(serialize_with = "ser_f64")]
    pub argmax_delta1_hi: f64,
    #[serde(skip)]
    pub rows: Vec<EnvelopeRow>,
}

/// Sup of [`combined_exponent`] over `0 <= delta_1 <= delta_2`, `k = delta_1 + delta_2 <= 1`,
/// on a `resolution x resolution` grid in `(k, delta_1 / (k/2))`.
pub fn lemma21_envelope(resolution: usize) -> Result<Envelope> {
    if resolution < 10 {
        return Err(invalid(format!("envelope resolution must be >= 10, got {resolution}")));
    }
    let n = resolution;
    let mut rows = Vec::with_capacity(n);
    let (mut sup, mut arg_k) = (f64::NEG_INFINITY, 0.0);
    for i in 0..n {
        let k = (i + 1) as f64 / n as f64;
        let mut best = f64::NEG_INFINITY;
        for j in 0..n {
            let delta1 = k / 2.0 * j as f64 / (n - 1) as f64;
            best = best.max(combined_exponent(k, delta1));
        }
        rows.push(EnvelopeRow { k, exponent: best });
        if best > sup {
            sup = best;
            arg_k = k;
        }
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..n {
        let delta1 = arg_k / 2.0 * j as f64 / (n - 1) as f64;
        if combined_exponent(arg_k, delta1) >= sup - 1e-12 {
            lo = lo.min(delta1);
            hi = hi.max(delta1);
        }
    }
    Ok(Envelope {
        resolution: n,
        supremum: sup,
        argmax_k: arg_k,
        argmax_delta1_lo: lo,
        argmax_delta1_hi: hi,
        rows,
    })
}
