//! `L_d(1) = sum over odd m of (d/m) / m`, with a certified error radius.
//!
//! The character `chi(m) = (d/m)` on odd `m` (zero on even `m`) is periodic
//! modulo `k = 4d` and even. Write `S(m) = chi(1) + ... + chi(m)` and
//! `T(m) = S(1) + ... + S(m)`; both are periodic, `S` is odd about the
//! period and `T` is symmetric, so one half-period scan gives
//! `C2 = max |T|`. Two rounds of partial summation then give
//!
//! ```text
//! sum_{m > M} chi(m)/m = -S(M)/(M+1) - T(M)/((M+1)(M+2)) + r,
//! |r| <= C2 / ((M+1)(M+2)).
//! ```

use serde::Serialize;

use crate::arith::factorize_u64;
use crate::error::{Error, Result};
use crate::pell::check_d;
use crate::report::ser_f64;

/// Default cap on scanned terms (half period plus partial sum).
pub const DEFAULT_MAX_TERMS: u64 = 1 << 30;

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

#[derive(Debug, Clone)]
struct PrimeComponent {
    p: u64,
    /// `None` for primes dividing `d` to an even power: they only zero out multiples.
    legendre: Option<Vec<i8>>,
}

/// `m -> (d/m)` for odd `m`, evaluated through Legendre tables of the odd
/// primes of `d`, quadratic reciprocity and the supplement for `2`.
#[derive(Debug, Clone)]
pub struct OddCharacter {
    d: u64,
    primes: Vec<PrimeComponent>,
    two_odd: bool,
    /// Parity of the number of primes `p = 3 mod 4` with odd exponent.
    flip_on_3_mod_4: bool,
}

fn legendre_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    // x^2 mod p, stepping (x+1)^2 = x^2 + 2x + 1
    let mut sq = 0u64;
    for x in 0..(p - 1) / 2 {
        sq += 2 * x + 1;
        while sq >= p {
            sq -= p;
        }
        t[sq as usize] = 1;
    }
    t
}

impl OddCharacter {
    pub fn new(d: u64) -> Result<Self> {
        check_d(d)?;
        let mut primes = Vec::new();
        let mut two_odd = false;
        let mut flip = false;
        for (p, e) in factorize_u64(d) {
            if p == 2 {
                two_odd = e % 2 == 1;
                continue;
            }
            let odd = e % 2 == 1;
            if odd && p % 4 == 3 {
                flip = !flip;
            }
            primes.push(PrimeComponent {
                p,
                legendre: odd.then(|| legendre_table(p)),
            });
        }
        Ok(OddCharacter {
            d,
            primes,
            two_odd,
            flip_on_3_mod_4: flip,
        })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// Period of the character on all integers.
    pub fn period(&self) -> u64 {
        4 * self.d
    }

    fn combine(&self, m_mod_8: u64, mut v: i8) -> i8 {
        if self.flip_on_3_mod_4 && m_mod_8 % 4 == 3 {
            v = -v;
        }
        if self.two_odd && (m_mod_8 == 3 || m_mod_8 == 5) {
            v = -v;
        }
        v
    }

    /// `(d/m)` for odd `m`, zero for even `m`.
    pub fn value(&self, m: u64) -> i8 {
        if m.is_multiple_of(2) {
            return 0;
        }
        let mut v = 1i8;
        for pc in &self.primes {
            let r = m % pc.p;
            if r == 0 {
                return 0;
            }
            if let Some(t) = &pc.legendre {
                v *= t[r as usize];
            }
        }
        self.combine(m % 8, v)
    }

    /// Calls `f(m, chi(m))` for every odd `m <= n` in increasing order.
    pub fn for_each_odd(&self, n: u64, mut f: impl FnMut(u64, i8)) {
        let mut residues: Vec<u64> = self.primes.iter().map(|pc| 1 % pc.p).collect();
        let mut m = 1u64;
        while m <= n {
            let mut v = 1i8;
            for (pc, r) in self.primes.iter().zip(residues.iter_mut()) {
                if v != 0 {
                    if *r == 0 {
                        v = 0;
                    } else if let Some(t) = &pc.legendre {
                        v *= t[*r as usize];
                    }
                }
                *r += 2;
                if *r >= pc.p {
                    *r -= pc.p;
                }
            }
            let chi = if v == 0 { 0 } else { self.combine(m % 8, v) };
            f(m, chi);
            m += 2;
        }
    }
}

/// A certified enclosure `value +- radius` of `L_d(1)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LValue {
    pub d: u64,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    #[serde(serialize_with = "ser_f64")]
    pub radius: f64,
    /// Cut-off `M` of the partial sum.
    pub terms: u64,
    /// `max |T|` over one period.
    pub c2: u64,
}

impl LValue {
    pub fn lo(&self) -> f64 {
        self.value - self.radius
    }

    pub fn hi(&self) -> f64 {
        self.value + self.radius
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    pub fn contains_interval(&self, other: &LValue) -> bool {
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }
}

/// `L_d(1)` with `radius <= abs_error_target`, using at most [`DEFAULT_MAX_TERMS`].
pub fn l_value(d: u64, abs_error_target: f64) -> Result<LValue> {
    l_value_with_cap(d, abs_error_target, DEFAULT_MAX_TERMS)
}

fn rounding_allowance(m: u64) -> f64 {
    // Compensated summation of terms bounded by 1/m, plus the closing
    // correction terms.
    8.0 * UNIT_ROUNDOFF * ((m.max(1) as f64).ln() + 2.0)
}

pub fn l_value_with_cap(d: u64, abs_error_target: f64, max_terms: u64) -> Result<LValue> {
    if !(abs_error_target.is_finite() && abs_error_target > 0.0) {
        return Err(crate::error::invalid(format!(
            "L-value target must be positive, got {abs_error_target}"
        )));
    }
    let chi = OddCharacter::new(d)?;
    let half = 2 * d;
    if half > max_terms {
        return Err(Error::TargetUnreachable {
            d,
            target: abs_error_target,
            needed: half,
            cap: max_terms,
        });
    }

    // Half-period scan for C2; T(0) = 0 and T is symmetric about (k-2)/2.
    let (mut s, mut t, mut c2) = (0i64, 0i64, 0u64);
    let mut last = 0u64;
    chi.for_each_odd(half, |m, v| {
        // even m - 1 between the previous odd value and m
        if m > 1 {
            t += s;
            c2 = c2.max(t.unsigned_abs());
        }
        s += v as i64;
        t += s;
        c2 = c2.max(t.unsigned_abs());
        last = m;
    });
    debug_assert!(last + 1 == half);

    if rounding_allowance(u64::MAX >> 8) > 0.1 * abs_error_target {
        return Err(Error::PrecisionUnavailable(abs_error_target));
    }
    let tail_budget = 0.9 * abs_error_target;
    let m_needed = ((c2 as f64 / tail_budget).sqrt().ceil() as u64).max(1);
    if half.saturating_add(m_needed) > max_terms {
        return Err(Error::TargetUnreachable {
            d,
            target: abs_error_target,
            needed: half.saturating_add(m_needed),
            cap: max_terms,
        });
    }
    let big_m = m_needed;

    // Partial sum over odd m <= M (Neumaier), with S(M) and T(M).
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let (mut s, mut t) = (0i64, 0i64);
    chi.for_each_odd(big_m, |m, v| {
        if m > 1 {
            t += s;
        }
        s += v as i64;
        t += s;
        if v != 0 {
            let x = v as f64 / m as f64;
            let y = sum + x;
            comp += if sum.abs() >= x.abs() { (sum - y) + x } else { (x - y) + sum };
            sum = y;
        }
    });
    if big_m.is_multiple_of(2) {
        t += s;
    }
    let partial = sum + comp;
    let m1 = big_m as f64 + 1.0;
    let m2 = big_m as f64 + 2.0;
    let value = partial - s as f64 / m1 - t as f64 / (m1 * m2);
    let radius = c2 as f64 / (m1 * m2) + rounding_allowance(big_m);
    Ok(LValue {
        d,
        value,
        radius,
        terms: big_m,
        c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_square_u64, jacobi};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn chi_direct(d: u64, m: u64) -> i8 {
        if m.is_multiple_of(2) {
            0
        } else {
            jacobi(d as i64, m).expect("odd modulus")
        }
    }

    #[test]
    fn table_character_matches_jacobi() {
        for d in 2..=300u64 {
            if is_square_u64(d) {
                continue;
            }
            let chi = OddCharacter::new(d).unwrap();
            let mut seen = Vec::new();
            chi.for_each_odd(3 * chi.period(), |m, v| seen.push((m, v)));
            for (m, v) in seen {
                assert_eq!(v, chi_direct(d, m), "d={d} m={m}");
                assert_eq!(chi.value(m), v);
            }
        }
    }

    #[test]
    fn character_is_even_and_periodic() {
        for d in [2u64, 3, 5, 6, 7, 12, 18, 45, 99, 1000] {
            let chi = OddCharacter::new(d).unwrap();
            let k = chi.period();
            for m in 1..k {
                assert_eq!(chi.value(m), chi.value(k - m), "d={d} m={m}");
                assert_eq!(chi.value(m), chi.value(m + k));
            }
        }
    }

    #[test]
    fn closed_forms() {
        let l2 = (1.0 + 2f64.sqrt()).ln() / 2f64.sqrt();
        let l3 = (2.0 + 3f64.sqrt()).ln() / 3f64.sqrt();
        for target in [1e-2, 1e-5, 1e-9, 1e-12] {
            let v = l_value(2, target).unwrap();
            assert!(v.contains(l2), "{v:?}");
            assert!(v.radius <= target);
            let v = l_value(3, target).unwrap();
            assert!(v.contains(l3), "{v:?}");
        }
        assert!((l2 - 0.623225).abs() < 1e-6);
    }

    #[test]
    fn direct_summation_oracle() {
        // Plain summation to 10^7 terms; the truncation error of that oracle
        // is itself bounded by the same partial-summation argument.
        for d in [3u64, 7, 13, 94] {
            let (mut sum, mut s) = (0.0f64, 0i64);
            let n = 10_000_000u64;
            let mut c1 = 0i64;
            for m in (1..=n).step_by(2) {
                let v = chi_direct(d, m);
                sum += v as f64 / m as f64;
                s += v as i64;
                c1 = c1.max(s.abs());
            }
            let trunc = 2.0 * (c1.max(1) as f64) / n as f64;
            let v = l_value(d, 1e-9).unwrap();
            assert!((v.value - sum).abs() <= v.radius + trunc + 1e-9, "d={d}");
        }
    }

    #[test]
    fn nesting_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 50 {
            let d = rng.gen_range(2..=20_000u64);
            if is_square_u64(d) {
                continue;
            }
            let target = 10f64.powi(-rng.gen_range(2..=8));
            let coarse = l_value(d, target).unwrap();
            let fine = l_value(d, target / 10.0).unwrap();
            assert!(coarse.contains(fine.value), "d={d} {coarse:?} {fine:?}");
            assert!(coarse.radius <= target && fine.radius <= target / 10.0);
            done += 1;
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(l_value(4, 1e-3), Err(Error::PerfectSquare(4))));
        assert!(matches!(l_value(5, 1e-16), Err(Error::PrecisionUnavailable(_))));
        assert!(matches!(
            l_value_with_cap(1_000_003, 1e-3, 1000),
            Err(Error::TargetUnreachable { .. })
        ));
        assert!(l_value(5, 0.0).is_err());
    }
}
