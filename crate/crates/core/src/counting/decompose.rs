//! Splitting a solution of `t^2 - d u^2 = 1` along `t + 1` and `t - 1`.
//!
//! Since `gcd(t - 1, t + 1)` divides 2, `d u^2 = (t + 1)(t - 1)` splits as
//! `d_1 u_1^2 - d_2 u_2^2 = eta` in one of three ways depending on the parity
//! of `t` and on `4 | d`. The square parts are taken as `gcd(u, .)`, which
//! makes the splitting unique.

use num_integer::Integer;
use serde::Serialize;

use crate::counting::pell_u;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitCase {
    /// `t` even: `t + 1 = d_1 u_1^2`, `t - 1 = d_2 u_2^2`, `u = u_1 u_2`, `d = d_1 d_2`.
    EvenT,
    /// `t` odd, `4 ∤ d`: `(t + 1)/2 = d_1 u_1^2`, `(t - 1)/2 = d_2 u_2^2`, `u = 2 u_1 u_2`, `d = d_1 d_2`.
    OddT,
    /// `t` odd, `4 | d`: as above with `u = u_1 u_2`, `d = 4 d_1 d_2`.
    OddTFourDividesD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Decomposition {
    pub case: SplitCase,
    pub eta: i8,
    pub d1: u64,
    pub d2: u64,
    pub u1: u64,
    pub u2: u64,
}

impl Decomposition {
    /// `d_1 u_1^2 - d_2 u_2^2`.
    pub fn residual(&self) -> i128 {
        self.d1 as i128 * (self.u1 as i128).pow(2) - self.d2 as i128 * (self.u2 as i128).pow(2)
    }

    /// The same splitting read with the sides exchanged, `eta -> -eta`.
    pub fn swapped(&self) -> Decomposition {
        Decomposition {
            case: self.case,
            eta: -self.eta,
            d1: self.d2,
            d2: self.d1,
            u1: self.u2,
            u2: self.u1,
        }
    }

    fn oriented(&self) -> Decomposition {
        if self.eta < 0 {
            self.swapped()
        } else {
            *self
        }
    }
}

fn not_a_solution(t: u64, d: u64, u: u64) -> Error {
    Error::NotASolution {
        t: t.to_string(),
        d: d.to_string(),
        u: u.to_string(),
    }
}

/// The splitting of a solution with `t, u >= 1`.
pub fn decompose_solution(t: u64, d: u64, u: u64) -> Result<Decomposition> {
    if u == 0 || pell_u(t, d) != Some(u) {
        return Err(not_a_solution(t, d, u));
    }
    let split = |a: u64, b: u64, v: u64| {
        let (u1, u2) = (v.gcd(&a), v.gcd(&b));
        (a / (u1 * u1), b / (u2 * u2), u1, u2)
    };
    let (case, eta, (d1, d2, u1, u2)) = if t.is_multiple_of(2) {
        (SplitCase::EvenT, 2, split(t + 1, t - 1, u))
    } else if !d.is_multiple_of(4) {
        (SplitCase::OddT, 1, split(t.div_ceil(2), (t - 1) / 2, u / 2))
    } else {
        (SplitCase::OddTFourDividesD, 1, split(t.div_ceil(2), (t - 1) / 2, u))
    };
    let dec = Decomposition {
        case,
        eta,
        d1,
        d2,
        u1,
        u2,
    };
    debug_assert_eq!(dec.residual(), eta as i128);
    Ok(dec)
}

/// Inverse of [`decompose_solution`]; also accepts the swapped orientation.
pub fn recompose(dec: &Decomposition) -> Result<(u64, u64, u64)> {
    let dec = dec.oriented();
    let bad = || invalid(format!("{dec:?} does not come from a Pell solution"));
    let expected_eta = match dec.case {
        SplitCase::EvenT => 2,
        _ => 1,
    };
    if dec.eta != expected_eta || dec.residual() != expected_eta as i128 {
        return Err(bad());
    }
    let side = dec.d1.checked_mul(dec.u1.checked_mul(dec.u1).ok_or_else(bad)?).ok_or_else(bad)?;
    let uu = dec.u1.checked_mul(dec.u2).ok_or_else(bad)?;
    let dd = dec.d1.checked_mul(dec.d2).ok_or_else(bad)?;
    let (t, d, u) = match dec.case {
        SplitCase::EvenT => (side - 1, dd, uu),
        SplitCase::OddT => (2 * side - 1, dd, 2 * uu),
        SplitCase::OddTFourDividesD => (2 * side - 1, dd.checked_mul(4).ok_or_else(bad)?, uu),
    };
    if pell_u(t, d) != Some(u) {
        return Err(bad());
    }
    Ok((t, d, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let d = decompose_solution(3, 2, 2).unwrap();
        assert_eq!((d.case, d.eta, d.d1, d.d2, d.u1, d.u2), (SplitCase::OddT, 1, 2, 1, 1, 1));
        let d = decompose_solution(2, 3, 1).unwrap();
        assert_eq!((d.case, d.eta, d.d1, d.d2, d.u1, d.u2), (SplitCase::EvenT, 2, 3, 1, 1, 1));
        assert!(decompose_solution(3, 2, 1).is_err());
        assert!(decompose_solution(1, 2, 0).is_err());
    }

    #[test]
    fn swapped_round_trip() {
        let d = decompose_solution(17, 8, 6).unwrap();
        assert_eq!(recompose(&d.swapped()).unwrap(), (17, 8, 6));
        assert_eq!(d.swapped().residual(), -(d.eta as i128));
    }

    #[test]
    #[allow(clippy::manual_div_ceil)]
    fn unique_among_all_splittings() {
        // Every factorization of the (t+-1) sides meeting the case constraints,
        // restricted to square-free d_i in the even case, is the gcd one.
        for t in 2..=400u64 {
            for d in 2..=t * t {
                let Some(u) = pell_u(t, d) else { continue };
                let dec = decompose_solution(t, d, u).unwrap();
                let (a, b, target_u, target_d) = match dec.case {
                    SplitCase::EvenT => (t + 1, t - 1, u, d),
                    SplitCase::OddT => ((t + 1) / 2, (t - 1) / 2, u / 2, d),
                    SplitCase::OddTFourDividesD => ((t + 1) / 2, (t - 1) / 2, u, d / 4),
                };
                let mut found = Vec::new();
                for u1 in 1..=target_u {
                    if target_u % u1 != 0 || a % (u1 * u1) != 0 {
                        continue;
                    }
                    let u2 = target_u / u1;
                    if b % (u2 * u2) != 0 {
                        continue;
                    }
                    if (a / (u1 * u1)) * (b / (u2 * u2)) == target_d {
                        found.push((a / (u1 * u1), b / (u2 * u2), u1, u2));
                    }
                }
                assert_eq!(found, vec![(dec.d1, dec.d2, dec.u1, dec.u2)], "t={t} d={d} u={u}");
            }
        }
    }
}
