//! Polynomial `A^1`-curves on the Pell surface `t^2 - d u^2 = 1` and on the
//! surfaces `2uyz = y^2 - k u^2 - 1`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// The surface a curve lives on, with its coordinate polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveModel {
    /// `t^2 - d u^2 = 1`.
    Pell { t: Poly, d: Poly, u: Poly },
    /// `2uyz = y^2 - k u^2 - 1`.
    Surface { k: i64, y: Poly, u: Poly, z: Poly },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct A1Curve {
    pub name: String,
    pub model: CurveModel,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveSummary {
    pub name: String,
    pub coordinates: Vec<(String, String)>,
    pub degrees: Vec<Option<usize>>,
    pub identity_holds: bool,
}

impl A1Curve {
    /// The defining equation pulled back along the curve; zero iff the curve
    /// lies on its surface.
    pub fn residual(&self) -> Poly {
        match &self.model {
            CurveModel::Pell { t, d, u } => &(&(t * t) - &(&(d * u) * u)) - &Poly::constant(1),
            CurveModel::Surface { k, y, u, z } => {
                let lhs = (&(u * y) * z).scale(&BigInt::from(2));
                let rhs = &(&(y * y) - &(u * u).scale(&BigInt::from(*k))) - &Poly::constant(1);
                &lhs - &rhs
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        self.residual().is_zero()
    }

    fn coordinates(&self) -> Vec<(&'static str, &Poly)> {
        match &self.model {
            CurveModel::Pell { t, d, u } => vec![("t", t), ("d", d), ("u", u)],
            CurveModel::Surface { y, u, z, .. } => vec![("y", y), ("u", u), ("z", z)],
        }
    }

    /// Coordinates at parameter `x`, in model order.
    pub fn eval(&self, x: &BigInt) -> Vec<BigInt> {
        self.coordinates().iter().map(|(_, p)| p.eval(x)).collect()
    }

    pub fn degrees(&self) -> Vec<Option<usize>> {
        self.coordinates().iter().map(|(_, p)| p.degree()).collect()
    }

    pub fn summary(&self) -> CurveSummary {
        CurveSummary {
            name: self.name.clone(),
            coordinates: self
                .coordinates()
                .iter()
                .map(|(n, p)| (n.to_string(), p.to_string()))
                .collect(),
            degrees: self.degrees(),
            identity_holds: self.is_identity(),
        }
    }
}

fn checked(curve: A1Curve) -> Result<A1Curve> {
    if curve.is_identity() {
        Ok(curve)
    } else {
        Err(crate::error::invalid(format!(
            "curve {} does not lie on its surface: residual {}",
            curve.name,
            curve.residual()
        )))
    }
}

/// The degree `(2, 2, 1)` curve through a Pell point `(t0, d0, u0)` at parameter 0:
/// `t = (t0+1) u0^4 x^2 + 2 (t0+1) u0^2 x + t0`,
/// `d = (t0+1)^2 u0^2 x^2 + 2 (t0+1)^2 x + d0`, `u = u0^3 x + u0`.
pub fn zapponi_curve(t0: &BigInt, d0: &BigInt, u0: &BigInt) -> Result<A1Curve> {
    if u0.is_zero() || t0 * t0 - d0 * u0 * u0 != BigInt::one() {
        return Err(Error::NotASolution {
            t: t0.to_string(),
            d: d0.to_string(),
            u: u0.to_string(),
        });
    }
    let tp1 = t0 + 1;
    let u02 = u0 * u0;
    let t = Poly::from_coeffs(vec![t0.clone(), &tp1 * &u02 * 2, &tp1 * &u02 * &u02]);
    let d = Poly::from_coeffs(vec![d0.clone(), &tp1 * &tp1 * 2, &tp1 * &tp1 * &u02]);
    let u = Poly::from_coeffs(vec![u0.clone(), &u02 * u0]);
    checked(A1Curve {
        name: format!("zapponi({t0}, {d0}, {u0})"),
        model: CurveModel::Pell { t, d, u },
    })
}

/// `y = 4x^2 + 1`, `u = 2x`, `z = x` on `2uyz = y^2 - u^2 - 1`.
pub fn known_curve_k1() -> A1Curve {
    A1Curve {
        name: "k1".into(),
        model: CurveModel::Surface {
            k: 1,
            y: Poly::from_i64s(&[1, 0, 4]),
            u: Poly::from_i64s(&[0, 2]),
            z: Poly::x(),
        },
    }
}

/// From `eps = (6x^2 + 1) + 2x sqrt(9x^2 + 3)` at `z = 3x`:
/// `y = t + uz = 12x^2 + 1`, `u = 2x` on `2uyz = y^2 - 3u^2 - 1`.
pub fn known_curve_3k() -> A1Curve {
    power_curve_3k(1, 1, 1)
}

/// `(s_t T_n, s_u U_n)` where `T_n + U_n sqrt(9x^2 + 3) = eps^n`, as a curve
/// on the `k = 3` surface with `z = 3x`.
pub fn power_curve_3k(n: u32, sign_t: i64, sign_u: i64) -> A1Curve {
    let a = Poly::from_i64s(&[1, 0, 6]);
    let b = Poly::from_i64s(&[0, 2]);
    let d = Poly::from_i64s(&[3, 0, 9]);
    let (mut tn, mut un) = (Poly::constant(1), Poly::zero());
    for _ in 0..n {
        (tn, un) = (&(&a * &tn) + &(&(&d * &b) * &un), &(&a * &un) + &(&b * &tn));
    }
    let z = Poly::from_i64s(&[0, 3]);
    let t = tn.scale(&BigInt::from(sign_t));
    let u = un.scale(&BigInt::from(sign_u));
    let y = &t + &(&u * &z);
    let name = if n == 1 && sign_t == 1 && sign_u == 1 {
        "3k".to_string()
    } else {
        format!("3k^{n}({sign_t:+},{sign_u:+})")
    };
    A1Curve {
        name,
        model: CurveModel::Surface { k: 3, y, u, z },
    }
}

/// The line `(y, u, z) = (sign, 0, x)`.
pub fn trivial_line(sign: i64) -> A1Curve {
    A1Curve {
        name: format!("trivial({sign:+})"),
        model: CurveModel::Surface {
            k: 3,
            y: Poly::constant(sign),
            u: Poly::zero(),
            z: Poly::x(),
        },
    }
}
