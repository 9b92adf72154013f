//! Integer points on `U: 2uyz = y^2 - 3u^2 - 1`, obtained from
//! `t^2 - (z^2 + 3) u^2 = 1` by `y = t + uz`.

mod curves;
mod diagnostics;
mod intersection;

pub use curves::{
    known_curve_3k, known_curve_k1, power_curve_3k, trivial_line, zapponi_curve, A1Curve,
    CurveModel, CurveSummary,
};
pub use diagnostics::{
    DensityReport, GOLUBEVA_MAX_N,
    count_nucirc_lower, count_sb, golubeva_check, squarefree_density_mod, yamamoto_diagnostic,
    GolubevaReport, SbReport, YamamotoRecord, YamamotoReport, YAMAMOTO_CSV_HEADER,
};
pub use intersection::{intersection_rank_check, BASIS, GEOMETRIC_PICARD_RANK, IntersectionMatrix, RankReport, INTERSECTION_MATRIX};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{is_square_u128, is_squarefree_u64, isqrt_u128};
use crate::error::{invalid, Error, Result};
use crate::pell::fundamental_solution;
use crate::report::ser_display;
use crate::sweep::try_partitioned_filter_map;

/// `d(z) = z^2 + 3`, if it fits.
pub fn d_of_z(z: i64) -> Result<u64> {
    let a = z.unsigned_abs();
    a.checked_mul(a)
        .and_then(|x| x.checked_add(3))
        .filter(|&d| d <= crate::pell::MAX_D)
        .ok_or(Error::DeterminantOutOfRange(u64::MAX))
}

/// A point of `2uyz = y^2 - k u^2 - 1`, checked on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SurfacePoint {
    #[serde(serialize_with = "ser_display")]
    pub y: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub u: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub z: BigInt,
    pub k: i64,
}

pub fn surface_residual(y: &BigInt, u: &BigInt, z: &BigInt, k: i64) -> BigInt {
    BigInt::from(2) * u * y * z - (y * y - u * u * k - 1)
}

impl SurfacePoint {
    pub fn new(y: BigInt, u: BigInt, z: BigInt, k: i64) -> Result<Self> {
        if !surface_residual(&y, &u, &z, k).is_zero() {
            return Err(invalid(format!("({y}, {u}, {z}) is not on 2uyz = y^2 - {k}u^2 - 1")));
        }
        Ok(SurfacePoint { y, u, z, k })
    }

    pub fn height(&self) -> BigInt {
        self.y.abs().max(self.u.abs()).max(self.z.abs())
    }

    /// `t = y - uz`.
    pub fn t(&self) -> BigInt {
        &self.y - &self.u * &self.z
    }
}

/// `(t, u, z) -> (t + uz, u, z)` for `t^2 - (z^2 + k) u^2 = 1`.
pub fn pell_to_surface(t: &BigInt, u: &BigInt, z: &BigInt, k: i64) -> Result<SurfacePoint> {
    let d = z * z + k;
    if t * t - &d * u * u != BigInt::one() {
        return Err(Error::NotASolution {
            t: t.to_string(),
            d: d.to_string(),
            u: u.to_string(),
        });
    }
    SurfacePoint::new(t + u * z, u.clone(), z.clone(), k)
}

/// The point built from the fundamental solution `(t_1, u_1)` of `d(z)`.
#[derive(Debug, Clone, Serialize)]
pub struct Lift {
    pub z: u64,
    pub d: u64,
    #[serde(serialize_with = "ser_display")]
    pub t1: BigUint,
    #[serde(serialize_with = "ser_display")]
    pub u1: BigUint,
    /// `(t_1 - u_1 z, -u_1, z)`, the sign choice that lies on the surface.
    pub point: SurfacePoint,
    /// Whether `(t_1 - u_1 z, +u_1, z)` satisfies the surface equation.
    pub unsigned_point_on_surface: bool,
    #[serde(serialize_with = "ser_display")]
    pub height: BigInt,
    pub u1_exceeds_z: bool,
    pub u1_exceeds_y: bool,
}

impl Lift {
    pub fn height_is_u1(&self) -> bool {
        self.height == BigInt::from(self.u1.clone())
    }
}

fn check_small_branch(z: u64) -> Result<u64> {
    if z == 0 || z.is_multiple_of(3) {
        return Err(invalid(format!("z = {z} must be positive and prime to 3")));
    }
    let d = d_of_z(i64::try_from(z).map_err(|_| Error::DeterminantOutOfRange(u64::MAX))?)?;
    if !is_squarefree_u64(d) {
        return Err(invalid(format!("d(z) = {d} is not square-free")));
    }
    Ok(d)
}

pub fn small_branch_lift(z: u64) -> Result<Lift> {
    let d = check_small_branch(z)?;
    let eps = fundamental_solution(d)?;
    let (t1, u1) = (BigInt::from(eps.t.clone()), BigInt::from(eps.u.clone()));
    let zb = BigInt::from(z);
    let y = &t1 - &u1 * &zb;
    let unsigned_point_on_surface = surface_residual(&y, &u1, &zb, 3).is_zero();
    let point = SurfacePoint::new(y.clone(), -&u1, zb.clone(), 3)?;
    Ok(Lift {
        z,
        d,
        height: point.height(),
        u1_exceeds_z: u1 > zb,
        u1_exceeds_y: u1 > y.abs(),
        point,
        unsigned_point_on_surface,
        t1: eps.t,
        u1: eps.u,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftSweep {
    pub z_max: u64,
    /// Smallest `z_0` such that both flags hold for every qualifying `z >= z_0`.
    pub threshold: Option<u64>,
    /// Qualifying `z` where a flag fails.
    pub exceptions: Vec<u64>,
    pub qualifying: usize,
    /// Qualifying `z >= threshold` whose lift height differs from `u_1`.
    pub height_mismatches: Vec<u64>,
}

/// Lifts for all `2 <= z <= z_max` with `3 ∤ z` and `d(z)` square-free.
pub fn lift_sweep(z_max: u64, partitions: usize) -> Result<LiftSweep> {
    let lifts = try_partitioned_filter_map(1..=z_max, partitions, |z| {
        if check_small_branch(z).is_err() {
            return Ok(None);
        }
        let l = small_branch_lift(z)?;
        Ok::<_, Error>(Some((z, l.u1_exceeds_z && l.u1_exceeds_y, l.height_is_u1())))
    })?;
    let exceptions: Vec<u64> = lifts.iter().filter(|l| !l.1).map(|l| l.0).collect();
    let threshold = match exceptions.last() {
        Some(&last) => lifts.iter().map(|l| l.0).find(|&z| z > last),
        None => lifts.first().map(|l| l.0),
    };
    let height_mismatches = lifts
        .iter()
        .filter(|l| threshold.is_some_and(|t| l.0 >= t) && !l.2)
        .map(|l| l.0)
        .collect();
    Ok(LiftSweep {
        z_max,
        threshold,
        exceptions,
        qualifying: lifts.len(),
        height_mismatches,
    })
}

/// Outcome of the membership criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    OnKnownCurve { curve: A1Curve, parameter: BigInt },
    NotOnAnyIntegerCurve,
    Undetermined,
}

impl Membership {
    pub fn label(&self) -> &'static str {
        match self {
            Membership::OnKnownCurve { .. } => "on_known_curve",
            Membership::NotOnAnyIntegerCurve => "not_on_any_integer_curve",
            Membership::Undetermined => "undetermined",
        }
    }
}

/// Verdict for a solution of `t^2 - (z^2 + 3) u^2 = 1`.
///
/// `u = 0` lies on a trivial line; `3 | z` (with `z != 0`) on a power of the
/// `z = 3x` family; `3 ∤ z` with `d(z)` square-free and `u != 0` is on no
/// curve over the integers. Everything else is left undetermined.
pub fn a1_membership(t: &BigInt, u: &BigInt, z: i64) -> Result<Membership> {
    let d = d_of_z(z)?;
    if t * t - BigInt::from(d) * u * u != BigInt::one() {
        return Err(Error::NotASolution {
            t: t.to_string(),
            d: d.to_string(),
            u: u.to_string(),
        });
    }
    if u.is_zero() {
        let sign = if t.is_positive() { 1 } else { -1 };
        return Ok(Membership::OnKnownCurve {
            curve: trivial_line(sign),
            parameter: BigInt::from(z),
        });
    }
    if z % 3 != 0 {
        return Ok(if is_squarefree_u64(d) {
            Membership::NotOnAnyIntegerCurve
        } else {
            Membership::Undetermined
        });
    }
    if z == 0 {
        return Ok(Membership::Undetermined);
    }
    // |t| + |u| sqrt(d) = eps^n with eps = (6x^2 + 1) + 2x sqrt(d), x = z/3.
    let x = BigInt::from(z / 3);
    let (ta, ua) = (t.abs(), u.abs());
    let a: BigInt = &x * &x * 6 + 1;
    let b: BigInt = x.abs() * 2;
    let db = BigInt::from(d);
    let (mut tn, mut un) = (a.clone(), b.clone());
    let mut n = 1u32;
    while tn < ta {
        (tn, un) = (&a * &tn + &db * &b * &un, &a * &un + &b * &tn);
        n += 1;
    }
    if tn != ta || un != ua {
        return Ok(Membership::Undetermined);
    }
    let sign = |v: &BigInt| if v.sign() == Sign::Minus { -1 } else { 1 };
    // U_n(x) is odd in x, so a negative x flips the sign of u.
    let su = if x.is_negative() { -sign(u) } else { sign(u) };
    let curve = power_curve_3k(n, sign(t), su);
    let expected = [t + u * BigInt::from(z), u.clone(), BigInt::from(z)];
    if curve.eval(&x) != expected || !curve.is_identity() {
        return Ok(Membership::Undetermined);
    }
    Ok(Membership::OnKnownCurve { curve, parameter: x })
}

/// A point of `U` with its verdict, as emitted in point lists.
#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub y: i64,
    pub u: i64,
    pub z: i64,
    pub verdict: &'static str,
}

pub const POINT_CSV_HEADER: [&str; 4] = ["y", "u", "z", "verdict"];

/// All points of `U` with `max(|y|, |u|, |z|) <= B`, ordered by `(z, u, y)`.
pub fn enumerate_surface_points(b: u64, partitions: usize) -> Result<Vec<(SurfacePoint, Membership)>> {
    if !(1..=1 << 20).contains(&b) {
        return Err(invalid(format!("B = {b} outside 1..=2^20")));
    }
    let bi = b as i64;
    // partition over z + B in 0..=2B
    let rows = try_partitioned_filter_map(0..=2 * b, partitions, |zi| {
        let z = zi as i64 - bi;
        let mut row = Vec::new();
        for u in -bi..=bi {
            let ys: Vec<i64> = if u == 0 {
                vec![-1, 1]
            } else {
                // y^2 - 2uz y - (3u^2 + 1) = 0; discriminant / 4 = u^2 (z^2 + 3) + 1
                let s2 = (u as i128).pow(2) as u128 * ((z as i128).pow(2) as u128 + 3) + 1;
                if !is_square_u128(s2) {
                    continue;
                }
                let s = isqrt_u128(s2) as i128;
                let c = u as i128 * z as i128;
                let mut v = vec![c - s, c + s];
                v.retain(|y| y.unsigned_abs() <= b as u128);
                v.into_iter().map(|y| y as i64).collect()
            };
            for y in ys {
                let p = SurfacePoint::new(y.into(), u.into(), z.into(), 3)?;
                let m = a1_membership(&p.t(), &p.u, z)?;
                row.push((p, m));
            }
        }
        Ok::<_, Error>(Some(row))
    })?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn point_records(points: &[(SurfacePoint, Membership)]) -> Vec<PointRecord> {
    let small = |x: &BigInt| i64::try_from(x).expect("enumerated coordinates fit in i64");
    points
        .iter()
        .map(|(p, m)| PointRecord {
            y: small(&p.y),
            u: small(&p.u),
            z: small(&p.z),
            verdict: m.label(),
        })
        .collect()
}
