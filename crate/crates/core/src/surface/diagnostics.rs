//! Sweeps over `d(z) = z^2 + 3`: lower bounds for points of bounded height,
//! the set `S(B)`, the Golubeva upper bound for `z = 3^n + 1`, and the
//! Yamamoto-type ratio `log eps / (log sf)^2`.

use std::cmp::Ordering;
use std::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{check_small_branch, d_of_z};
use crate::arith::{is_squarefree_u64, squarefree_part_u64};
use crate::error::{invalid, Error, Result};
use crate::pell::{fundamental_solution, fundamental_solution_bounded, log_unit_u128, surd_le_integer};
use crate::report::{ser_display, ser_f64};
use crate::sweep::{partitioned_sum, try_partitioned_filter_map};

/// `#{z <= B : 3 ∤ z, d(z) square-free, eps_{d(z)} <= B}`, with the
/// comparison against `B` done exactly.
pub fn count_nucirc_lower(b: u64, partitions: usize) -> Result<u64> {
    if b < 2 {
        return Err(invalid(format!("B must be >= 2, got {b}")));
    }
    if b > 1 << 40 {
        return Err(invalid(format!("B = {b} is beyond the supported range")));
    }
    let hits = try_partitioned_filter_map(1..=b, partitions, |z| {
        let Ok(d) = check_small_branch(z) else {
            return Ok(None);
        };
        // t_1 < eps_d <= B
        let Some((t, u)) = fundamental_solution_bounded(d, b as u128)? else {
            return Ok(None);
        };
        let ok = surd_le_integer(&BigUint::from(t), &BigUint::from(u), d, &BigUint::from(b));
        Ok::<_, Error>(ok.then_some(z))
    })?;
    Ok(hits.len() as u64)
}

#[derive(Debug, Clone, Serialize)]
pub struct SbReport {
    #[serde(serialize_with = "ser_f64")]
    pub log_b: f64,
    #[serde(serialize_with = "ser_f64")]
    pub epsilon: f64,
    /// `floor((log B)^{4 + epsilon})`.
    pub z_max: u64,
    /// `z <= z_max` with `3 ∤ z` and `d(z)` square-free.
    pub qualifying: u64,
    /// Those with `log eps_{d(z)} <= log B`.
    pub count: u64,
    /// Qualifying `z` with `log eps_{d(z)} > log B`.
    pub complement: Vec<u64>,
}

/// `S(B)` for `B = e^{log_b}`.
pub fn count_sb(log_b: f64, epsilon: f64, partitions: usize) -> Result<SbReport> {
    if !(log_b >= 16f64.ln() && log_b.is_finite()) {
        return Err(invalid(format!("need B >= 16, got log B = {log_b}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let z_max_f = log_b.powf(4.0 + epsilon).floor();
    if z_max_f > 1e7 {
        return Err(invalid(format!("(log B)^(4+eps) = {z_max_f:e} is beyond the sweep cap 1e7")));
    }
    let z_max = z_max_f as u64;
    // log B < 4e7^(1/4) < 80, so every t_1 that matters fits in u128.
    let t_max = log_b.exp().floor() as u128 + 1;
    let rows = try_partitioned_filter_map(1..=z_max.max(1), partitions, |z| {
        let Ok(d) = check_small_branch(z) else {
            return Ok(None);
        };
        let small = match fundamental_solution_bounded(d, t_max)? {
            Some((t, _)) => log_unit_u128(t) <= log_b,
            None => false,
        };
        Ok::<_, Error>(Some((z, small)))
    })?;
    let rows: Vec<_> = rows.into_iter().filter(|r| r.0 <= z_max).collect();
    Ok(SbReport {
        log_b,
        epsilon,
        z_max,
        qualifying: rows.len() as u64,
        count: rows.iter().filter(|r| r.1).count() as u64,
        complement: rows.iter().filter(|r| !r.1).map(|r| r.0).collect(),
    })
}

/// `a + b sqrt(d)` with rational parts.
#[derive(Debug, Clone, PartialEq)]
struct Surd {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl Surd {
    fn new(a: BigRational, b: BigRational, d: &BigInt) -> Self {
        Surd { a, b, d: d.clone() }
    }

    fn int(a: i64, b: i64, d: &BigInt) -> Self {
        Surd::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()), d)
    }

    fn scale(&self, q: &BigRational) -> Self {
        Surd::new(&self.a * q, &self.b * q, &self.d)
    }

    fn pow(&self, n: u32) -> Self {
        let mut acc = Surd::int(1, 0, &self.d);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    fn conj(&self) -> Self {
        Surd::new(self.a.clone(), -&self.b, &self.d)
    }

    fn signum(&self) -> Ordering {
        let d = BigRational::from_integer(self.d.clone());
        let (sa, sb) = (self.a.cmp(&BigRational::zero()), self.b.cmp(&BigRational::zero()));
        match (sa, sb) {
            (x, Ordering::Equal) => x,
            (Ordering::Equal, y) => y,
            (x, y) if x == y => x,
            // |a| vs |b| sqrt(d)
            (x, _) => {
                let c = (&self.a * &self.a).cmp(&(&self.b * &self.b * d));
                match c {
                    Ordering::Greater => x,
                    Ordering::Less => x.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// Floating value, avoiding cancellation when the parts have opposite signs.
    fn to_f64(&self) -> f64 {
        let sd = self.d.to_f64().unwrap_or(f64::NAN).sqrt();
        let (a, b) = (self.a.to_f64().unwrap_or(f64::NAN), self.b.to_f64().unwrap_or(f64::NAN));
        if a.signum() == b.signum() || a == 0.0 || b == 0.0 {
            return a + b * sd;
        }
        let norm = (&self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone()))
            .to_f64()
            .unwrap_or(f64::NAN);
        norm / (a - b * sd)
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, o: &Surd) -> Surd {
        Surd::new(&self.a + &o.a, &self.b + &o.b, &self.d)
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, o: &Surd) -> Surd {
        let d = BigRational::from_integer(self.d.clone());
        Surd::new(
            &self.a * &o.a + &self.b * &o.b * d,
            &self.a * &o.b + &self.b * &o.a,
            &self.d,
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GolubevaReport {
    pub n: u32,
    pub z: u64,
    pub d: u64,
    pub holds: bool,
    /// `rhs - eps` is exactly zero.
    pub equality: bool,
    /// `(rhs - eps) / eps`.
    #[serde(serialize_with = "ser_f64")]
    pub relative_slack: f64,
    #[serde(serialize_with = "ser_f64")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_f64")]
    pub rhs: f64,
    /// The right-hand side as `a + b sqrt(d)`.
    #[serde(serialize_with = "ser_display")]
    pub rhs_a: BigRational,
    #[serde(serialize_with = "ser_display")]
    pub rhs_b: BigRational,
}

/// Largest `n` accepted by [`golubeva_check`].
pub const GOLUBEVA_MAX_N: u32 = 8;

/// `eps_{d(z)} <= 2 ((z + sqrt d)/3)^n ((2 + sqrt d)/(z + 1)) ((z - 1 + sqrt d)/2))^2`
/// for `z = 3^n + 1`, in exact arithmetic over `Q(sqrt d)`.
pub fn golubeva_check(n: u32) -> Result<GolubevaReport> {
    if !(1..=GOLUBEVA_MAX_N).contains(&n) {
        return Err(invalid(format!("n must be in 1..={GOLUBEVA_MAX_N}, got {n}")));
    }
    let z = 3u64.pow(n) + 1;
    let d = d_of_z(z as i64)?;
    let db = BigInt::from(d);
    let zi = z as i64;
    let q = |num: i64, den: i64| BigRational::new(num.into(), den.into());
    let x = Surd::int(zi, 1, &db).scale(&q(1, 3));
    let y = Surd::int(2, 1, &db).scale(&q(1, zi + 1));
    let w = Surd::int(zi - 1, 1, &db).scale(&q(1, 2));
    let inner = &(&x.pow(n) * &y) * &w;
    let rhs = (&inner * &inner).scale(&q(2, 1));

    let eps = fundamental_solution(d)?;
    let lhs = Surd::new(
        BigRational::from_integer(BigInt::from(eps.t.clone())),
        BigRational::from_integer(BigInt::from(eps.u.clone())),
        &db,
    );
    let diff = &rhs + &lhs.scale(&q(-1, 1));
    let sign = diff.signum();
    // (rhs - eps) / eps = (rhs - eps) * conj(eps), since eps has norm 1.
    let relative = &diff * &lhs.conj();
    let lhs_f = eps.log().exp();
    let slack = if sign == Ordering::Equal { 0.0 } else { relative.to_f64() };
    Ok(GolubevaReport {
        n,
        z,
        d,
        holds: sign != Ordering::Less,
        equality: sign == Ordering::Equal,
        relative_slack: slack,
        lhs: lhs_f,
        rhs: lhs_f * (1.0 + slack),
        rhs_a: rhs.a,
        rhs_b: rhs.b,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct YamamotoRecord {
    pub z: u64,
    pub d: u64,
    #[serde(serialize_with = "ser_f64")]
    pub log_eps: f64,
    /// Square-free part of `d(z)`.
    pub sf: u64,
    /// `log eps / (log sf)^2`.
    #[serde(serialize_with = "ser_f64")]
    pub ratio: f64,
}

pub const YAMAMOTO_CSV_HEADER: [&str; 5] = ["z", "d", "log_eps", "sf", "ratio"];

#[derive(Debug, Clone, Serialize)]
pub struct YamamotoReport {
    pub z_max: u64,
    #[serde(serialize_with = "ser_f64")]
    pub min_ratio: f64,
    pub argmin_z: u64,
    #[serde(skip)]
    pub records: Vec<YamamotoRecord>,
}

/// `log eps_{d(z)}` against `(log sf(d(z)))^2` for `2 <= z <= Z`, `3 ∤ z`.
pub fn yamamoto_diagnostic(z_max: u64, partitions: usize) -> Result<YamamotoReport> {
    if z_max < 2 {
        return Err(invalid(format!("Z must be >= 2, got {z_max}")));
    }
    let records = try_partitioned_filter_map(2..=z_max, partitions, |z| {
        if z % 3 == 0 {
            return Ok(None);
        }
        let d = d_of_z(i64::try_from(z).map_err(|_| Error::DeterminantOutOfRange(u64::MAX))?)?;
        let log_eps = fundamental_solution(d)?.log();
        let sf = squarefree_part_u64(d);
        let l = (sf as f64).ln();
        Ok::<_, Error>(Some(YamamotoRecord {
            z,
            d,
            log_eps,
            sf,
            ratio: log_eps / (l * l),
        }))
    })?;
    let (min_ratio, argmin_z) = records
        .iter()
        .filter(|r| r.ratio > 0.0)
        .map(|r| (r.ratio, r.z))
        .fold((f64::INFINITY, 0), |acc, x| if x.0 < acc.0 { x } else { acc });
    Ok(YamamotoReport {
        z_max,
        min_ratio,
        argmin_z,
        records,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityReport {
    pub z_max: u64,
    pub modulus: u64,
    pub residue: u64,
    pub in_class: u64,
    pub squarefree: u64,
    #[serde(serialize_with = "ser_f64")]
    pub density: f64,
}

/// Proportion of `z <= Z`, `z = r mod m`, with `d(z)` square-free.
pub fn squarefree_density_mod(z_max: u64, modulus: u64, residue: u64, partitions: usize) -> Result<DensityReport> {
    if modulus == 0 || residue >= modulus {
        return Err(invalid(format!("bad residue class {residue} mod {modulus}")));
    }
    if z_max > 3_000_000_000 {
        return Err(Error::DeterminantOutOfRange(u64::MAX));
    }
    let in_class = partitioned_sum(1..=z_max, partitions, |z| u64::from(z % modulus == residue));
    let squarefree = partitioned_sum(1..=z_max, partitions, |z| {
        u64::from(z % modulus == residue && is_squarefree_u64(z * z + 3))
    });
    Ok(DensityReport {
        z_max,
        modulus,
        residue,
        in_class,
        squarefree,
        density: if in_class == 0 { 0.0 } else { squarefree as f64 / in_class as f64 },
    })
}
