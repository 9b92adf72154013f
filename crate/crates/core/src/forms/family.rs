//! Both sides of `h(d) log eps_d = c sqrt(d) L_d(1)`, the sweep that pins the
//! class-counting convention and `c`, and class-number sums over `z^2 + 3`.

use serde::Serialize;

use super::lvalue::{l_value_with_cap, LValue, DEFAULT_MAX_TERMS};
use super::{class_counts, ClassCounts};
use crate::arith::is_squarefree_u64;
use crate::error::{invalid, Error, Result};
use crate::pell::{fundamental_solution, fundamental_unit_pm};
use crate::report::ser_f64;
use crate::sweep::try_partitioned_filter_map;

/// Which cycle count plays the role of `h(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Proper equivalence classes.
    Narrow,
    /// `f` and `-f` identified.
    IdentifyNegation,
}

impl Convention {
    pub fn identify_negation(self) -> bool {
        matches!(self, Convention::IdentifyNegation)
    }

    pub fn pick(self, counts: &ClassCounts) -> u64 {
        match self {
            Convention::Narrow => counts.narrow,
            Convention::IdentifyNegation => counts.identified,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassNumberReport {
    pub d: u64,
    pub h_narrow: u64,
    pub h_identified: u64,
    pub self_negating_cycles: u64,
    pub convention: Convention,
    pub negative_pell: bool,
    pub l_value: LValue,
    #[serde(serialize_with = "ser_f64")]
    pub log_eps: f64,
    /// `sqrt(d) L_d(1) / (h log eps_d)` with `h` from `convention`.
    #[serde(serialize_with = "ser_f64")]
    pub formula_ratio: f64,
    #[serde(serialize_with = "ser_f64")]
    pub ratio_radius: f64,
}

impl ClassNumberReport {
    pub fn ratio_for(&self, convention: Convention) -> f64 {
        let h = match convention {
            Convention::Narrow => self.h_narrow,
            Convention::IdentifyNegation => self.h_identified,
        };
        (self.d as f64).sqrt() * self.l_value.value / (h as f64 * self.log_eps)
    }

    /// `c sqrt(d) L / log eps` as an interval.
    pub fn analytic_interval(&self, constant: f64) -> (f64, f64) {
        let scale = constant * (self.d as f64).sqrt() / self.log_eps;
        let slack = 1.0 + 1e-13;
        (scale * self.l_value.lo() / slack, scale * self.l_value.hi() * slack)
    }

    /// The nearest integer to the analytic value, if the certified interval
    /// pins it down.
    pub fn analytic_h(&self, constant: f64) -> Option<u64> {
        let (lo, hi) = self.analytic_interval(constant);
        let h = ((lo + hi) / 2.0).round();
        (h - 0.5 < lo && hi < h + 0.5 && h >= 1.0).then_some(h as u64)
    }
}

/// Cycle counts, `L_d(1)` to absolute error `l_target` and `log eps_d`.
pub fn class_formula_ratio(d: u64, convention: Convention, l_target: f64) -> Result<ClassNumberReport> {
    report_with_cap(d, convention, l_target, DEFAULT_MAX_TERMS)
}

fn report_with_cap(d: u64, convention: Convention, l_target: f64, cap: u64) -> Result<ClassNumberReport> {
    let counts = class_counts(d)?;
    let l = l_value_with_cap(d, l_target, cap)?;
    let unit = fundamental_unit_pm(d)?;
    let log_eps = fundamental_solution(d)?.log();
    let h = convention.pick(&counts) as f64;
    let scale = (d as f64).sqrt() / (h * log_eps);
    let formula_ratio = scale * l.value;
    Ok(ClassNumberReport {
        d,
        h_narrow: counts.narrow,
        h_identified: counts.identified,
        self_negating_cycles: counts.self_negating,
        convention,
        negative_pell: unit.norm == -1,
        l_value: l,
        log_eps,
        formula_ratio,
        ratio_radius: scale * l.radius + 1e-13 * formula_ratio.abs(),
    })
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct RatioStats {
    pub count: usize,
    #[serde(serialize_with = "ser_f64")]
    pub mean: f64,
    /// Sample standard deviation.
    #[serde(serialize_with = "ser_f64")]
    pub std_dev: f64,
    #[serde(serialize_with = "ser_f64")]
    pub min: f64,
    #[serde(serialize_with = "ser_f64")]
    pub max: f64,
}

impl RatioStats {
    fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return RatioStats::default();
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        RatioStats {
            count: n,
            mean,
            std_dev: var.sqrt(),
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Outcome of the convention sweep.
#[derive(Debug, Clone, Serialize)]
pub struct Reconciliation {
    pub convention: Convention,
    /// `c` in `h = c sqrt(d) L_d(1) / log eps_d`, i.e. the reciprocal mean ratio.
    #[serde(serialize_with = "ser_f64")]
    pub constant: f64,
    pub narrow: RatioStats,
    pub identified: RatioStats,
    /// Identified-convention ratios split by solvability of `t^2 - d u^2 = -1`.
    pub identified_negative_pell: RatioStats,
    pub identified_no_negative_pell: RatioStats,
}

/// Computes both ratios over `ds` and keeps the convention whose ratio has
/// the smaller spread.
pub fn reconcile_convention(ds: &[u64], l_target: f64, partitions: usize) -> Result<Reconciliation> {
    if ds.is_empty() {
        return Err(invalid("reconciliation needs at least one determinant"));
    }
    let reports = try_partitioned_filter_map(0..=(ds.len() as u64 - 1), partitions, |i| {
        class_formula_ratio(ds[i as usize], Convention::Narrow, l_target).map(Some)
    })?;
    let narrow: Vec<f64> = reports.iter().map(|r| r.ratio_for(Convention::Narrow)).collect();
    let ident: Vec<f64> = reports
        .iter()
        .map(|r| r.ratio_for(Convention::IdentifyNegation))
        .collect();
    let split = |neg: bool| -> Vec<f64> {
        reports
            .iter()
            .filter(|r| r.negative_pell == neg)
            .map(|r| r.ratio_for(Convention::IdentifyNegation))
            .collect()
    };
    let narrow = RatioStats::of(&narrow);
    let identified = RatioStats::of(&ident);
    let (convention, stats) = if narrow.std_dev <= identified.std_dev {
        (Convention::Narrow, narrow)
    } else {
        (Convention::IdentifyNegation, identified)
    };
    Ok(Reconciliation {
        convention,
        constant: 1.0 / stats.mean,
        narrow,
        identified,
        identified_negative_pell: RatioStats::of(&split(true)),
        identified_no_negative_pell: RatioStats::of(&split(false)),
    })
}

pub const FAMILY_CSV_HEADER: [&str; 7] = [
    "z",
    "d",
    "h_narrow",
    "h_identified",
    "log_eps",
    "L_value",
    "formula_ratio",
];

/// One term of the sum over `d = z^2 + 3`.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyRecord {
    pub z: u64,
    pub d: u64,
    pub h_narrow: u64,
    pub h_identified: u64,
    #[serde(serialize_with = "ser_f64")]
    pub log_eps: f64,
    #[serde(rename = "L_value", serialize_with = "ser_f64")]
    pub l_value: f64,
    #[serde(serialize_with = "ser_f64")]
    pub formula_ratio: f64,
    #[serde(skip)]
    pub l_radius: f64,
    /// Rounded analytic class number, when certified.
    #[serde(skip)]
    pub h_analytic: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct FamilyOptions {
    pub convention: Convention,
    /// `c` from [`reconcile_convention`].
    pub constant: f64,
    pub partitions: usize,
    /// Keep only `z = r mod m`.
    pub congruence: Option<(u64, u64)>,
    pub max_terms: u64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            convention: Convention::Narrow,
            constant: 2.0,
            partitions: 1,
            congruence: None,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub z_max: u64,
    pub convention: Convention,
    pub sum: u64,
    pub sum_narrow: u64,
    pub sum_identified: u64,
    pub terms: usize,
    /// `Z^{9/5} (log Z)^{3/5}`, for comparison only.
    #[serde(serialize_with = "ser_f64")]
    pub conditional_bound: f64,
    /// `Z^2 (log Z)^{-2}`, for comparison only.
    #[serde(serialize_with = "ser_f64")]
    pub trivial_bound: f64,
    /// `z` whose cycle count and analytic value disagree or were not certified.
    pub disagreements: Vec<u64>,
    #[serde(skip)]
    pub records: Vec<FamilyRecord>,
}

impl FamilyReport {
    pub fn all_agree(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Sum of `h(z^2 + 3)` over `2 <= z <= Z` with `3 ∤ z` and `z^2 + 3` square-free.
pub fn h_sum_family(z_max: u64, opts: &FamilyOptions) -> Result<FamilyReport> {
    if z_max < 2 {
        return Err(invalid("h_sum_family needs Z >= 2"));
    }
    if z_max > 3_000_000_000 {
        return Err(Error::DeterminantOutOfRange(u64::MAX));
    }
    if let Some((m, r)) = opts.congruence {
        if m == 0 || r >= m {
            return Err(invalid(format!("bad congruence filter z = {r} mod {m}")));
        }
    }
    let records = try_partitioned_filter_map(1..=z_max, opts.partitions, |z| {
        if z % 3 == 0 || opts.congruence.is_some_and(|(m, r)| z % m != r) {
            return Ok(None);
        }
        let d = z * z + 3;
        if !is_squarefree_u64(d) {
            return Ok(None);
        }
        let counts = class_counts(d)?;
        let log_eps = fundamental_solution(d)?.log();
        // Enough accuracy for the rounded analytic value to be certified.
        let target = 0.2 * log_eps / (opts.constant * (d as f64).sqrt());
        let l = l_value_with_cap(d, target, opts.max_terms)?;
        let h = opts.convention.pick(&counts);
        let report = ClassNumberReport {
            d,
            h_narrow: counts.narrow,
            h_identified: counts.identified,
            self_negating_cycles: counts.self_negating,
            convention: opts.convention,
            negative_pell: false,
            l_value: l,
            log_eps,
            formula_ratio: (d as f64).sqrt() * l.value / (h as f64 * log_eps),
            ratio_radius: 0.0,
        };
        Ok::<_, Error>(Some(FamilyRecord {
            z,
            d,
            h_narrow: counts.narrow,
            h_identified: counts.identified,
            log_eps,
            l_value: l.value,
            formula_ratio: report.formula_ratio,
            l_radius: l.radius,
            h_analytic: report.analytic_h(opts.constant),
        }))
    })?;
    let pick = |r: &FamilyRecord| match opts.convention {
        Convention::Narrow => r.h_narrow,
        Convention::IdentifyNegation => r.h_identified,
    };
    let disagreements = records
        .iter()
        .filter(|r| r.h_analytic != Some(pick(r)))
        .map(|r| r.z)
        .collect();
    let lz = (z_max as f64).ln();
    Ok(FamilyReport {
        z_max,
        convention: opts.convention,
        sum: records.iter().map(pick).sum(),
        sum_narrow: records.iter().map(|r| r.h_narrow).sum(),
        sum_identified: records.iter().map(|r| r.h_identified).sum(),
        terms: records.len(),
        conditional_bound: (z_max as f64).powf(1.8) * lz.powf(0.6),
        trivial_bound: (z_max as f64).powi(2) / (lz * lz),
        disagreements,
        records,
    })
}
