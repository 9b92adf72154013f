//! Indefinite binary quadratic forms `a x^2 + 2b xy + c y^2` of determinant
//! `d = b^2 - ac`, and class numbers counted as cycles of reduced forms.
//!
//! A form with even middle coefficient `2b` is the same object as the form
//! `(a, 2b, c)` of discriminant `4d`, so the usual indefinite reduction theory
//! applies after halving the middle coefficient. A form is reduced when
//! `0 < b < sqrt(d)` and `sqrt(d) - b < |a| < sqrt(d) + b`.

mod family;
mod lvalue;

pub use family::{
    class_formula_ratio, h_sum_family, reconcile_convention, ClassNumberReport, Convention,
    FamilyOptions, FamilyRecord, FamilyReport, Reconciliation, FAMILY_CSV_HEADER,
};
pub use lvalue::{l_value, l_value_with_cap, LValue, OddCharacter, DEFAULT_MAX_TERMS};

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{divisors_from, factorize_u64, isqrt_u64};
use crate::error::{invalid, Error, Result};
use crate::pell::check_d;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IndefiniteForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for IndefiniteForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl IndefiniteForm {
    /// Validates that `b^2 - ac` is a positive non-square within range.
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = IndefiniteForm { a, b, c };
        f.checked_determinant()?;
        Ok(f)
    }

    pub fn determinant(&self) -> i128 {
        self.b as i128 * self.b as i128 - self.a as i128 * self.c as i128
    }

    fn checked_determinant(&self) -> Result<u64> {
        let det = self.determinant();
        if det <= 0 || det > i64::MAX as i128 {
            return Err(invalid(format!("form {self} has determinant {det}, need 2 <= d <= 2^63-1")));
        }
        let d = det as u64;
        check_d(d)?;
        Ok(d)
    }

    /// `gcd(a, 2b, c) = 1`.
    pub fn is_properly_primitive(&self) -> bool {
        self.a.gcd(&(2 * self.b)).gcd(&self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let Ok(d) = self.checked_determinant() else {
            return false;
        };
        is_reduced_with(self, isqrt_u64(d) as i64)
    }

    pub fn value(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + 2 * self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// The form `-f`, written as the properly equivalent `(-c, b, -a)` so that
    /// reduced forms stay reduced.
    pub fn negated(&self) -> Self {
        IndefiniteForm {
            a: -self.c,
            b: self.b,
            c: -self.a,
        }
    }

    /// One reduction step `(a, b, c) -> (c, b', (b'^2 - d) / c)` with
    /// `b' = -b mod c` normalized as in Buchmann-Vollmer.
    fn rho(&self, d: u64, s: i64, two_root: i64) -> Self {
        let c = self.c;
        let ac = c.abs();
        let r = (-self.b).rem_euclid(ac);
        let b2 = if ac > two_root {
            // -|c|/2 < b' <= |c|/2
            if 2 * r > ac {
                r - ac
            } else {
                r
            }
        } else {
            // largest b' < sqrt(d) in the residue class
            r + (s - r).div_euclid(ac) * ac
        };
        let c2 = ((b2 as i128 * b2 as i128 - d as i128) / c as i128) as i64;
        IndefiniteForm { a: c, b: b2, c: c2 }
    }
}

fn is_reduced_with(f: &IndefiniteForm, s: i64) -> bool {
    let aa = f.a.abs();
    f.b > 0 && f.b <= s && aa + f.b > s && aa - f.b <= s
}

struct Roots {
    d: u64,
    s: i64,
    two_root: i64,
}

impl Roots {
    fn new(d: u64) -> Self {
        Roots {
            d,
            s: isqrt_u64(d) as i64,
            two_root: isqrt_u64(4 * d) as i64,
        }
    }

    fn rho(&self, f: &IndefiniteForm) -> IndefiniteForm {
        f.rho(self.d, self.s, self.two_root)
    }
}

/// Applies reduction steps until the form is reduced.
pub fn reduce(form: &IndefiniteForm) -> Result<IndefiniteForm> {
    let d = form.checked_determinant()?;
    if 4 * (d as u128) > i64::MAX as u128 {
        return Err(Error::DeterminantOutOfRange(d));
    }
    let roots = Roots::new(d);
    let mut f = *form;
    // Each step roughly halves |a| until the form is reduced.
    for _ in 0..10_000 {
        if is_reduced_with(&f, roots.s) {
            return Ok(f);
        }
        f = roots.rho(&f);
    }
    Err(invalid(format!("reduction of {form} did not terminate")))
}

/// All reduced, properly primitive forms of determinant `d`, sorted.
pub fn reduced_forms(d: u64) -> Result<Vec<IndefiniteForm>> {
    check_d(d)?;
    if d > (i64::MAX as u64) / 4 {
        return Err(Error::DeterminantOutOfRange(d));
    }
    let s = isqrt_u64(d) as i64;
    let mut out = Vec::new();
    for b in 1..=s {
        let n = d - (b * b) as u64;
        let lo = (s - b + 1) as u64;
        let hi = (s + b) as u64;
        for a in divisors_from(&factorize_u64(n)) {
            if a < lo || a > hi {
                continue;
            }
            let c = (n / a) as i64;
            let a = a as i64;
            for f in [
                IndefiniteForm { a, b, c: -c },
                IndefiniteForm { a: -a, b, c },
            ] {
                if f.is_properly_primitive() {
                    out.push(f);
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Reduced forms of determinant `d` grouped into rho-cycles.
#[derive(Debug, Clone)]
pub struct CycleStructure {
    pub d: u64,
    pub cycles: Vec<Vec<IndefiniteForm>>,
    index: HashMap<IndefiniteForm, usize>,
}

impl CycleStructure {
    pub fn new(d: u64) -> Result<Self> {
        let forms = reduced_forms(d)?;
        let roots = Roots::new(d);
        let mut index: HashMap<IndefiniteForm, usize> = HashMap::with_capacity(forms.len());
        let mut cycles = Vec::new();
        for f in &forms {
            if index.contains_key(f) {
                continue;
            }
            let id = cycles.len();
            let mut cycle = Vec::new();
            let mut g = *f;
            loop {
                if index.insert(g, id).is_some() {
                    return Err(invalid(format!("rho is not a permutation at {g}, d = {d}")));
                }
                cycle.push(g);
                g = roots.rho(&g);
                if g == *f {
                    break;
                }
                if cycle.len() > forms.len() {
                    return Err(invalid(format!("rho orbit of {f} left the reduced set, d = {d}")));
                }
            }
            cycles.push(cycle);
        }
        Ok(CycleStructure { d, cycles, index })
    }

    pub fn cycle_of(&self, f: &IndefiniteForm) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn successor(&self, f: &IndefiniteForm) -> IndefiniteForm {
        Roots::new(self.d).rho(f)
    }

    pub fn num_forms(&self) -> usize {
        self.index.len()
    }

    pub fn counts(&self) -> ClassCounts {
        let narrow = self.cycles.len() as u64;
        let mut self_negating = 0u64;
        let mut merged = 0u64;
        for (id, cycle) in self.cycles.iter().enumerate() {
            let partner = self.index[&cycle[0].negated()];
            if partner == id {
                self_negating += 1;
                merged += 1;
            } else if partner > id {
                merged += 1;
            }
        }
        ClassCounts {
            narrow,
            identified: merged,
            self_negating,
        }
    }
}

/// Cycle counts for one determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    /// Proper equivalence classes.
    pub narrow: u64,
    /// Classes after identifying `f` with `-f`.
    pub identified: u64,
    /// Cycles that contain the negative of their own forms.
    pub self_negating: u64,
}

pub fn class_counts(d: u64) -> Result<ClassCounts> {
    Ok(CycleStructure::new(d)?.counts())
}

/// Number of properly primitive classes of determinant `d`.
pub fn class_number(d: u64, identify_negation: bool) -> Result<u64> {
    let counts = class_counts(d)?;
    Ok(if identify_negation {
        counts.identified
    } else {
        counts.narrow
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_square_u64;

    fn brute_reduced(d: u64) -> Vec<IndefiniteForm> {
        let s = isqrt_u64(d) as i64;
        let bound = 2 * s + 2;
        let mut out = Vec::new();
        for a in -bound..=bound {
            for b in 1..=s {
                if a == 0 {
                    continue;
                }
                let num = b * b - d as i64;
                if num % a != 0 {
                    continue;
                }
                let f = IndefiniteForm { a, b, c: num / a };
                let root = (d as f64).sqrt();
                let exact = (b as f64) < root
                    && root - (b as f64) < a.abs() as f64
                    && (a.abs() as f64) < root + b as f64;
                if exact && f.is_properly_primitive() {
                    out.push(f);
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn reduced_enumeration_matches_brute() {
        for d in 2..=400u64 {
            if is_square_u64(d) {
                continue;
            }
            assert_eq!(reduced_forms(d).unwrap(), brute_reduced(d), "d={d}");
        }
    }

    #[test]
    fn reduce_examples() {
        let f = reduce(&IndefiniteForm::new(1, 0, -2).unwrap()).unwrap();
        assert!(f.is_reduced());
        assert_eq!(f.determinant(), 2);
        let cs = CycleStructure::new(2).unwrap();
        assert_eq!(cs.cycles.len(), 1);
        assert!(cs.cycle_of(&f).is_some());

        let g = reduce(&IndefiniteForm::new(1, 0, -3).unwrap()).unwrap();
        let cs3 = CycleStructure::new(3).unwrap();
        let principal = cs3.cycle_of(&g).unwrap();
        let h = reduce(&IndefiniteForm::new(-1, 0, 3).unwrap()).unwrap();
        assert_ne!(cs3.cycle_of(&h).unwrap(), principal);

        let r = reduce(&f).unwrap();
        assert_eq!(r, f);
        assert!(reduce(&IndefiniteForm { a: 1, b: 0, c: -4 }).is_err());
        assert!(reduce(&IndefiniteForm { a: 1, b: 0, c: 3 }).is_err());
    }

    #[test]
    fn class_number_examples() {
        assert_eq!(class_number(2, false).unwrap(), 1);
        assert_eq!(class_number(3, false).unwrap(), 2);
        assert_eq!(class_number(3, true).unwrap(), 1);
        assert_eq!(class_counts(5).unwrap().narrow, CycleStructure::new(5).unwrap().cycles.len() as u64);
        assert!(class_number(9, false).is_err());
    }

    #[test]
    fn rho_is_permutation_of_reduced_forms() {
        for d in 2..=500u64 {
            if is_square_u64(d) {
                continue;
            }
            let forms = reduced_forms(d).unwrap();
            let roots = Roots::new(d);
            let mut images: Vec<_> = forms.iter().map(|f| roots.rho(f)).collect();
            images.sort_unstable();
            assert_eq!(images, forms, "d={d}");
        }
    }

    #[test]
    fn reduce_preserves_determinant_and_primitivity() {
        for a in -50i64..=50 {
            for b in -50i64..=50 {
                for c in -50i64..=50 {
                    let Ok(f) = IndefiniteForm::new(a, b, c) else {
                        continue;
                    };
                    if f.determinant() > 500 {
                        continue;
                    }
                    let r = reduce(&f).unwrap();
                    assert!(r.is_reduced());
                    assert_eq!(r.determinant(), f.determinant());
                    assert_eq!(r.is_properly_primitive(), f.is_properly_primitive());
                }
            }
        }
    }

    #[test]
    fn class_number_independent_of_representative() {
        // Reducing any SL2(Z) transform of a reduced form lands in its cycle.
        let mats = [(2i64, 1i64, 1i64, 1i64), (1, 3, 0, 1), (5, 2, 2, 1), (0, -1, 1, 0)];
        for d in [13u64, 34, 79, 94, 136, 223, 399] {
            let cs = CycleStructure::new(d).unwrap();
            for f in cs.cycles.iter().flatten() {
                for &(p, q, r, s) in &mats {
                    // f(px + qy, rx + sy)
                    let a = f.value(p, r);
                    let c = f.value(q, s);
                    let b = f.a as i128 * p as i128 * q as i128
                        + f.b as i128 * (p as i128 * s as i128 + q as i128 * r as i128)
                        + f.c as i128 * r as i128 * s as i128;
                    let g = IndefiniteForm::new(a as i64, b as i64, c as i64).unwrap();
                    let red = reduce(&g).unwrap();
                    assert_eq!(cs.cycle_of(&red), cs.cycle_of(f), "d={d} f={f} g={g}");
                }
            }
        }
    }

    #[test]
    fn identified_count_relation() {
        for d in 2..=500u64 {
            if is_square_u64(d) {
                continue;
            }
            let c = class_counts(d).unwrap();
            assert_eq!(2 * c.identified, c.narrow + c.self_negating, "d={d}");
        }
    }
}
