//! Exact integer utilities: Jacobi symbols, integer square roots,
//! factorization, square-free parts and the `Q_f` square-divisor count.

use std::mem::swap;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::poly::Poly;

/// Trial division runs over all primes below this bound before rho starts.
pub const TRIAL_DIVISION_BOUND: u64 = 1 << 12;

/// Default rho iteration budget used by the convenience wrappers.
pub const DEFAULT_EFFORT: u64 = 1 << 24;

/// Witnesses for Miller-Rabin. Deterministic below 3.3 * 10^24, which covers
/// every `u64`; above that the test is probabilistic with these fixed bases.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_DIVISION_BOUND as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                (i * i..=n).step_by(i).for_each(|j| sieve[j] = false);
            }
            i += 1;
        }
        (0..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
    })
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> Result<i8> {
    if n == 0 || n.is_even() {
        return Err(invalid(format!("Jacobi symbol needs odd positive n, got {n}")));
    }
    let mut a = (a as i128).rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz & 1 == 1 && matches!(n & 7, 3 | 5) {
            t = -t;
        }
        swap(&mut a, &mut n);
        if a & 3 == 3 && n & 3 == 3 {
            t = -t;
        }
        a %= n;
    }
    Ok(if n == 1 { t } else { 0 })
}

/// Jacobi symbol for arbitrary-precision arguments.
pub fn jacobi_big(a: &BigInt, n: &BigUint) -> Result<i8> {
    if n.is_zero() || n.is_even() {
        return Err(invalid(format!("Jacobi symbol needs odd positive n, got {n}")));
    }
    let nb = BigInt::from(n.clone());
    let mut a = a.mod_floor(&nb).into_parts().1;
    let mut n = n.clone();
    let mut t = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n8 = (&n & BigUint::from(7u8)).to_u8().unwrap_or(0);
        if tz & 1 == 1 && matches!(n8, 3 | 5) {
            t = -t;
        }
        swap(&mut a, &mut n);
        if a.bit(0) && a.bit(1) && n.bit(0) && n.bit(1) {
            t = -t;
        }
        a %= &n;
    }
    Ok(if n.is_one() { t } else { 0 })
}

/// Floor square root of a nonnegative arbitrary-precision integer.
pub fn isqrt(n: &BigInt) -> Result<BigInt> {
    if n.sign() == Sign::Minus {
        return Err(invalid(format!("isqrt of negative number {n}")));
    }
    Ok(n.sqrt())
}

pub fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 1 << 104 {
        // f64 is accurate enough here for a couple of correction steps.
        let mut r = (n as f64).sqrt() as u128;
        while r * r > n {
            r -= 1;
        }
        while (r + 1) * (r + 1) <= n {
            r += 1;
        }
        r
    } else {
        n.sqrt()
    }
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.sign() == Sign::Minus {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

pub fn is_square_u64(n: u64) -> bool {
    // Squares are 0, 1, 4 or 9 mod 16.
    if (0x0213u16 >> (n & 15)) & 1 == 0 {
        return false;
    }
    let r = isqrt_u64(n);
    r * r == n
}

pub fn is_square_u128(n: u128) -> bool {
    let r = isqrt_u128(n);
    r * r == n
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic primality for `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the fixed witness set; exact for `n < 2^64`.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

enum Rho<T> {
    Found(T),
    Failed,
    Exhausted,
}

/// Brent's variant of Pollard rho with `x -> x^2 + c`, starting at 2.
fn rho_u64(n: u64, c: u64, budget: &mut u64) -> Rho<u64> {
    const BATCH: u64 = 128;
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let (mut x, mut ys) = (0u64, 0u64);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            if *budget < steps {
                return Rho::Exhausted;
            }
            *budget -= steps;
            for _ in 0..steps {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        Rho::Failed
    } else {
        Rho::Found(g)
    }
}

fn rho_big(n: &BigUint, c: u64, budget: &mut u64) -> Rho<BigUint> {
    const BATCH: u64 = 128;
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let absdiff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u8);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = BigUint::zero();
    let mut ys = BigUint::zero();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = BATCH.min(r - k);
            if *budget < steps {
                return Rho::Exhausted;
            }
            *budget -= steps;
            for _ in 0..steps {
                y = f(&y);
                q = (&q * absdiff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += BATCH;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = absdiff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        Rho::Failed
    } else {
        Rho::Found(g)
    }
}

/// Prime factorization, possibly partial.
///
/// `factors` is sorted by prime. When `complete` is false, `cofactor` holds
/// the product of the parts rho could not split within the budget; in all
/// cases `n = cofactor * prod(p^e)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: BigUint,
    pub factors: Vec<(BigUint, u32)>,
    pub cofactor: BigUint,
    pub complete: bool,
}

impl Factorization {
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(self.cofactor.clone(), |acc, (p, e)| acc * p.pow(*e))
    }
}

fn push_factor<T: Ord>(list: &mut Vec<(T, u32)>, p: T, e: u32) {
    match list.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += e,
        None => list.push((p, e)),
    }
}

/// Factor `n >= 1`: trial division below [`TRIAL_DIVISION_BOUND`], then
/// Brent-Pollard rho with constants `c = 1, 2, ...`. Each rho step is charged
/// against `effort_budget`; running out leaves the factorization incomplete.
pub fn factorize(n: &BigUint, effort_budget: u64) -> Result<Factorization> {
    if n.is_zero() {
        return Err(invalid("cannot factor 0"));
    }
    if let Some(small) = n.to_u64() {
        let (factors, cofactor) = factorize_u64_with_budget(small, effort_budget);
        return Ok(Factorization {
            n: n.clone(),
            factors: factors
                .into_iter()
                .map(|(p, e)| (BigUint::from(p), e))
                .collect(),
            cofactor: BigUint::from(cofactor),
            complete: cofactor == 1,
        });
    }

    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    let mut m = n.clone();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            factors.push((pb, e));
        }
    }

    let mut budget = effort_budget;
    let mut cofactor = BigUint::one();
    let mut stack = vec![m];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            let (fs, rest) = factorize_u64_with_budget(small, budget);
            for (p, e) in fs {
                push_factor(&mut factors, BigUint::from(p), e);
            }
            cofactor *= rest;
            continue;
        }
        if is_prime(&m) {
            push_factor(&mut factors, m, 1);
            continue;
        }
        if let Some((root, k)) = perfect_power_big(&m) {
            stack.extend(std::iter::repeat_n(root, k as usize));
            continue;
        }
        let mut c = 1;
        loop {
            match rho_big(&m, c, &mut budget) {
                Rho::Found(g) => {
                    let other = &m / &g;
                    stack.push(g);
                    stack.push(other);
                    break;
                }
                Rho::Failed => c += 1,
                Rho::Exhausted => {
                    cofactor *= &m;
                    break;
                }
            }
        }
    }
    factors.sort();
    let complete = cofactor.is_one();
    Ok(Factorization {
        n: n.clone(),
        factors,
        cofactor,
        complete,
    })
}

// Rho needs about sqrt(p) steps to split p^k, so pure powers are peeled off
// first. Cofactors have no prime below the trial-division bound, which caps k.
fn perfect_power_big(m: &BigUint) -> Option<(BigUint, u32)> {
    let max_k = (m.bits() / 12) as u32;
    (2..=max_k).rev().find_map(|k| {
        let r = m.nth_root(k);
        (&r.pow(k) == m).then_some((r, k))
    })
}

fn perfect_power_u64(m: u64) -> Option<(u64, u32)> {
    let max_k = (64 - m.leading_zeros()) / 12;
    (2..=max_k).rev().find_map(|k| {
        let r = m.nth_root(k);
        (r.checked_pow(k) == Some(m)).then_some((r, k))
    })
}

fn factorize_u64_with_budget(n: u64, effort_budget: u64) -> (Vec<(u64, u32)>, u64) {
    let mut factors = Vec::new();
    let mut m = n;
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    let mut budget = effort_budget;
    let mut cofactor = 1u64;
    let mut stack = vec![m];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            push_factor(&mut factors, m, 1);
            continue;
        }
        if let Some((root, k)) = perfect_power_u64(m) {
            stack.extend(std::iter::repeat_n(root, k as usize));
            continue;
        }
        let mut c = 1;
        loop {
            match rho_u64(m, c, &mut budget) {
                Rho::Found(g) => {
                    stack.push(g);
                    stack.push(m / g);
                    break;
                }
                Rho::Failed => c += 1,
                Rho::Exhausted => {
                    cofactor *= m;
                    break;
                }
            }
        }
    }
    factors.sort_unstable();
    (factors, cofactor)
}

/// Complete factorization of a `u64`.
pub fn factorize_u64(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "cannot factor 0");
    let (factors, cofactor) = factorize_u64_with_budget(n, u64::MAX);
    debug_assert_eq!(cofactor, 1);
    factors
}

/// All positive divisors of the number with the given factorization, unsorted.
pub fn divisors_from(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, e) in factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs
}

/// Square-free part `d1` of `n = d1 * d2^2`.
pub fn squarefree_part(n: &BigUint, effort_budget: u64) -> Result<BigUint> {
    let f = factorize(n, effort_budget)?;
    if !f.complete {
        return Err(Error::FactorizationIncomplete(n.to_string()));
    }
    Ok(f.factors
        .iter()
        .filter(|(_, e)| e % 2 == 1)
        .fold(BigUint::one(), |acc, (p, _)| acc * p))
}

pub fn is_squarefree(n: &BigUint, effort_budget: u64) -> Result<bool> {
    Ok(&squarefree_part(n, effort_budget)? == n)
}

pub fn squarefree_part_u64(n: u64) -> u64 {
    factorize_u64(n)
        .iter()
        .filter(|(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product()
}

pub fn is_squarefree_u64(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    // Cheap rejections first; most non-square-free values have a small square factor.
    for &p in &small_primes()[..8] {
        if n.is_multiple_of(p * p) {
            return false;
        }
    }
    factorize_u64(n).iter().all(|&(_, e)| e == 1)
}

/// `Q_f(S, Z)`: the number of triples `(z, r, s)` with `1 <= z <= Z`,
/// `1 <= s <= S`, `r >= 1` and `f(z) = s r^2`.
pub fn count_qf(f: &Poly, s_bound: u64, z_bound: u64) -> Result<u64> {
    if s_bound == 0 || z_bound == 0 {
        return Err(invalid("Q_f needs S >= 1 and Z >= 1"));
    }
    let s_big = BigUint::from(s_bound);
    let mut total = 0u64;
    for z in 1..=z_bound {
        let v = match f.eval(&BigInt::from(z)).to_biguint() {
            Some(v) if !v.is_zero() => v,
            _ => continue,
        };
        let fac = factorize(&v, DEFAULT_EFFORT)?;
        if !fac.complete {
            return Err(Error::FactorizationIncomplete(v.to_string()));
        }
        // r ranges over divisors of the square part; s = v / r^2 <= S.
        let mut roots = vec![BigUint::one()];
        for (p, e) in &fac.factors {
            let len = roots.len();
            let mut pk = BigUint::one();
            for _ in 0..e / 2 {
                pk *= p;
                for i in 0..len {
                    let r = &roots[i] * &pk;
                    roots.push(r);
                }
            }
        }
        total += roots.iter().filter(|r| *r * *r * &s_big >= v).count() as u64;
    }
    Ok(total)
}

/// One cell of the `Q_f` growth diagnostic.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct QfGrowth {
    pub s: u64,
    pub z: u64,
    pub count: u64,
    /// `Q_f(S, Z) / (Z^{1/2} S^{3/4})`; the implied constant is not known, so
    /// this is only tabulated.
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub ratio: f64,
}

pub fn qf_growth_table(f: &Poly, cells: &[(u64, u64)]) -> Result<Vec<QfGrowth>> {
    cells
        .iter()
        .map(|&(s, z)| {
            let count = count_qf(f, s, z)?;
            let ratio = count as f64 / ((z as f64).sqrt() * (s as f64).powf(0.75));
            Ok(QfGrowth { s, z, count, ratio })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_jacobi_prime(a: i64, p: u64) -> i8 {
        let r = a.rem_euclid(p as i64) as u64;
        if r == 0 {
            0
        } else if (1..p).any(|x| x * x % p == r) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(1, 1).unwrap(), 1);
        assert_eq!(jacobi(2, 7).unwrap(), 1);
        assert_eq!(jacobi(3, 5).unwrap(), -1);
        assert!(jacobi(3, 8).is_err());
        assert!(jacobi(3, 0).is_err());
    }

    #[test]
    fn jacobi_matches_euler_criterion_below_100() {
        for p in (3..100u64).filter(|&p| is_prime_u64(p)) {
            for a in -50..150i64 {
                assert_eq!(jacobi(a, p).unwrap(), brute_jacobi_prime(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn jacobi_multiplicative_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.gen_range(0..500_000u64) * 2 + 1;
            let a = rng.gen_range(-1_000_000..1_000_000i64);
            let b = rng.gen_range(-1_000_000..1_000_000i64);
            let lhs = jacobi(a, n).unwrap() * jacobi(b, n).unwrap();
            assert_eq!(lhs, jacobi(a * b, n).unwrap());
            let zero = jacobi(a, n).unwrap() == 0;
            assert_eq!(zero, (a.unsigned_abs()).gcd(&n) > 1);
        }
    }

    #[test]
    fn jacobi_big_agrees() {
        for n in (1..400u64).step_by(2) {
            for a in -300..300i64 {
                let big = jacobi_big(&BigInt::from(a), &BigUint::from(n)).unwrap();
                assert_eq!(big, jacobi(a, n).unwrap());
            }
        }
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&BigInt::zero()).unwrap(), BigInt::zero());
        assert_eq!(isqrt(&BigInt::from(99)).unwrap(), BigInt::from(9));
        let big = BigInt::from(10u8).pow(100);
        assert_eq!(isqrt(&big).unwrap(), BigInt::from(10u8).pow(50));
        assert!(isqrt(&BigInt::from(-1)).is_err());
        assert_eq!(isqrt_u64(u64::MAX), 4294967295);
        assert_eq!(isqrt_u128(u128::MAX), u64::MAX as u128);
    }

    #[test]
    fn perfect_squares() {
        assert!(is_perfect_square(&BigInt::from(4)));
        assert!(!is_perfect_square(&BigInt::from(5)));
        assert!(!is_perfect_square(&BigInt::from(-4)));
        for n in 0..10_000u64 {
            let r = (n as f64).sqrt() as u64;
            assert_eq!(is_square_u64(n), r * r == n || (r + 1) * (r + 1) == n);
        }
    }

    #[test]
    fn factorize_examples() {
        let f = factorize(&BigUint::from(12u8), 100).unwrap();
        assert!(f.complete);
        assert_eq!(
            f.factors,
            vec![(BigUint::from(2u8), 2), (BigUint::from(3u8), 1)]
        );
        let one = factorize(&BigUint::one(), 100).unwrap();
        assert!(one.complete && one.factors.is_empty());
        let f = factorize(&BigUint::from(10403u32), 100).unwrap();
        assert_eq!(
            f.factors,
            vec![(BigUint::from(101u8), 1), (BigUint::from(103u8), 1)]
        );
        assert!(factorize(&BigUint::zero(), 1).is_err());
    }

    #[test]
    fn factorize_large_semiprimes() {
        // Two primes above the trial-division bound, on both sides of 2^64.
        let p = BigUint::from(4294967291u64);
        let q = BigUint::from(4294967279u64);
        let f = factorize(&(&p * &q), DEFAULT_EFFORT).unwrap();
        assert!(f.complete);
        assert_eq!(f.factors, vec![(q.clone(), 1), (p.clone(), 1)]);

        let r = BigUint::from(18446744073709551557u64); // largest prime below 2^64
        let n = &p * &r * &r;
        let f = factorize(&n, DEFAULT_EFFORT).unwrap();
        assert!(f.complete);
        assert_eq!(f.product(), n);
        assert_eq!(f.factors, vec![(p, 1), (r, 2)]);
    }

    #[test]
    fn factorize_budget_exhaustion_is_reported() {
        let p = BigUint::from(18446744073709551557u64);
        let q = BigUint::from(18446744073709551533u64);
        let n = &p * &q * BigUint::from(12u8);
        let f = factorize(&n, 10).unwrap();
        assert!(!f.complete);
        assert_eq!(f.product(), n);
        assert_eq!(f.cofactor, &p * &q);
        assert!(matches!(
            squarefree_part(&n, 10),
            Err(Error::FactorizationIncomplete(_))
        ));
    }

    #[test]
    fn squarefree_examples() {
        let sf = |n: u32| squarefree_part(&BigUint::from(n), 1000).unwrap();
        assert_eq!(sf(12), BigUint::from(3u8));
        assert_eq!(sf(7), BigUint::from(7u8));
        assert_eq!(sf(722), BigUint::from(2u8));
        assert_eq!(sf(1), BigUint::one());
        assert!(!is_squarefree(&BigUint::from(4u8), 10).unwrap());
        assert!(is_squarefree(&BigUint::from(7u8), 10).unwrap());
        assert!(!is_squarefree(&BigUint::from(45u8), 10).unwrap());
    }

    #[test]
    fn squarefree_part_exhaustive_1e5() {
        for n in 1..=100_000u64 {
            let s = squarefree_part_u64(n);
            assert_eq!(n % s, 0);
            assert!(is_square_u64(n / s), "n={n}");
            let mut k = 2;
            while k * k <= s {
                assert_ne!(s % (k * k), 0, "n={n}");
                k += 1;
            }
            assert_eq!(is_squarefree_u64(n), s == n);
        }
    }

    fn qf_oracle(f: &Poly, s_bound: u64, z_bound: u64) -> u64 {
        let mut count = 0;
        for z in 1..=z_bound {
            let v = f.eval_i64(z as i64);
            for s in 1..=s_bound {
                let mut r = 1i64;
                while BigInt::from(s) * r * r <= v {
                    if BigInt::from(s) * r * r == v {
                        count += 1;
                    }
                    r += 1;
                }
            }
        }
        count
    }

    #[test]
    fn count_qf_examples() {
        let f = Poly::from_i64s(&[3, 0, 1]);
        assert_eq!(count_qf(&f, 1, 10).unwrap(), 1);
        let g = Poly::from_i64s(&[0, 0, 1]);
        assert_eq!(count_qf(&g, 1, 5).unwrap(), 5);
        // Frozen from the triple-loop oracle.
        assert_eq!(qf_oracle(&f, 3, 10), 2);
        assert_eq!(count_qf(&f, 3, 10).unwrap(), 2);
        assert!(count_qf(&f, 0, 10).is_err());
    }

    #[test]
    fn count_qf_matches_oracle_grid() {
        let polys = [
            Poly::from_i64s(&[3, 0, 1]),
            Poly::from_i64s(&[-7, 0, 2]),
            Poly::from_i64s(&[1, 1, 1]),
            Poly::from_i64s(&[0, 4]),
        ];
        for f in &polys {
            for s in [1u64, 2, 5, 12, 40] {
                for z in [1u64, 7, 30] {
                    assert_eq!(count_qf(f, s, z).unwrap(), qf_oracle(f, s, z), "{f} S={s} Z={z}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn factorization_product_is_n(n in 1u64..u64::MAX) {
            let f = factorize_u64(n);
            let prod: u128 = f.iter().map(|&(p, e)| (p as u128).pow(e)).product();
            prop_assert_eq!(prod, n as u128);
            for (p, _) in f {
                prop_assert!(is_prime_u64(p));
            }
        }
    }
}
