use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use pellian_core::arith::{
    factorize, is_perfect_square, is_prime_u64, is_squarefree_u64, isqrt, jacobi,
    squarefree_part_u64, DEFAULT_EFFORT,
};
use pellian_core::counting::{
    combined_exponent, count_s, decompose_solution, recompose,
};
use pellian_core::forms::{l_value, reduce, reduced_forms, CycleStructure};
use pellian_core::pell::{cf_expand_sqrt, fundamental_solution, fundamental_unit_pm, nth_solution};
use pellian_core::surface::{
    enumerate_surface_points, known_curve_3k, known_curve_k1, pell_to_surface, small_branch_lift,
    surface_residual, zapponi_curve,
};
use pellian_core::IndefiniteForm;

fn odd_modulus() -> impl Strategy<Value = u64> {
    (0u64..500_000).prop_map(|k| 2 * k + 1)
}

fn nonsquare(max: u64) -> impl Strategy<Value = u64> {
    (2u64..=max).prop_filter("nonsquare", |&d| {
        let r = (d as f64).sqrt() as u64;
        !(r * r == d || (r + 1) * (r + 1) == d)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn jacobi_multiplicative(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000, n in odd_modulus()) {
        let ab = ((a as i128 * b as i128).rem_euclid(n as i128)) as i64;
        prop_assert_eq!(jacobi(a, n).unwrap() * jacobi(b, n).unwrap(), jacobi(ab, n).unwrap());
    }

    #[test]
    fn squarefree_part_divides_with_square_cofactor(n in 1u64..=1_000_000_000_000) {
        let s = squarefree_part_u64(n);
        prop_assert_eq!(n % s, 0);
        let k2 = n / s;
        let k = (k2 as f64).sqrt().round() as u64;
        prop_assert_eq!(k * k, k2);
        prop_assert!(is_squarefree_u64(s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn factorization_is_prime_and_complete(n in 2u64..u64::MAX) {
        let f = factorize(&BigUint::from(n), DEFAULT_EFFORT).unwrap();
        prop_assert!(f.complete);
        prop_assert_eq!(f.product(), BigUint::from(n));
        for (p, _) in &f.factors {
            prop_assert!(is_prime_u64(p.to_u64().unwrap()));
        }
    }

    #[test]
    fn isqrt_brackets(digits in "[1-9][0-9]{0,60}") {
        let n: BigInt = digits.parse().unwrap();
        let r = isqrt(&n).unwrap();
        prop_assert!(&r * &r <= n);
        prop_assert!((&r + 1u8) * (&r + 1u8) > n);
        prop_assert_eq!(is_perfect_square(&n), &r * &r == n);
    }

    #[test]
    fn fundamental_solution_is_minimal_unit(d in nonsquare(100_000)) {
        let e = fundamental_solution(d).unwrap();
        prop_assert!(e.is_valid());
        prop_assert_eq!(e.exact_norm(), BigInt::one());
        // eps_d >= sqrt(d + 1) + sqrt(d)
        let t2 = &e.t * &e.t;
        prop_assert!(t2 >= BigUint::from(d + 1));
        let pm = fundamental_unit_pm(d).unwrap();
        let odd = cf_expand_sqrt(d).unwrap().period_length() % 2 == 1;
        prop_assert_eq!(pm.norm == -1, odd);
        if odd {
            prop_assert_eq!(pm.mul(&pm), e);
        } else {
            prop_assert_eq!(pm, e);
        }
    }

    #[test]
    fn powers_multiply(d in nonsquare(5000), n in 1u32..6) {
        let e = fundamental_solution(d).unwrap();
        let mut acc = e.clone();
        for _ in 1..n {
            acc = acc.mul(&e);
        }
        prop_assert_eq!(nth_solution(d, n).unwrap(), acc.clone());
        prop_assert!((acc.log() - n as f64 * e.log()).abs() <= 1e-12 * acc.log());
    }

    #[test]
    fn reduce_preserves_invariants(a in -20i64..=20, b in -70i64..=70, c in -40i64..=40) {
        let d = b * b - a * c;
        prop_assume!(d >= 2);
        let r = (d as f64).sqrt() as i64;
        prop_assume!(r * r != d && (r + 1) * (r + 1) != d);
        let f = IndefiniteForm::new(a, b, c).unwrap();
        let g = reduce(&f).unwrap();
        prop_assert!(g.is_reduced());
        prop_assert_eq!(g.determinant(), f.determinant());
        prop_assert_eq!(g.is_properly_primitive(), f.is_properly_primitive());
    }

    #[test]
    fn class_invariant_under_sl2(d in nonsquare(500), idx in 0usize..1000, word in prop::collection::vec(0u8..3, 0..8)) {
        let forms = reduced_forms(d).unwrap();
        let f = forms[idx % forms.len()];
        // apply T, T^-1 or S, each in SL2(Z)
        let (mut a, mut b, mut c) = (f.a, f.b, f.c);
        for g in word {
            (a, b, c) = match g {
                0 => (a, b + a, a + 2 * b + c),
                1 => (a, b - a, a - 2 * b + c),
                _ => (c, -b, a),
            };
        }
        let g = IndefiniteForm::new(a, b, c).unwrap();
        let cs = CycleStructure::new(d).unwrap();
        prop_assert_eq!(cs.cycle_of(&f), cs.cycle_of(&reduce(&g).unwrap()));
    }

    #[test]
    fn decomposition_round_trip(d in nonsquare(3000), n in 1u32..4) {
        let s = nth_solution(d, n).unwrap();
        let (Some(t), Some(u)) = (s.t.to_u64(), s.u.to_u64()) else { return Ok(()) };
        prop_assume!(t < 1 << 31);
        prop_assert!((t - 1).gcd(&(t + 1)) <= 2);
        let dec = decompose_solution(t, d, u).unwrap();
        prop_assert_eq!(recompose(&dec).unwrap(), (t, d, u));
        prop_assert_eq!(recompose(&dec.swapped()).unwrap(), (t, d, u));
        prop_assert_eq!(dec.residual(), dec.eta as i128);
    }

    #[test]
    fn count_s_monotone(x in 2u64..5000, dx in 0u64..500) {
        let h = Rational64::new(1, 2);
        prop_assert!(count_s(x, h).unwrap() <= count_s(x + dx, h).unwrap());
    }

    #[test]
    fn combined_exponent_below_seven_twelfths(k in 0.0001f64..=1.0, frac in 0.0f64..=1.0) {
        let delta1 = frac * k / 2.0;
        prop_assert!(combined_exponent(k, delta1) <= 7.0 / 12.0 + 1e-12);
    }

    #[test]
    fn pell_points_land_on_surface(z in -300i64..=300, n in 1u32..4) {
        // z = +-1 gives d = 4
        prop_assume!(z.abs() != 1);
        let d = (z * z + 3) as u64;
        let s = nth_solution(d, n).unwrap();
        let (t, u) = (BigInt::from(s.t.clone()), BigInt::from(s.u.clone()));
        for (st, su) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let p = pell_to_surface(&(&t * st), &(&u * su), &BigInt::from(z), 3).unwrap();
            prop_assert!(surface_residual(&p.y, &p.u, &p.z, 3).is_zero());
        }
    }

    #[test]
    fn zapponi_identity(d in nonsquare(400)) {
        let e = fundamental_solution(d).unwrap();
        let c = zapponi_curve(&e.t.clone().into(), &BigInt::from(d), &e.u.clone().into()).unwrap();
        prop_assert!(c.is_identity());
    }

    #[test]
    fn lift_on_surface(z in 1u64..3000) {
        prop_assume!(z % 3 != 0 && is_squarefree_u64(z * z + 3));
        let l = small_branch_lift(z).unwrap();
        prop_assert!(surface_residual(&l.point.y, &l.point.u, &l.point.z, 3).is_zero());
    }
}

#[test]
fn jacobi_is_euler_criterion_below_100() {
    for p in (3u64..100).filter(|&p| is_prime_u64(p)) {
        let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
        for a in 0..p as i64 {
            let expected = if a == 0 {
                0
            } else if squares.contains(&(a as u64)) {
                1
            } else {
                -1
            };
            assert_eq!(jacobi(a, p).unwrap(), expected, "({a}/{p})");
        }
    }
}

#[test]
fn squarefree_part_exhaustive() {
    for n in 1u64..=100_000 {
        let s = squarefree_part_u64(n);
        let k2 = n / s;
        let k = (k2 as f64).sqrt().round() as u64;
        assert_eq!(s * k * k, n);
        assert!((2..).take_while(|p| p * p <= s).all(|p| !s.is_multiple_of(p * p)), "{n}");
    }
}

#[test]
fn norm_sign_matches_period_parity() {
    for d in 2u64..=10_000 {
        let Ok(cf) = cf_expand_sqrt(d) else { continue };
        let pm = fundamental_unit_pm(d).unwrap();
        assert_eq!(pm.norm == -1, cf.period_length() % 2 == 1, "d={d}");
    }
}

#[test]
fn known_curves_are_identities() {
    assert!(known_curve_k1().is_identity());
    assert!(known_curve_3k().is_identity());
}

#[test]
fn l_value_nesting_property() {
    proptest!(ProptestConfig::with_cases(20), |(d in nonsquare(3000))| {
        let coarse = l_value(d, 1e-4).unwrap();
        let fine = l_value(d, 1e-5).unwrap();
        prop_assert!(coarse.contains(fine.value));
        prop_assert!(coarse.contains_interval(&fine));
    });
}

#[test]
fn surface_points_sign_symmetric() {
    let pts = enumerate_surface_points(60, 2).unwrap();
    let set: std::collections::HashSet<(BigInt, BigInt, BigInt)> =
        pts.iter().map(|(p, _)| (p.y.clone(), p.u.clone(), p.z.clone())).collect();
    for (y, u, z) in &set {
        assert!(set.contains(&(-y, -u, z.clone())));
        assert!(set.contains(&(y.clone(), -u, -z)));
    }
}
