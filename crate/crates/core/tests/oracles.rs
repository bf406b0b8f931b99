//! Fast paths against brute force, on fixed and random inputs.

use majorant_lab::arith::{self, factor, is_prime};
use majorant_lab::bounds::{majorant_sum, rhs_main, smooth_sum, BoundParams, PrimeTable};
use majorant_lab::harness::ratio::naive_shifted_sum;
use majorant_lab::lhs::{factor_values_in_interval, naive_table, short_sum, short_sum_pushforward_on, sieve_count};
use majorant_lab::mfunc::{pow_a, tau_m};
use majorant_lab::polyarith::{discriminant, resultant, resultant_sylvester};
use majorant_lab::rootcount::oracle::{rho_hat_oracle, rho_oracle};
use majorant_lab::rootcount::{
    rho, rho_hat, rho_hat_modulus_of, rho_hat_prime_power_by_lifting, rho_hat_prime_power_by_scan, rho_prime_power,
};
use majorant_lab::scalar::{Mode, Scalar};
use majorant_lab::{FactoredSystem, IntPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use twofloat::TwoFloat;

const SCAN: u128 = 1 << 22;

fn poly_strategy(max_deg: usize, c: i64) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-c..=c, 2..=max_deg + 1)
        .prop_map(|v| IntPoly::from_i64s(&v))
        .prop_filter("primitive, degree ≥ 1", |q| q.deg() >= 1 && q.is_primitive())
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn root_counts_match_scan(q in poly_strategy(4, 20), pr in small_prime(), nu in 0u32..=4) {
        let m = u128::from(pr).pow(nu);
        prop_assert_eq!(rho_prime_power(&q, pr, nu).unwrap(), rho_oracle(&q, m, SCAN).unwrap());
    }

    #[test]
    fn root_counts_are_multiplicative(q in poly_strategy(3, 10), m in 1u128..60, n in 1u128..60) {
        prop_assume!(num_integer::Integer::gcd(&m, &n) == 1);
        prop_assert_eq!(rho(&q, m * n).unwrap(), rho(&q, m).unwrap() * rho(&q, n).unwrap());
        prop_assert_eq!(rho(&q, m * n).unwrap(), rho_oracle(&q, m * n, SCAN).unwrap());
    }

    #[test]
    fn resultant_agrees_with_sylvester(a in poly_strategy(4, 9), b in poly_strategy(3, 9)) {
        prop_assert_eq!(resultant(&a, &b).unwrap(), resultant_sylvester(&a, &b).unwrap());
    }

    #[test]
    fn factorization_multiplies_back(n in 1u128..(1u128 << 64)) {
        let f = factor(n).unwrap();
        prop_assert_eq!(f.value(), Some(n));
        for (pr, e) in f.iter() {
            prop_assert!(is_prime(pr));
            prop_assert!(e >= 1);
        }
    }

    #[test]
    fn joint_counts_match_scan(ell in 1i64..12, a in 1u128..40, b in 1u128..40) {
        let s = FactoredSystem::shifted_pair(ell).unwrap();
        prop_assume!(rho_hat_modulus_of(&[a, b]).unwrap() <= SCAN);
        prop_assert_eq!(rho_hat(&s, &[a, b]).unwrap(), rho_hat_oracle(&s, &[a, b], SCAN).unwrap());
    }

    #[test]
    fn scan_and_lifting_agree(r1 in poly_strategy(2, 6), shift in 1i64..8, pr in small_prime(), n1 in 0u32..=3, n2 in 0u32..=3) {
        let r2 = &r1 + &IntPoly::constant(shift);
        // squarefree, primitive and coprime, or skipped
        let s = FactoredSystem::coprime(vec![r1, r2]);
        prop_assume!(s.is_ok());
        let s = s.unwrap();
        let nus = [n1, n2];
        let m = u128::from(pr).pow(n1.max(n2) + 1);
        prop_assume!(m <= 1 << 16);
        prop_assert_eq!(
            rho_hat_prime_power_by_scan(&s, &nus, pr).unwrap(),
            rho_hat_prime_power_by_lifting(&s, &nus, pr).unwrap()
        );
    }

    #[test]
    fn interval_table_matches_naive(c in -20i64..20, x in 0u32..2000, y in 1u32..300) {
        let q = IntPoly::from_i64s(&[c, 1, 1]);
        prop_assume!(!discriminant(&q).unwrap().is_zero());
        let s = FactoredSystem::single(q).unwrap();
        let (x, y) = (f64::from(x), f64::from(y));
        let fast = factor_values_in_interval(&s, x, y, None);
        let slow = naive_table(&s, x, y);
        match (fast, slow) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn exact_and_float_agree(c in 1i64..30, xe in 2.0f64..4.0) {
        let s = FactoredSystem::single(IntPoly::from_i64s(&[c, 0, 1])).unwrap();
        let f = tau_m(2, 1, 1e-3).unwrap();
        let x = 10f64.powf(xe).floor();
        let params = BoundParams { x, y: x.sqrt().floor(), ..BoundParams::default() };
        let table = PrimeTable::new(&s, x as u64).unwrap();
        let e = rhs_main(&s, &f, &params, Some(&table), Mode::Exact).unwrap().to_f64();
        let v = rhs_main(&s, &f, &params, Some(&table), Mode::Float).unwrap().to_f64();
        prop_assert!(((e - v) / e).abs() < 1e-10, "{} vs {}", e, v);
    }
}

/// Σ over tuples with n_1⋯n_r ≤ x, straight from the definition.
fn majorant_by_enumeration(s: &FactoredSystem, ft: &majorant_lab::mfunc::MultiplicativeFunction, x: u128) -> BigRational {
    let mut total = BigRational::zero();
    let mut stack = vec![Vec::<u128>::new()];
    while let Some(t) = stack.pop() {
        if t.len() == s.r() {
            let c = rho_hat_oracle(s, &t, SCAN).unwrap();
            if c > 0 {
                let m = rho_hat_modulus_of(&t).unwrap();
                total += ft.eval(&t).unwrap() * BigRational::new(c.into(), m.into());
            }
            continue;
        }
        let used: u128 = t.iter().product();
        for n in 1..=x / used {
            let mut u = t.clone();
            u.push(n);
            stack.push(u);
        }
    }
    total
}

#[test]
fn majorant_matches_enumeration() {
    let tt = tau_m(2, 2, 1e-3).unwrap();
    for ell in [1i64, 2, 6] {
        let s = FactoredSystem::shifted_pair(ell).unwrap();
        let table = PrimeTable::new(&s, 60).unwrap();
        for x in [1u128, 7, 30, 60] {
            let fast = majorant_sum::<BigRational>(&s, &tt, &table, x).unwrap();
            assert_eq!(fast, majorant_by_enumeration(&s, &tt, x), "ℓ = {ell}, x = {x}");
        }
    }
    let q = FactoredSystem::new(vec!["x".parse().unwrap(), "x^2+1".parse().unwrap()], vec![vec![2, 1]]).unwrap();
    let ft = tau_m(2, 1, 1e-3).unwrap().pushforward(q.exponents()).unwrap();
    let table = PrimeTable::new(&q, 80).unwrap();
    let fast = majorant_sum::<BigRational>(&q, &ft, &table, 80).unwrap();
    assert_eq!(fast, majorant_by_enumeration(&q, &ft, 80));
}

#[test]
fn smooth_sum_dominates_majorant() {
    let s = FactoredSystem::shifted_pair(2).unwrap();
    let tt = tau_m(2, 2, 1e-3).unwrap();
    let table = PrimeTable::new(&s, 1000).unwrap();
    for z in [10u128, 100, 1000] {
        let m = majorant_sum::<BigRational>(&s, &tt, &table, z).unwrap();
        let full = smooth_sum::<BigRational>(&s, &tt, &table, z, 16).unwrap();
        assert!(full >= m);
        let f = smooth_sum::<TwoFloat>(&s, &tt, &table, z, 16).unwrap();
        let rel = ((f - full.to_twofloat()) / full.to_twofloat()).hi().abs();
        assert!(rel < 1e-25, "z = {z}: {rel}");
    }
}

#[test]
fn short_sum_matches_naive() {
    let tau = tau_m(2, 1, 1e-3).unwrap();
    let s = FactoredSystem::single("x^2+1".parse().unwrap()).unwrap();
    let naive: BigInt = (1001..=1500u128)
        .map(|n| {
            factor(n * n + 1)
                .unwrap()
                .iter()
                .map(|(_, e)| BigInt::from(e + 1))
                .product::<BigInt>()
        })
        .sum();
    assert_eq!(short_sum(&s, &tau, 1000.0, 500.0).unwrap(), BigRational::from_integer(naive));

    let cube = pow_a(3.0, 2, 1.0, 1e-3).unwrap();
    let pair = FactoredSystem::shifted_pair(4).unwrap();
    let naive: BigRational = (1..=300u128)
        .map(|n| cube.eval(&[n, n + 4]).unwrap())
        .sum();
    assert_eq!(short_sum(&pair, &cube, 0.0, 300.0).unwrap(), naive);
}

#[test]
fn shifted_sum_two_ways() {
    let s = FactoredSystem::shifted_pair(2).unwrap();
    let tt = tau_m(2, 2, 1e-3).unwrap();
    let pipeline = short_sum(&s, &tt, 0.0, 1e4).unwrap();
    assert_eq!(pipeline, naive_shifted_sum(10_000, 2, 2).unwrap());
}

#[test]
fn pushforward_sum_identity() {
    // Q_1 = X²(X+1), Q_2 = X+3: Σ F(Q(n)) = Σ F̃(R(n))
    let s = FactoredSystem::new(
        vec!["x".parse().unwrap(), "x+1".parse().unwrap(), "x+3".parse().unwrap()],
        vec![vec![2, 1, 0], vec![0, 0, 1]],
    )
    .unwrap();
    let f = tau_m(3, 2, 1e-3).unwrap();
    let ft = f.pushforward(s.exponents()).unwrap();
    let tab = factor_values_in_interval(&s, 100.0, 400.0, None).unwrap();
    let lhs = majorant_lab::lhs::short_sum_on(&s, &f, &tab).unwrap();
    assert_eq!(lhs, short_sum_pushforward_on(&s, &ft, &tab).unwrap());
}

#[test]
fn sieve_count_matches_enumeration() {
    let s = FactoredSystem::single("x^2+1".parse().unwrap()).unwrap();
    for a in [1u128, 2, 5, 10, 13] {
        for z in [1u64, 5, 20] {
            let want = (1..=2000u128)
                .filter(|&n| {
                    let v = n * n + 1;
                    arith::exactly_divides(a, v)
                        && factor(v)
                            .unwrap()
                            .iter()
                            .all(|(pr, _)| a % pr == 0 || pr > u128::from(z))
                })
                .count() as u64;
            assert_eq!(sieve_count(&s, &[a], z, 0.0, 2000.0, &[]).unwrap(), want, "a = {a}, z = {z}");
        }
    }
}

#[test]
fn float_products_keep_precision() {
    let xs: Vec<TwoFloat> = (1..200u32)
        .map(|k| majorant_lab::scalar::div(TwoFloat::from(f64::from(k + 1)), TwoFloat::from(f64::from(k))))
        .collect();
    let exact: BigRational = (1..200i64).map(|k| BigRational::new((k + 1).into(), k.into())).product();
    let f = <TwoFloat as Scalar>::product(xs);
    assert!(((f - exact.to_twofloat()) / exact.to_twofloat()).hi().abs() < 1e-28);
    assert_eq!(exact, BigRational::from_integer(200.into()));
    assert!(BigRational::one() < exact);
}
