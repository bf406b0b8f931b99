use majorant_lab::arith::{self, exactly_divides, factor, primes_up_to, LeastPrime};
use majorant_lab::bounds::{
    delta_d_general, delta_d_k1, delta_dstar, delta_shift, majorant_sum, rhs_main, rhs_primes, sifted_product,
    BoundParams, PrimeTable,
};
use majorant_lab::lhs::{
    factor_values_in_interval, prime_sum, short_sum, sieve_count, sieve_rhs,
};
use majorant_lab::mfunc::{one, sup_ratio_oracle, tau_m, SampleGrid};
use majorant_lab::polyarith::{discriminant, fixed_prime_divisors, resultant, squarefree_part};
use majorant_lab::rootcount::oracle::{rho_hat_oracle, rho_oracle};
use majorant_lab::rootcount::{rho, rho_hat, rho_hat_prime_power, rho_prime_power};
use majorant_lab::scalar::{Mode, Value};
use majorant_lab::{Error, FactoredSystem, IntPoly};
use num_bigint::BigInt;
use num_rational::BigRational;

fn p(s: &str) -> IntPoly {
    s.parse().unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn polynomial_values_norms_and_resultants() {
    assert_eq!(p("x^2+1").evaluate_i64(2), BigInt::from(5));
    assert_eq!(IntPoly::zero().evaluate_i64(7), BigInt::from(0));
    assert_eq!(p("x^3-3x+1").evaluate_i64(10), BigInt::from(971));
    assert_eq!(p("x").norm(), BigInt::from(1));
    assert_eq!(p("x^2-3x+1").norm(), BigInt::from(5));
    assert_eq!(p("2x^3-5x+7").norm(), BigInt::from(14));
    // coefficient lists low to high name the same polynomial
    assert_eq!(p("1,0,1"), p("x^2+1"));

    assert_eq!(resultant(&p("x^2+1"), &p("x^2+1")).unwrap(), BigInt::from(0));
    for ell in [1i64, 2, 7, 30] {
        assert_eq!(resultant(&p("x"), &IntPoly::linear_shift(ell)).unwrap().magnitude(), &BigInt::from(ell).magnitude().clone());
    }
    assert_eq!(resultant(&p("x^2+1"), &p("x^2-1")).unwrap(), BigInt::from(4));
}

#[test]
fn discriminants_and_squarefree_parts() {
    assert_eq!(discriminant(&p("x^2+6x")).unwrap(), BigInt::from(36));
    assert_eq!(discriminant(&p("x+5")).unwrap(), BigInt::from(1));
    assert_eq!(discriminant(&p("x^2+1")).unwrap(), BigInt::from(-4));
    assert_eq!(squarefree_part(&p("x^3+x^2")).unwrap(), p("x^2+x"));
    assert_eq!(squarefree_part(&p("x^2+1")).unwrap(), p("x^2+1"));
    assert_eq!(squarefree_part(&p("x^3+3x^2+3x+1")).unwrap(), p("x+1"));
    assert!(fixed_prime_divisors(&p("x")).is_empty());
    assert_eq!(fixed_prime_divisors(&p("x^2+x")), vec![2]);
    assert_eq!(fixed_prime_divisors(&p("x^2+x+2")), vec![2]);
}

#[test]
fn systems() {
    let s = FactoredSystem::new(vec![p("x"), p("x+5")], vec![vec![1, 0], vec![0, 1]]).unwrap();
    assert_eq!(s.disc_star(), &BigInt::from(25));
    let s = FactoredSystem::new(vec![p("x")], vec![vec![2]]).unwrap();
    assert_eq!(s.q(), &p("x^2"));
    assert_eq!(s.q_star(), &p("x"));
    assert_eq!(s.disc_star(), &BigInt::from(1));
    assert!(FactoredSystem::new(vec![p("x"), p("x")], vec![vec![1, 0], vec![0, 1]]).is_err());
}

#[test]
fn integer_arithmetic() {
    assert!(factor(1).unwrap().is_one());
    assert_eq!(factor(12).unwrap().pairs(), &[(2, 2), (3, 1)]);
    assert_eq!(factor(1_000_003).unwrap().pairs(), &[(1_000_003, 1)]);
    assert_eq!(arith::kappa(12).unwrap(), 6);
    assert_eq!(arith::omega_big(12).unwrap(), 3);
    assert_eq!(arith::omega_small(12).unwrap(), 2);
    assert_eq!(arith::p_plus(1).unwrap(), 1);
    assert_eq!(arith::p_minus(1).unwrap(), LeastPrime::Infinity);
    assert_eq!(arith::phi(36).unwrap(), 12);
    assert!((1..50).all(|b| exactly_divides(1, b)));
    assert!(exactly_divides(4, 12));
    assert!(!exactly_divides(2, 12));
    assert!(primes_up_to(1).is_empty());
    assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
    assert_eq!(primes_up_to(1_000_000).len(), 78_498);
}

#[test]
fn root_counts() {
    assert_eq!(rho_prime_power(&p("x^3+2x+5"), 7, 0).unwrap(), 1);
    assert_eq!(rho_prime_power(&p("x^2+1"), 5, 1).unwrap(), 2);
    assert_eq!(rho_prime_power(&p("x^2+1"), 2, 1).unwrap(), 1);
    assert_eq!(rho_prime_power(&p("x^2+1"), 2, 2).unwrap(), 0);
    assert_eq!(rho(&p("x^2+1"), 1).unwrap(), 1);
    assert_eq!(rho(&p("x^2+1"), 65).unwrap(), 4);
    assert_eq!(rho_oracle(&p("x^2+1"), 65, 1 << 20).unwrap(), 4);
    assert_eq!(rho(&p("x"), 1_000_000).unwrap(), 1);
}

#[test]
fn joint_counts() {
    let pair = FactoredSystem::shifted_pair(2).unwrap();
    assert_eq!(rho_hat(&pair, &[1, 1]).unwrap(), 1);
    assert_eq!(rho_hat(&pair, &[2, 1]).unwrap(), 1);
    for (ell, pr) in [(2i64, 3u128), (6, 5), (10, 7)] {
        let s = FactoredSystem::shifted_pair(ell).unwrap();
        assert_eq!(rho_hat(&s, &[pr, pr]).unwrap(), 0);
        assert_eq!(rho_hat_oracle(&s, &[pr, pr], 1 << 20).unwrap(), 0);
    }
    // 5 ‖ n²+1 modulo 25: n ≡ ±2 (mod 5) minus n ≡ ±7 (mod 25)
    let q2 = FactoredSystem::single(p("x^2+1")).unwrap();
    assert_eq!(rho_hat_prime_power(&q2, &[1], 5).unwrap(), 8);
    assert_eq!(rho_hat_oracle(&q2, &[5], 1 << 20).unwrap(), 8);
    let x = FactoredSystem::single(p("x")).unwrap();
    assert_eq!(rho_hat_prime_power(&x, &[2], 3).unwrap(), 2);
    assert_eq!(rho_hat_prime_power(&x, &[0], 3).unwrap(), 1);
}

#[test]
fn multiplicative_functions() {
    let tau = tau_m(2, 1, 1e-3).unwrap();
    assert_eq!(tau.eval(&[12]).unwrap(), q(6, 1));
    let tt = tau_m(2, 2, 1e-3).unwrap();
    assert_eq!(tt.eval(&[4, 9]).unwrap(), q(9, 1));
    assert_eq!(tau_m(3, 1, 1e-3).unwrap().eval(&[8]).unwrap(), q(10, 1));

    // pushforward: Q = X²(X+1), n = 2 gives τ(12) = τ(4·3)
    let s = FactoredSystem::new(vec![p("x"), p("x+1")], vec![vec![2, 1]]).unwrap();
    let ft = tau.pushforward(s.exponents()).unwrap();
    assert_eq!(ft.eval(&[2, 3]).unwrap(), tau.eval(&[12]).unwrap());
    let sq = tau.pushforward(&[vec![2]]).unwrap();
    for n in 1..60u128 {
        assert_eq!(sq.eval(&[n]).unwrap(), tau.eval(&[n * n]).unwrap());
    }

    // G = F for τ, and the brute-force supremum agrees for a ≤ 50
    let g = tau.minimal_g().unwrap();
    for a in 1..=50u128 {
        assert_eq!(g.eval(&[a]).unwrap(), sup_ratio_oracle(&tau, a, 1000).unwrap());
    }

    let grid = SampleGrid::default();
    assert!(tau_m(3, 1, 0.5).unwrap().check_membership(&grid).passed());
    assert!(one(1, 1e-3).unwrap().check_membership(&grid).passed());
    assert!(tau.check_lower(0.5, &grid).passed());
    assert!(one(1, 1e-3).unwrap().check_lower(0.9, &grid).passed());
}

#[test]
fn sifted_product_and_majorant() {
    let x = FactoredSystem::single(p("x")).unwrap();
    let table = PrimeTable::new(&x, 100).unwrap();
    assert_eq!(sifted_product::<BigRational>(&x, &table, 1).unwrap(), q(1, 1));
    assert_eq!(sifted_product::<BigRational>(&x, &table, 10).unwrap(), q(8, 35));
    let tau = tau_m(2, 1, 1e-3).unwrap();
    assert_eq!(majorant_sum::<BigRational>(&x, &tau, &table, 1).unwrap(), q(1, 1));
    assert_eq!(majorant_sum::<BigRational>(&x, &tau, &table, 3).unwrap(), q(35, 18));
    let m10 = majorant_sum::<BigRational>(&x, &tau, &table, 10).unwrap();
    let m100 = majorant_sum::<BigRational>(&x, &tau, &table, 100).unwrap();
    assert!(m100 >= m10);
}

#[test]
fn discriminant_factors() {
    let tau = tau_m(2, 1, 1e-3).unwrap();
    // |D| = 1
    assert_eq!(delta_d_k1(&p("x+3"), &tau).unwrap(), (q(1, 1), q(1, 1)));
    // X²+1: ρ(2^ν) = 1, 0, 0, … so only ν = 1 contributes at p = 2
    let (d, dt) = delta_d_k1(&p("x^2+1"), &tau).unwrap();
    assert_eq!((d.clone(), dt.clone()), (q(2, 1), q(2, 1)));
    let single = FactoredSystem::single(p("x^2+1")).unwrap();
    assert_eq!(delta_d_general(&single, &tau).unwrap(), d);
    assert_eq!(delta_dstar(&single, &tau.minimal_g().unwrap()).unwrap(), q(2, 1));
    let ones = FactoredSystem::single(p("x")).unwrap();
    assert_eq!(delta_dstar(&ones, &tau).unwrap(), q(1, 1));

    let tt = tau_m(2, 2, 1e-3).unwrap();
    assert_eq!(delta_shift(1, &tau, &tau).unwrap(), q(1, 1));
    for ell in 1..=30i64 {
        let s = FactoredSystem::shifted_pair(ell).unwrap();
        assert_eq!(delta_shift(ell, &tau, &tau).unwrap(), delta_d_general(&s, &tt).unwrap());
        assert!(delta_dstar(&s, &tt).unwrap() >= q(1, 1));
    }
}

#[test]
fn assembled_forms() {
    // (X), τ, x = 100, y = 10: y · ∏_{1<p≤100}(1−1/p) · Σ_{n≤100} τ(n)ρ̂(n)/(nκ(n))
    let x = FactoredSystem::single(p("x")).unwrap();
    let tau = tau_m(2, 1, 1e-3).unwrap();
    let params = BoundParams { x: 100.0, y: 10.0, ..BoundParams::default() };
    let got = rhs_main(&x, &tau, &params, None, Mode::Exact).unwrap();
    let mut sifted = q(1, 1);
    for pr in primes_up_to(100) {
        sifted *= q(pr as i64 - 1, pr as i64);
    }
    let mut sum = q(0, 1);
    for n in 1..=100u128 {
        let c = rho_hat_oracle(&x, &[n], 1 << 20).unwrap();
        let k = arith::kappa(n).unwrap();
        sum += tau.eval(&[n]).unwrap() * BigRational::new(c.into(), (n * k).into());
    }
    assert_eq!(got, Value::Exact(q(10, 1) * sifted * sum));

    let no_const = FactoredSystem::single(p("x^2+x+1")).unwrap();
    let pos = rhs_main(&no_const, &tau, &params, None, Mode::Exact).unwrap();
    assert!(pos.to_f64() > 0.0);
    assert!(matches!(rhs_primes(&x, &tau, &params, None, Mode::Exact), Err(Error::Validation(_))));
}

#[test]
fn interval_tables_and_sums() {
    let x = FactoredSystem::single(p("x")).unwrap();
    let tab = factor_values_in_interval(&x, 10.0, 5.0, None).unwrap();
    let ns: Vec<u64> = tab.rows.iter().map(|r| r.n).collect();
    assert_eq!(ns, vec![11, 12, 13, 14, 15]);
    for r in &tab.rows {
        assert_eq!(r.q[0], factor(u128::from(r.n)).unwrap());
    }
    let q2 = FactoredSystem::single(p("x^2+1")).unwrap();
    let tab = factor_values_in_interval(&q2, 6.0, 1.0, None).unwrap();
    assert_eq!(tab.rows[0].q[0].pairs(), &[(2, 1), (5, 2)]);

    let one1 = one(1, 1e-3).unwrap();
    assert_eq!(short_sum(&q2, &one1, 10.5, 20.2).unwrap(), q(30 - 10, 1));
    let tau = tau_m(2, 1, 1e-3).unwrap();
    assert_eq!(short_sum(&x, &tau, 0.0, 10.0).unwrap(), q(27, 1));
    let pair = FactoredSystem::shifted_pair(2).unwrap();
    let tt = tau_m(2, 2, 1e-3).unwrap();
    assert_eq!(short_sum(&pair, &tt, 0.0, 5.0).unwrap(), q(28, 1));

    let shifted = FactoredSystem::single(p("x+1")).unwrap();
    assert_eq!(prime_sum(&shifted, &one1, 0.0, 100.0).unwrap(), q(25, 1));
    assert_eq!(prime_sum(&shifted, &tau, 0.0, 10.0).unwrap(), q(13, 1));
    assert_eq!(prime_sum(&shifted, &tau, 24.0, 4.0).unwrap(), q(0, 1));
}

#[test]
fn sieve_counts() {
    let x = FactoredSystem::single(p("x")).unwrap();
    assert_eq!(sieve_count(&x, &[1], 1, 0.0, 20.0, &[]).unwrap(), 20);
    assert_eq!(sieve_count(&x, &[2], 3, 0.0, 20.0, &[]).unwrap(), 3);
    let pair = FactoredSystem::shifted_pair(1).unwrap();
    // 2 | n and 2 | n+1 never happen together
    assert_eq!(sieve_count(&pair, &[2, 2], 1, 0.0, 100.0, &[]).unwrap(), 0);
    assert_eq!(sieve_rhs(&x, &[1], 1, 20.0).unwrap(), q(20, 1));
    assert_eq!(sieve_rhs(&x, &[2], 3, 20.0).unwrap(), q(10, 3));
}
