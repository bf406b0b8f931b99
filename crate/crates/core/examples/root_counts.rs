//! Root counts of X^2+1 and of X^3-X modulo prime powers, and the joint
//! count for the pair (X, X+2).

use majorant_lab::rootcount::{rho, rho_hat, rho_prime_power, roots_mod_prime_power};
use majorant_lab::{FactoredSystem, IntPoly};

fn main() -> majorant_lab::Result<()> {
    let q: IntPoly = "x^2+1".parse()?;
    for p in [2u64, 3, 5, 13] {
        let counts: Vec<u128> = (1..=4).map(|nu| rho_prime_power(&q, p, nu)).collect::<Result<_, _>>()?;
        println!("{q} mod {p}^nu, nu = 1..4: {counts:?}");
    }
    println!("roots of {q} mod 125: {:?}", roots_mod_prime_power(&q, 5, 3)?);
    println!("rho({q}, 65) = {}", rho(&q, 65)?);

    let cubic: IntPoly = "x^3-x".parse()?;
    for nu in 1..=5 {
        println!("rho({cubic}, 2^{nu}) = {}", rho_prime_power(&cubic, 2, nu)?);
    }

    let pair = FactoredSystem::shifted_pair(2)?;
    for t in [[1u128, 1], [2, 1], [3, 5], [4, 1]] {
        println!("rho_hat(X, X+2)({}, {}) = {}", t[0], t[1], rho_hat(&pair, &t)?);
    }
    Ok(())
}
