//! Sums of multiplicative functions over polynomial values in a short
//! interval, over all n and over primes.

use majorant_lab::lhs::{prime_sum, short_sum};
use majorant_lab::mfunc::{one, tau_m};
use majorant_lab::{FactoredSystem, IntPoly};

fn main() -> majorant_lab::Result<()> {
    let quad = FactoredSystem::single(IntPoly::from_i64s(&[1, 0, 1]))?;
    let tau = tau_m(2, 1, 1e-3)?;
    let (x, y) = (1e6, 1e4);
    println!("sum tau(n^2+1), {x} < n <= {}: {}", x + y, short_sum(&quad, &tau, x, y)?);
    println!("count of primes there: {}", prime_sum(&quad, &one(1, 1e-3)?, x, y)?);
    println!("sum tau(p^2+1) over those primes: {}", prime_sum(&quad, &tau, x, y)?);

    let pair = FactoredSystem::shifted_pair(2)?;
    let tt = tau_m(2, 2, 1e-3)?;
    println!("sum tau(n) tau(n+2), n <= 10^4: {}", short_sum(&pair, &tt, 0.0, 1e4)?);
    Ok(())
}
