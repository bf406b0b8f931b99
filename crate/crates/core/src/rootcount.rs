//! Root counts modulo prime powers and general moduli, and the joint
//! exact-divisibility count ρ̂_R.

use num_traits::ToPrimitive;

use crate::arith::{self, add_mod, mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::modp;
use crate::polyarith::{eval_mod, FactoredSystem, IntPoly};

fn checked_prime_power(p: u64, e: u32) -> Result<u128> {
    (p as u128)
        .checked_pow(e)
        .filter(|&m| m < 1u128 << 126)
        .ok_or_else(|| Error::Overflow(format!("{p}^{e} does not fit the 126-bit modulus range")))
}

/// Roots of `P` modulo the prime `p`, sorted.
pub fn roots_mod_prime(poly: &IntPoly, p: u64) -> Result<Vec<u64>> {
    let coeffs = poly.reduce_mod(p as u128);
    modp::roots_mod_prime(&coeffs, p as u128)
        .map(|r| r.into_iter().map(|x| x as u64).collect())
        .ok_or(Error::NotPrimitiveAtPrime { p })
}

/// `P` prepared for repeated evaluation modulo `p^e` for `e ≤ top`.
struct Lifter {
    p: u128,
    coeffs: Vec<u128>,
    deriv: Vec<u128>,
    modulus: u128,
}

impl Lifter {
    fn new(poly: &IntPoly, p: u64, top: u32) -> Result<Self> {
        let modulus = checked_prime_power(p, top)?;
        Ok(Self {
            p: p as u128,
            coeffs: poly.reduce_mod(modulus),
            deriv: poly.derivative().reduce_mod(p as u128),
            modulus,
        })
    }

    /// `P(r) mod p^top`.
    fn value(&self, r: u128) -> u128 {
        eval_mod(&self.coeffs, r, self.modulus)
    }

    /// `P′(r) mod p`.
    fn slope(&self, r: u128) -> u128 {
        eval_mod(&self.deriv, r, self.p)
    }
}

/// `ρ_P(p^ν)`, the number of residues mod `p^ν` at which `P` vanishes.
///
/// Hensel lifting: a root mod p with `P′(r) ≢ 0` has exactly one lift at
/// every level. A singular root `r` mod `p^j` has `p` lifts if
/// `p^{j+1} | P(r)` and none otherwise.
pub fn rho_prime_power(poly: &IntPoly, p: u64, nu: u32) -> Result<u128> {
    let roots = roots_mod_prime(poly, p)?;
    if nu == 0 {
        return Ok(1);
    }
    let lifter = Lifter::new(poly, p, nu)?;
    let mut count = 0u128;
    let mut stack: Vec<(u128, u32)> = Vec::new();
    for r in roots {
        let r = r as u128;
        if lifter.slope(r) != 0 {
            count += 1;
        } else {
            stack.push((r, 1));
        }
    }
    let pp = p as u128;
    while let Some((r, j)) = stack.pop() {
        if j == nu {
            count += 1;
            continue;
        }
        let pj = pp.pow(j);
        if lifter.value(r) % (pj * pp) != 0 {
            continue;
        }
        if j + 1 == nu {
            count += pp;
            continue;
        }
        for t in 0..pp {
            stack.push((r + t * pj, j + 1));
        }
    }
    Ok(count)
}

/// All roots of `P` modulo `p^ν`, sorted.
pub fn roots_mod_prime_power(poly: &IntPoly, p: u64, nu: u32) -> Result<Vec<u128>> {
    if nu == 0 {
        return Ok(vec![0]);
    }
    let lifter = Lifter::new(poly, p, nu)?;
    let pp = p as u128;
    let mut level: Vec<u128> = roots_mod_prime(poly, p)?.into_iter().map(u128::from).collect();
    for j in 1..nu {
        let pj = pp.pow(j);
        let mut next = Vec::with_capacity(level.len());
        for r in level {
            let d = lifter.slope(r);
            let v = lifter.value(r) % (pj * pp);
            if d != 0 {
                // P(r + t p^j) ≡ P(r) + t p^j P′(r)  (mod p^{j+1})
                let a = v / pj;
                let t = mul_mod(pp - a % pp, pow_mod(d, pp - 2, pp), pp) % pp;
                next.push(r + t * pj);
            } else if v == 0 {
                next.extend((0..pp).map(|t| r + t * pj));
            }
        }
        level = next;
    }
    level.sort_unstable();
    Ok(level)
}

/// `ρ_P(n) = ∏_{p^ν ‖ n} ρ_P(p^ν)`.
pub fn rho(poly: &IntPoly, n: u128) -> Result<u128> {
    let f = arith::factor(n)?;
    let mut acc = 1u128;
    for (p, e) in f.iter() {
        let p = u64::try_from(p).map_err(|_| Error::Overflow(format!("prime {p} above 2^64")))?;
        acc = acc
            .checked_mul(rho_prime_power(poly, p, e)?)
            .ok_or_else(|| Error::Overflow("ρ(n) above 2^128".into()))?;
    }
    Ok(acc)
}

/// Largest modulus `p^M` for which [`rho_hat_prime_power`] scans residues
/// instead of walking the lifting tree.
pub const RHO_HAT_SCAN_LIMIT: u128 = 4096;

fn rho_hat_modulus(nus: &[u32], p: u64) -> Result<Option<(u32, u128)>> {
    let Some(top) = nus.iter().filter(|&&v| v >= 1).max() else {
        return Ok(None);
    };
    let m = top + 1;
    Ok(Some((m, checked_prime_power(p, m)?)))
}

fn check_arity(system: &FactoredSystem, nus: &[u32]) -> Result<()> {
    if nus.len() != system.r() {
        return Err(Error::domain(format!(
            "exponent tuple has {} entries, the system has r = {}",
            nus.len(),
            system.r()
        )));
    }
    Ok(())
}

/// `ρ̂_R(p^{ν_1}, …, p^{ν_r})`: residues `n mod p^{max ν_h + 1}` (maximum
/// over `ν_h ≥ 1`) with `p^{ν_h} ‖ R_h(n)` for every `h` with `ν_h ≥ 1`.
/// The all-zero tuple gives 1.
pub fn rho_hat_prime_power(system: &FactoredSystem, nus: &[u32], p: u64) -> Result<u128> {
    check_arity(system, nus)?;
    match rho_hat_modulus(nus, p)? {
        None => Ok(1),
        Some((_, modulus)) if modulus <= RHO_HAT_SCAN_LIMIT => {
            rho_hat_prime_power_by_scan(system, nus, p)
        }
        Some(_) => rho_hat_prime_power_by_lifting(system, nus, p),
    }
}

/// [`rho_hat_prime_power`] by scanning every residue of the modulus.
pub fn rho_hat_prime_power_by_scan(system: &FactoredSystem, nus: &[u32], p: u64) -> Result<u128> {
    check_arity(system, nus)?;
    let Some((_, modulus)) = rho_hat_modulus(nus, p)? else {
        return Ok(1);
    };
    let active: Vec<(Vec<u128>, u128, u128)> = nus
        .iter()
        .zip(system.factors())
        .filter(|(&v, _)| v >= 1)
        .map(|(&v, f)| {
            let lo = (p as u128).pow(v);
            (f.reduce_mod(modulus), lo, lo * p as u128)
        })
        .collect();
    Ok((0..modulus)
        .filter(|&n| {
            active.iter().all(|(c, lo, hi)| {
                let v = eval_mod(c, n, modulus);
                v.is_multiple_of(*lo) && !v.is_multiple_of(*hi)
            })
        })
        .count() as u128)
}

/// [`rho_hat_prime_power`] by walking the joint valuation tree digit by
/// digit in base `p`.
pub fn rho_hat_prime_power_by_lifting(
    system: &FactoredSystem,
    nus: &[u32],
    p: u64,
) -> Result<u128> {
    check_arity(system, nus)?;
    let Some((m, _)) = rho_hat_modulus(nus, p)? else {
        return Ok(1);
    };
    let pp = p as u128;
    let active: Vec<(u32, Lifter)> = nus
        .iter()
        .zip(system.factors())
        .filter(|(&v, _)| v >= 1)
        .map(|(&v, f)| Ok((v, Lifter::new(f, p, m)?)))
        .collect::<Result<_>>()?;

    // one factor: p·ρ(p^ν) − ρ(p^{ν+1}) residues mod p^{ν+1}
    if let [(v, _)] = active.as_slice() {
        let h = nus.iter().position(|&x| x >= 1).unwrap();
        let f = &system.factors()[h];
        return Ok(pp * rho_prime_power(f, p, *v)? - rho_prime_power(f, p, v + 1)?);
    }

    // level 0: every active factor needs a root mod p
    let mut candidates: Option<Vec<u128>> = None;
    for (h, &v) in nus.iter().enumerate() {
        if v == 0 {
            continue;
        }
        let roots: Vec<u128> = roots_mod_prime(&system.factors()[h], p)?
            .into_iter()
            .map(u128::from)
            .collect();
        candidates = Some(match candidates {
            None => roots,
            Some(c) => c.into_iter().filter(|r| roots.binary_search(r).is_ok()).collect(),
        });
    }
    let mut count = 0u128;
    // (residue mod p^j, j, indices into `active` still pending)
    let mut stack: Vec<(u128, u32, Vec<usize>)> = Vec::new();
    let all: Vec<usize> = (0..active.len()).collect();
    for r in candidates.unwrap_or_default() {
        stack.push((r, 1, all.clone()));
    }
    while let Some((r, j, pending)) = stack.pop() {
        if pending.is_empty() {
            count += pp.pow(m - j);
            continue;
        }
        let pj = pp.pow(j);
        let mut need: Vec<Option<u128>> = Vec::new(); // None = every digit
        let mut avoid: Vec<Option<u128>> = Vec::new();
        let mut blocked = false;
        let mut still = Vec::new();
        // factors with ν = j are resolved by this digit and must stop here
        for &i in &pending {
            let (v, lifter) = &active[i];
            let val = lifter.value(r) % (pj * pp);
            let a = val / pj;
            let d = lifter.slope(r);
            // digits t with p^{j+1} | R(r + t p^j)
            let set = if d != 0 {
                Some(Some(mul_mod(pp - a, pow_mod(d, pp - 2, pp), pp) % pp))
            } else if a == 0 {
                Some(None)
            } else {
                None
            };
            if *v > j {
                match set {
                    Some(s) => need.push(s),
                    None => {
                        blocked = true;
                        break;
                    }
                }
                still.push(i);
            } else if let Some(s) = set {
                avoid.push(s);
            }
        }
        if blocked {
            continue;
        }
        if avoid.contains(&None) {
            continue;
        }
        let avoid: Vec<u128> = avoid.into_iter().flatten().collect();
        let forced: Vec<u128> = need.iter().flatten().copied().collect();
        if need.is_empty() {
            let mut banned = avoid.clone();
            banned.sort_unstable();
            banned.dedup();
            count += (pp - banned.len() as u128) * pp.pow(m - j - 1);
            continue;
        }
        let digits: Vec<u128> = match forced.first() {
            Some(&t) if forced.iter().all(|&s| s == t) => vec![t],
            Some(_) => Vec::new(),
            None => (0..pp).collect(),
        };
        for t in digits {
            if avoid.contains(&t) {
                continue;
            }
            stack.push((add_mod(r, t * pj, pj * pp), j + 1, still.clone()));
        }
    }
    Ok(count)
}

/// `ρ̂_R(n_1, …, n_r)`, multiplicative over the primes dividing `∏ n_h`.
pub fn rho_hat(system: &FactoredSystem, tuple: &[u128]) -> Result<u128> {
    if tuple.len() != system.r() {
        return Err(Error::domain(format!(
            "tuple has {} entries, the system has r = {}",
            tuple.len(),
            system.r()
        )));
    }
    if tuple.contains(&0) {
        return Err(Error::domain("ρ̂ needs n_h ≥ 1"));
    }
    let mut primes: Vec<u128> = Vec::new();
    for &n in tuple {
        primes.extend(arith::factor(n)?.iter().map(|(p, _)| p));
    }
    primes.sort_unstable();
    primes.dedup();
    let mut acc = 1u128;
    for p in primes {
        let nus: Vec<u32> = tuple.iter().map(|&n| arith::valuation(n, p)).collect();
        let p = u64::try_from(p).map_err(|_| Error::Overflow(format!("prime {p} above 2^64")))?;
        let c = rho_hat_prime_power(system, &nus, p)?;
        if c == 0 {
            return Ok(0);
        }
        acc = acc
            .checked_mul(c)
            .ok_or_else(|| Error::Overflow("ρ̂ above 2^128".into()))?;
    }
    Ok(acc)
}

/// `lcm(n_1 κ(n_1), …, n_r κ(n_r))`, the modulus in the definition of ρ̂.
pub fn rho_hat_modulus_of(tuple: &[u128]) -> Result<u128> {
    use num_integer::Integer;
    tuple.iter().try_fold(1u128, |acc, &n| {
        let nk = n
            .checked_mul(arith::kappa(n)?)
            .ok_or_else(|| Error::Overflow("n·κ(n) above 2^128".into()))?;
        let g = acc.gcd(&nk);
        (acc / g)
            .checked_mul(nk)
            .ok_or_else(|| Error::Overflow("lcm above 2^128".into()))
    })
}

/// Exhaustive residue scans, independent of the lifting code; used to
/// certify the fast paths.
pub mod oracle {
    use super::*;

    pub const DEFAULT_SCAN_BOUND: u128 = 10_000_000;

    fn guard(modulus: u128, bound: u128) -> Result<()> {
        if modulus > bound {
            Err(Error::ScanBoundExceeded { modulus, bound })
        } else {
            Ok(())
        }
    }

    /// `#{x mod n : P(x) ≡ 0}` by scanning.
    pub fn rho_oracle(poly: &IntPoly, n: u128, bound: u128) -> Result<u128> {
        if n == 0 {
            return Err(Error::domain("modulus 0"));
        }
        guard(n, bound)?;
        let c = poly.reduce_mod(n);
        Ok((0..n).filter(|&x| eval_mod(&c, x, n) == 0).count() as u128)
    }

    /// `ρ̂_R(n_1, …, n_r)` straight from its definition, scanning residues
    /// modulo `lcm(n_h κ(n_h))` and testing `n_h ‖ R_h(x)` on exact values.
    pub fn rho_hat_oracle(system: &FactoredSystem, tuple: &[u128], bound: u128) -> Result<u128> {
        let modulus = rho_hat_modulus_of(tuple)?;
        guard(modulus, bound)?;
        let mut count = 0u128;
        for x in 0..modulus {
            let xi = num_bigint::BigInt::from(x);
            let ok = system.factors().iter().zip(tuple).all(|(f, &n)| {
                let v = f.evaluate(&xi);
                let v = num_traits::Signed::abs(&v);
                match v.to_u128() {
                    Some(0) => n == 1,
                    Some(v) => arith::exactly_divides(n, v),
                    None => {
                        let nb = num_bigint::BigInt::from(n);
                        let (q, rem) = num_integer::Integer::div_rem(&v, &nb);
                        rem == num_bigint::BigInt::from(0)
                            && num_integer::Integer::gcd(&q, &nb) == num_bigint::BigInt::from(1)
                    }
                }
            });
            if ok {
                count += 1;
            }
        }
        Ok(count)
    }

    /// `#{x mod p^M : p^{ν_h} ‖ R_h(x) for ν_h ≥ 1}` by scanning.
    pub fn rho_hat_prime_power_oracle(
        system: &FactoredSystem,
        nus: &[u32],
        p: u64,
        bound: u128,
    ) -> Result<u128> {
        let tuple: Vec<u128> = nus.iter().map(|&v| (p as u128).pow(v)).collect();
        rho_hat_oracle(system, &tuple, bound)
    }
}
