//! Exact arithmetic on integer polynomials and the factored system
//! `Q = Q_1⋯Q_k`, `Q_j = ∏_h R_h^{γ_{jh}}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense univariate polynomial with integer coefficients; `coeffs[i]` is the
/// coefficient of `X^i`. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The monomial `X`.
    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// `X + c`.
    pub fn linear_shift(c: i64) -> Self {
        Self::from_i64s(&[c, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// `P(n)` by Horner's rule.
    pub fn evaluate(&self, n: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * n + c)
    }

    pub fn evaluate_i64(&self, n: i64) -> BigInt {
        self.evaluate(&BigInt::from(n))
    }

    /// `‖P‖`, the sum of the absolute values of the coefficients.
    pub fn norm(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading().unwrap().is_negative() {
            c = -c;
        }
        Self::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    /// The same polynomial with positive leading coefficient.
    pub fn with_positive_leading(&self) -> Self {
        match self.leading() {
            Some(lc) if lc.is_negative() => -self,
            _ => self.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(1), |acc, _| &acc * self)
    }

    /// Exact quotient `self / d` in `Z[X]`; fails if `d` does not divide
    /// `self` over the integers.
    pub fn div_exact(&self, d: &IntPoly) -> Result<IntPoly> {
        let (q, r) = div_rem_rational(&to_rational(self), &to_rational(d))?;
        if !r.iter().all(Zero::is_zero) {
            return Err(Error::domain("polynomial division is not exact"));
        }
        from_rational_integral(&q).ok_or_else(|| Error::domain("quotient is not integral"))
    }

    /// Coefficients reduced modulo `m` into `[0, m)`.
    pub(crate) fn reduce_mod(&self, m: u128) -> Vec<u128> {
        let mb = BigInt::from(m);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&mb).to_u128().expect("reduced below modulus"))
            .collect()
    }

    /// Coefficients as `i128` when they all fit.
    pub(crate) fn small_coeffs(&self) -> Option<Vec<i128>> {
        self.coeffs.iter().map(ToPrimitive::to_i128).collect()
    }
}

impl std::ops::Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl std::ops::Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl std::ops::Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |v: &[BigInt], i: usize| v.get(i).cloned().unwrap_or_default();
        IntPoly::new(
            (0..n)
                .map(|i| get(&self.coeffs, i) + get(&rhs.coeffs, i))
                .collect(),
        )
    }
}

impl std::ops::Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = !abs.is_one() || i == 0;
            if show_coeff {
                write!(f, "{abs}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for IntPoly {
    type Err = Error;

    /// Accepts a low-to-high coefficient list (`"1,0,1"` is `X²+1`) or a
    /// sum of monomials such as `"x^2+1"` or `"2X^3 - 5x + 7"`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        if !t.contains(['x', 'X']) {
            let coeffs = t
                .split(',')
                .map(|c| {
                    c.parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("bad coefficient {c:?} in {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(IntPoly::new(coeffs));
        }
        parse_monomials(&t).map_err(|e| Error::Parse(format!("{e} in {s:?}")))
    }
}

fn parse_monomials(t: &str) -> std::result::Result<IntPoly, String> {
    let mut coeffs: Vec<BigInt> = Vec::new();
    let bytes = t.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = BigInt::one();
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        } else if i > 0 {
            return Err("expected + or -".into());
        }
        let start = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            i += 1;
        }
        let term = &t[start..i];
        if term.is_empty() {
            return Err("empty term".into());
        }
        let (coeff, power) = match term.find(['x', 'X']) {
            None => (term.parse::<BigInt>().map_err(|_| format!("bad term {term:?}"))?, 0),
            Some(pos) => {
                let c = term[..pos].trim_end_matches('*');
                let coeff = if c.is_empty() {
                    BigInt::one()
                } else {
                    c.parse::<BigInt>().map_err(|_| format!("bad coefficient {c:?}"))?
                };
                let rest = &term[pos + 1..];
                let power = if rest.is_empty() {
                    1
                } else if let Some(e) = rest.strip_prefix('^') {
                    e.parse::<usize>().map_err(|_| format!("bad exponent {e:?}"))?
                } else {
                    return Err(format!("unexpected {rest:?} after x"));
                };
                (coeff, power)
            }
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += sign * coeff;
    }
    Ok(IntPoly::new(coeffs))
}

// ---------------------------------------------------------------------------
// rational polynomial helpers (Euclid over Q)

fn to_rational(p: &IntPoly) -> Vec<BigRational> {
    p.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

fn trim_rational(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn from_rational_integral(v: &[BigRational]) -> Option<IntPoly> {
    v.iter()
        .map(|c| c.is_integer().then(|| c.to_integer()))
        .collect::<Option<Vec<_>>>()
        .map(IntPoly::new)
}

fn div_rem_rational(
    a: &[BigRational],
    b: &[BigRational],
) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
    let mut b = b.to_vec();
    trim_rational(&mut b);
    let Some(lb) = b.last().cloned() else {
        return Err(Error::domain("division by the zero polynomial"));
    };
    let mut r = a.to_vec();
    trim_rational(&mut r);
    if r.len() < b.len() {
        return Ok((Vec::new(), r));
    }
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() / &lb;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &factor * c;
        }
        q[shift] = factor;
        r.pop();
        trim_rational(&mut r);
    }
    Ok((q, r))
}

// ---------------------------------------------------------------------------
// resultants and discriminants

fn require_nonzero(p: &IntPoly, what: &str) -> Result<()> {
    if p.is_zero() {
        Err(Error::domain(format!("{what}: zero polynomial")))
    } else {
        Ok(())
    }
}

/// `Res(P, Q)` via the Euclidean remainder sequence over `Q`:
/// `Res(A, B) = (−1)^{deg A·deg B} lc(B)^{deg A − deg R} Res(B, R)` with
/// `R = A mod B`.
pub fn resultant(p: &IntPoly, q: &IntPoly) -> Result<BigInt> {
    require_nonzero(p, "resultant")?;
    require_nonzero(q, "resultant")?;
    let mut a = to_rational(p);
    let mut b = to_rational(q);
    let mut acc = BigRational::one();
    loop {
        let (da, db) = (a.len() - 1, b.len() - 1);
        if db == 0 {
            acc *= num_traits::pow(b[0].clone(), da);
            break;
        }
        if da == 0 {
            acc *= num_traits::pow(a[0].clone(), db);
            break;
        }
        let (_, r) = div_rem_rational(&a, &b)?;
        if r.is_empty() {
            return Ok(BigInt::zero());
        }
        let dr = r.len() - 1;
        if (da * db) % 2 == 1 {
            acc = -acc;
        }
        acc *= num_traits::pow(b[db].clone(), da - dr);
        a = b;
        b = r;
    }
    debug_assert!(acc.is_integer());
    Ok(acc.to_integer())
}

/// The Sylvester matrix of `P` (degree m) and `Q` (degree n), size m+n.
pub fn sylvester_matrix(p: &IntPoly, q: &IntPoly) -> Vec<Vec<BigInt>> {
    let (m, n) = (p.deg(), q.deg());
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    // highest coefficient first
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (k, c) in p.coeffs.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (k, c) in q.coeffs.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Determinant by fraction-free Bareiss elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// `Res(P, Q)` as the Sylvester determinant; the independent route used to
/// cross-check [`resultant`].
pub fn resultant_sylvester(p: &IntPoly, q: &IntPoly) -> Result<BigInt> {
    require_nonzero(p, "resultant")?;
    require_nonzero(q, "resultant")?;
    Ok(bareiss_determinant(sylvester_matrix(p, q)))
}

/// `Disc(P) = (−1)^{d(d−1)/2} Res(P, P′)/lc(P)`, with `Disc = 1` for linear
/// polynomials.
pub fn discriminant(p: &IntPoly) -> Result<BigInt> {
    let d = match p.degree() {
        None | Some(0) => return Err(Error::domain("discriminant needs degree ≥ 1")),
        Some(d) => d,
    };
    if d == 1 {
        return Ok(BigInt::one());
    }
    let res = resultant(p, &p.derivative())?;
    let lc = p.leading().unwrap();
    let (q, r) = res.div_rem(lc);
    if !r.is_zero() {
        return Err(Error::domain("Res(P, P') not divisible by lc(P)"));
    }
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
}

/// Primitive gcd of two nonzero integer polynomials (positive leading
/// coefficient).
pub fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_zero() {
        return b.primitive_part();
    }
    if b.is_zero() {
        return a.primitive_part();
    }
    let (mut u, mut v) = (to_rational(a), to_rational(b));
    while !v.is_empty() {
        let (_, r) = div_rem_rational(&u, &v).expect("v nonzero");
        u = v;
        v = r;
    }
    // clear denominators then take the primitive part
    let den = u
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    IntPoly::new(u.iter().map(|c| (c * &den).to_integer()).collect()).primitive_part()
}

/// `Q* = Q / gcd(Q, Q′)`, primitive with positive leading coefficient.
pub fn squarefree_part(q: &IntPoly) -> Result<IntPoly> {
    if q.is_zero() {
        return Err(Error::domain("squarefree part of the zero polynomial"));
    }
    if !q.is_primitive() {
        return Err(Error::domain("squarefree part needs a primitive polynomial"));
    }
    if q.deg() == 0 {
        return Ok(q.primitive_part());
    }
    let g = gcd(q, &q.derivative());
    Ok(q.div_exact(&g)?.primitive_part())
}

/// Primes `p` with `p | Q(n)` for every integer `n`. For primitive `Q` these
/// satisfy `p ≤ deg Q`, so only those primes are tested.
pub fn fixed_prime_divisors(q: &IntPoly) -> Vec<u64> {
    let g = q.deg() as u64;
    crate::arith::primes_up_to(g)
        .into_iter()
        .filter(|&p| {
            let c = q.reduce_mod(p as u128);
            (0..p).all(|n| eval_mod(&c, n as u128, p as u128) == 0)
        })
        .collect()
}

/// Horner evaluation on reduced coefficients.
pub(crate) fn eval_mod(coeffs: &[u128], x: u128, m: u128) -> u128 {
    use crate::arith::{add_mod, mul_mod};
    let x = x % m;
    coeffs
        .iter()
        .rev()
        .fold(0u128, |acc, &c| add_mod(mul_mod(acc, x, m), c % m, m))
}

// ---------------------------------------------------------------------------
// factored system

/// The tuple `(Q_1, …, Q_k)` written through pairwise coprime squarefree
/// factors `R_1, …, R_r` and an exponent matrix `γ` (k×r).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredSystem {
    factors: Vec<IntPoly>,
    exponents: Vec<Vec<u32>>,
    q_parts: Vec<IntPoly>,
    q: IntPoly,
    q_star: IntPoly,
    disc: BigInt,
    disc_star: BigInt,
}

impl FactoredSystem {
    /// Validates and builds the system. Factors are normalized to positive
    /// leading coefficient. Irreducibility is not checked; instead `Q*` must
    /// be squarefree and factors pairwise coprime.
    pub fn new(factors: Vec<IntPoly>, exponents: Vec<Vec<u32>>) -> Result<Self> {
        let r = factors.len();
        let k = exponents.len();
        if r == 0 {
            return Err(Error::InvalidSystem("no factors (r = 0)".into()));
        }
        if k == 0 {
            return Err(Error::InvalidSystem("no polynomials (k = 0)".into()));
        }
        if let Some(j) = exponents.iter().position(|row| row.len() != r) {
            return Err(Error::InvalidSystem(format!(
                "exponent row {j} has {} entries, expected {r}",
                exponents[j].len()
            )));
        }
        let factors: Vec<IntPoly> = factors.iter().map(IntPoly::with_positive_leading).collect();
        if let Some(h) = factors.iter().position(|f| f.deg() == 0) {
            return Err(Error::InvalidSystem(format!("factor R_{h} is constant")));
        }
        if let Some(h) = (0..r).find(|&h| exponents.iter().all(|row| row[h] == 0)) {
            return Err(Error::InvalidSystem(format!(
                "factor R_{h} does not occur in Q (zero exponent column)"
            )));
        }
        let q_parts: Vec<IntPoly> = exponents
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&factors)
                    .fold(IntPoly::constant(1), |acc, (&e, f)| &acc * &f.pow(e))
            })
            .collect();
        let q = q_parts
            .iter()
            .fold(IntPoly::constant(1), |acc, qj| &acc * qj);
        if !q.is_primitive() {
            return Err(Error::InvalidSystem("Q not primitive".into()));
        }
        for h in 0..r {
            for i in h + 1..r {
                if resultant(&factors[h], &factors[i])?.is_zero() {
                    return Err(Error::InvalidSystem(format!(
                        "pairwise resultant zero: Res(R_{h}, R_{i}) = 0"
                    )));
                }
            }
        }
        let q_star = factors
            .iter()
            .fold(IntPoly::constant(1), |acc, f| &acc * f);
        let disc_star = if q_star.deg() >= 1 {
            discriminant(&q_star)?
        } else {
            BigInt::one()
        };
        if disc_star.is_zero() {
            return Err(Error::InvalidSystem("Q* not squarefree (D* = 0)".into()));
        }
        let disc = discriminant(&q)?;
        Ok(Self {
            factors,
            exponents,
            q_parts,
            q,
            q_star,
            disc,
            disc_star,
        })
    }

    /// `k = r`, `γ = identity`: each `Q_j` is its own factor.
    pub fn coprime(factors: Vec<IntPoly>) -> Result<Self> {
        let r = factors.len();
        let id = (0..r)
            .map(|j| (0..r).map(|h| u32::from(h == j)).collect())
            .collect();
        Self::new(factors, id)
    }

    /// `(X, X + ℓ)`.
    pub fn shifted_pair(ell: i64) -> Result<Self> {
        Self::coprime(vec![IntPoly::x(), IntPoly::linear_shift(ell)])
    }

    /// Single polynomial `k = r = 1`.
    pub fn single(p: IntPoly) -> Result<Self> {
        Self::coprime(vec![p])
    }

    pub fn factors(&self) -> &[IntPoly] {
        &self.factors
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    /// The polynomials `Q_1, …, Q_k`.
    pub fn q_parts(&self) -> &[IntPoly] {
        &self.q_parts
    }

    pub fn q(&self) -> &IntPoly {
        &self.q
    }

    pub fn q_star(&self) -> &IntPoly {
        &self.q_star
    }

    /// `g = deg Q`.
    pub fn g(&self) -> usize {
        self.q.deg()
    }

    /// `g* = deg Q*`.
    pub fn g_star(&self) -> usize {
        self.q_star.deg()
    }

    pub fn r(&self) -> usize {
        self.factors.len()
    }

    pub fn k(&self) -> usize {
        self.exponents.len()
    }

    /// `D = Disc(Q)`; zero when `Q` has a repeated factor.
    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    /// `D* = Disc(Q*)`, never zero.
    pub fn disc_star(&self) -> &BigInt {
        &self.disc_star
    }

    /// `‖Q‖`.
    pub fn norm(&self) -> BigInt {
        self.q.norm()
    }
}

impl fmt::Display for FactoredSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.q_parts.iter().map(|q| format!("({q})")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Prime divisors of a nonzero integer (used for `p | D`, `p | D*`).
pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>> {
    let n = n.abs();
    if n.is_zero() {
        return Err(Error::domain("prime divisors of 0"));
    }
    let v = n
        .to_u128()
        .ok_or_else(|| Error::Overflow(format!("{n} does not fit in 128 bits")))?;
    crate::arith::factor(v)?
        .iter()
        .map(|(p, _)| {
            u64::try_from(p).map_err(|_| Error::Overflow(format!("prime divisor {p} above 2^64")))
        })
        .collect()
}
