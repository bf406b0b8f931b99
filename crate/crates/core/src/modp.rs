//! Polynomials over F_p, just enough to find roots mod p quickly.

use crate::arith::{add_mod, mul_mod, pow_mod, sub_mod};

type Poly = Vec<u128>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv(a: u128, p: u128) -> u128 {
    pow_mod(a, p - 2, p)
}

fn make_monic(a: Poly, p: u128) -> Poly {
    match a.last() {
        Some(&lc) if lc != 1 => {
            let i = inv(lc, p);
            a.into_iter().map(|c| mul_mod(c, i, p)).collect()
        }
        _ => a,
    }
}

fn rem(a: &[u128], b: &[u128], p: u128) -> Poly {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let ib = inv(b[db], p);
    while r.len() > db {
        let top = *r.last().unwrap();
        if top != 0 {
            let f = mul_mod(top, ib, p);
            let shift = r.len() - 1 - db;
            for (i, &c) in b.iter().enumerate() {
                r[shift + i] = sub_mod(r[shift + i], mul_mod(f, c, p), p);
            }
        }
        r.pop();
    }
    trim(r)
}

fn mul_rem(a: &[u128], b: &[u128], m: &[u128], p: u128) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
        }
    }
    rem(&trim(out), m, p)
}

/// `base^e mod m` in F_p[X].
fn pow_rem(base: &[u128], mut e: u128, m: &[u128], p: u128) -> Poly {
    let mut result = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mul_rem(&result, &b, m, p);
        }
        b = mul_rem(&b, &b, m, p);
        e >>= 1;
    }
    result
}

fn gcd(mut a: Poly, mut b: Poly, p: u128) -> Poly {
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    make_monic(a, p)
}

fn sub_poly(a: &[u128], b: &[u128], p: u128) -> Poly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| sub_mod(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p))
            .collect(),
    )
}

fn div_exact(a: &[u128], b: &[u128], p: u128) -> Poly {
    let db = b.len() - 1;
    let ib = inv(b[db], p);
    let mut r = a.to_vec();
    let mut q = vec![0u128; a.len() - db];
    while r.len() > db {
        let top = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        let f = mul_mod(top, ib, p);
        q[shift] = f;
        for (i, &c) in b.iter().enumerate() {
            r[shift + i] = sub_mod(r[shift + i], mul_mod(f, c, p), p);
        }
        r.pop();
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}

/// Splits a monic product of distinct linear factors into its roots.
fn split_linear(g: Poly, p: u128, out: &mut Vec<u128>) {
    let d = g.len() - 1;
    if d == 0 {
        return;
    }
    if d == 1 {
        out.push(sub_mod(0, g[0], p));
        return;
    }
    let half = (p - 1) / 2;
    for a in 0..p {
        // gcd(g, (X + a)^{(p-1)/2} - 1)
        let h = pow_rem(&[a, 1], half, &g, p);
        let h = sub_poly(&h, &[1], p);
        if h.is_empty() {
            continue;
        }
        let f = gcd(g.clone(), h, p);
        let df = f.len() - 1;
        if df > 0 && df < d {
            let other = div_exact(&g, &f, p);
            split_linear(f, p, out);
            split_linear(other, p, out);
            return;
        }
    }
    unreachable!("equal-degree splitting failed for p = {p}");
}

/// Largest prime handled by a plain residue scan.
const SCAN_LIMIT: u128 = 64;

/// Sorted roots in `[0, p)` of the polynomial with reduced coefficients
/// `coeffs` (low to high). `None` when the polynomial vanishes identically
/// mod p.
pub(crate) fn roots_mod_prime(coeffs: &[u128], p: u128) -> Option<Vec<u128>> {
    let f = trim(coeffs.iter().map(|&c| c % p).collect());
    if f.is_empty() {
        return None;
    }
    if f.len() == 1 {
        return Some(Vec::new());
    }
    if p <= SCAN_LIMIT || p <= 4 * f.len() as u128 {
        let roots = (0..p)
            .filter(|&x| crate::polyarith::eval_mod(&f, x, p) == 0)
            .collect();
        return Some(roots);
    }
    let f = make_monic(f, p);
    let xp = pow_rem(&[0, 1], p, &f, p);
    let g = gcd(f, sub_poly(&xp, &[0, 1], p), p);
    let mut roots = Vec::with_capacity(g.len() - 1);
    split_linear(g, p, &mut roots);
    roots.sort_unstable();
    Some(roots)
}
