//! Sifted counts for X^2+1 against the sieve estimate.

use majorant_lab::harness::{verify_sieve_lemma, SieveGrid};
use majorant_lab::lhs::{sieve_count, sieve_rhs};
use majorant_lab::{FactoredSystem, IntPoly};

fn main() -> majorant_lab::Result<()> {
    let s = FactoredSystem::single(IntPoly::from_i64s(&[1, 0, 1]))?;
    let (x, y) = (1e5, 2e3);
    for a in [1u128, 2, 5, 10, 13] {
        let count = sieve_count(&s, &[a], 30, x, y, &[])?;
        let rhs = sieve_rhs(&s, &[a], 30, y)?;
        println!("a = {a:>2}, z = 30: count {count:>4}, estimate {rhs}");
    }
    let grid = SieveGrid {
        a: vec![vec![1], vec![2], vec![5]],
        z: vec![10, 50],
        x,
        y,
        alpha: 0.7,
        lo: 0.1,
        hi: 10.0,
    };
    for r in verify_sieve_lemma(&s, &grid)?.rows {
        println!("{}: {:.3}", r.param, r.ratio.to_f64());
    }
    Ok(())
}
