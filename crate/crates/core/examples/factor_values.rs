//! Factorizations of n^2+1 on a short interval near 10^9, from the sieve
//! table, with Omega and the squarefree kernel of each value.

use majorant_lab::lhs::factor_values_in_interval;
use majorant_lab::{FactoredSystem, IntPoly};

fn main() -> majorant_lab::Result<()> {
    let s = FactoredSystem::single(IntPoly::from_i64s(&[1, 0, 1]))?;
    let table = factor_values_in_interval(&s, 1e9, 12.0, None)?;
    for row in &table.rows {
        let f = &row.q[0];
        let parts: Vec<String> = f
            .iter()
            .map(|(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        println!(
            "{:>10}^2+1 = {:<40} Omega {:>2}  kernel {}",
            row.n,
            parts.join(" * "),
            f.omega_big(),
            f.kappa().map_or("-".into(), |k| k.to_string())
        );
    }
    Ok(())
}
