//! The right-hand sides for X^2+1 with F = tau; rational against double-double.

use majorant_lab::bounds::{rhs_cor_disc, rhs_cor_mult, rhs_main, BoundParams, PrimeTable};
use majorant_lab::mfunc::tau_m;
use majorant_lab::scalar::Mode;
use majorant_lab::{FactoredSystem, IntPoly};

fn main() -> majorant_lab::Result<()> {
    let s = FactoredSystem::single(IntPoly::from_i64s(&[1, 0, 1]))?;
    let f = tau_m(2, 1, 1e-3)?;
    for x in [1e3, 1e4, 1e5] {
        let params = BoundParams { x, y: x.sqrt().floor(), ..BoundParams::default() };
        let table = PrimeTable::new(&s, x as u64)?;
        let float = rhs_main(&s, &f, &params, Some(&table), Mode::Float)?;
        // rational arithmetic gets slow past x = 10^4
        let exact = if x <= 1e4 { rhs_main(&s, &f, &params, Some(&table), Mode::Exact)?.to_f64() } else { f64::NAN };
        let disc = rhs_cor_disc(&s, &f, &params, Some(&table), Mode::Float)?;
        let mult = rhs_cor_mult(&s, &f, &params, Some(&table), Mode::Float)?;
        println!(
            "x = {x:e}: main {:.6} (float {:.6}), cor-disc {:.6}, cor-mult {:.6}",
            exact,
            float.to_f64(),
            disc.to_f64(),
            mult.to_f64()
        );
    }
    Ok(())
}
