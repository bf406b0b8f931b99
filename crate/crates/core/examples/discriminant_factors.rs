//! Discriminants and the discriminant factors for X^2 + c and for shifted
//! pairs (X, X + l) with F = tau (x) tau.

use majorant_lab::bounds::{delta_d_k1, delta_dstar, delta_dstar_ceiling, delta_shift};
use majorant_lab::mfunc::tau_m;
use majorant_lab::polyarith::discriminant;
use majorant_lab::{FactoredSystem, IntPoly};

fn main() -> majorant_lab::Result<()> {
    let tau = tau_m(2, 1, 1e-3)?;
    let g = tau.minimal_g()?;
    println!("c,disc,delta_d,delta_d_tilde,delta_dstar,ceiling");
    for c in [1i64, 2, 3, 7, 12, 25, 60] {
        let q = IntPoly::from_i64s(&[c, 0, 1]);
        let d = discriminant(&q)?;
        let (delta, tilde) = delta_d_k1(&q, &tau)?;
        let s = FactoredSystem::single(q)?;
        let gt = g.pushforward(s.exponents())?;
        println!(
            "{c},{d},{delta},{tilde},{},{:.3}",
            delta_dstar(&s, &gt)?,
            delta_dstar_ceiling(&s, &gt)?
        );
    }
    println!();
    for ell in [1i64, 2, 6, 30, 210, 1024] {
        let d = delta_shift(ell, &tau, &tau)?;
        println!("delta({ell}) = {d} ~ {:.4}", num_traits::ToPrimitive::to_f64(&d).unwrap_or(f64::NAN));
    }
    Ok(())
}
