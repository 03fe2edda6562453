//! Correctable-code algebras factor over tensor products, and a channel and
//! its adjoint share their index.

use mdomain::analysis::{adjoint_index_check, ucc_tensor_check};
use mdomain::gallery::{dephasing_shift_channel, etb_channel, m3_example, schur_cycle_channel};
use mdomain::Tolerance;

fn main() -> mdomain::Result<()> {
    let tol = Tolerance::default();
    let gallery = [
        m3_example(),
        etb_channel(4, 3, None, &tol)?,
        schur_cycle_channel(4)?,
        dephasing_shift_channel(3)?,
    ];
    for ch in &gallery {
        let c = adjoint_index_check(ch, &tol)?;
        println!("{}: kappa(E) = {}, kappa(E*) = {}", ch.label(), c.kappa, c.kappa_adjoint);
    }
    let c = ucc_tensor_check(&gallery[0], &etb_channel(2, 2, None, &tol)?, &tol)?;
    println!("UCC(m3 ⊗ etb(2,2)) has dim {}, distance to the product {:.1e}", c.lhs.dim(), c.distance);
    Ok(())
}
