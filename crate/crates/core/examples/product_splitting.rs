//! `M_{E⊗F} = M_E ⊗ M_F` and `κ(E⊗F) = max(κ(E), κ(F))` on a few products.

use mdomain::analysis::{check_md_splitting, kappa_tensor_check};
use mdomain::gallery::{etb_channel, random_unital, schur_cycle_channel};
use mdomain::Tolerance;

fn main() -> mdomain::Result<()> {
    let tol = Tolerance::default();
    let pairs = [
        (etb_channel(3, 2, None, &tol)?, etb_channel(2, 2, None, &tol)?),
        (etb_channel(4, 3, None, &tol)?, etb_channel(3, 1, None, &tol)?),
        (schur_cycle_channel(3)?, random_unital(2, 7)?),
        (random_unital(3, 11)?, random_unital(3, 12)?),
    ];
    for (a, b) in &pairs {
        let split = check_md_splitting(a, b, &tol)?;
        let k = kappa_tensor_check(a, b, &tol)?;
        println!(
            "{} ⊗ {}: dim M = {} (split {}, distance {:.1e}); kappa {} vs max({}, {})",
            a.label(),
            b.label(),
            split.lhs.dim(),
            split.equal,
            split.distance,
            k.kappa_product,
            k.kappa_a,
            k.kappa_b
        );
    }
    Ok(())
}
