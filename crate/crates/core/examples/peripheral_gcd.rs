//! Peripheral spectra of dephasing shifts multiply across a tensor product;
//! fixed points split exactly when the periods are coprime.

use mdomain::analysis::{fix_splitting_check, peripheral_spectrum};
use mdomain::channel::tensor;
use mdomain::gallery::dephasing_shift_channel;
use mdomain::Tolerance;

fn main() -> mdomain::Result<()> {
    let tol = Tolerance::default();
    for (p, q) in [(2, 2), (2, 3), (3, 3), (2, 5), (4, 6)] {
        let a = dephasing_shift_channel(p)?;
        let b = dephasing_shift_channel(q)?;
        let spectrum = peripheral_spectrum(&tensor(&a, &b), &tol)?;
        let fs = fix_splitting_check(&a, &b, &tol)?;
        println!(
            "shift({p}) ⊗ shift({q}): {} peripheral eigenvalues, dim Fix = {} vs {} split, splits = {}",
            spectrum.len(),
            fs.fix_product_dim,
            fs.fix_split_dim,
            fs.splits
        );
    }
    Ok(())
}
