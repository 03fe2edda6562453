//! Two index-one unitary channels whose even mixture has index two.

use mdomain::analysis::{convex_md_check, md_chain};
use mdomain::channel::{convex_combine, tensor};
use mdomain::gallery::omega_pair;
use mdomain::Tolerance;

fn main() -> mdomain::Result<()> {
    let tol = Tolerance::default();
    let (e1, e2) = omega_pair();
    let mix = convex_combine(&[(0.5, &e1), (0.5, &e2)])?;
    let chain = md_chain(&mix, &tol)?;
    println!("{}: kappa = {}, dims {:?}", mix.label(), chain.kappa, chain.dims());
    for k in 1..=3 {
        let c = convex_md_check(&e1, &e2, 0.5, k, &tol)?;
        println!("  k={k}: dim M = {}, formula distance {:.1e}", c.direct.dim(), c.distance);
    }

    let nine = convex_combine(&[(0.5, &tensor(&e1, &e1)), (0.5, &tensor(&e2, &e2))])?;
    let chain = md_chain(&nine, &tol)?;
    println!("separable 9-dim mixture: kappa = {}, dims {:?}", chain.kappa, chain.dims());
    Ok(())
}
