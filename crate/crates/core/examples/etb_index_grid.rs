//! Entanglement-breaking channels built to have every index `1..=d`.

use mdomain::analysis::md_chain;
use mdomain::gallery::etb_channel;
use mdomain::Tolerance;

fn main() -> mdomain::Result<()> {
    let tol = Tolerance::default();
    println!("d  r  kappa  chain dims");
    for d in 2..=6 {
        for r in 1..=d {
            let chain = md_chain(&etb_channel(d, r, None, &tol)?, &tol)?;
            println!("{d}  {r}  {:>5}  {:?}", chain.kappa, chain.dims());
        }
    }
    Ok(())
}
