//! Schur-multiplier cycles: index `d − 1` with `M_E ≅ M_{d−1} ⊕ M_1`.

use mdomain::algebra::wedderburn;
use mdomain::analysis::md_chain;
use mdomain::gallery::schur_cycle_channel;
use mdomain::Tolerance;

fn main() -> mdomain::Result<()> {
    let tol = Tolerance::default();
    for d in 3..=6 {
        let chain = md_chain(&schur_cycle_channel(d)?, &tol)?;
        let types = chain
            .domains
            .iter()
            .map(|m| wedderburn(m, &tol, 1).map(|w| w.ty.to_string()))
            .collect::<mdomain::Result<Vec<_>>>()?;
        println!("d={d}: kappa={} chain {}", chain.kappa, types.join(" ⊋ "));
    }
    Ok(())
}
