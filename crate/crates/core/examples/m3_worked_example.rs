//! The three-dimensional worked example: a chain `M_E ⊋ M_{E²} ⊋ M_{E³} = C·1`.
//!
//! ```text
//! cargo run --example m3_worked_example
//! ```

use mdomain::algebra::wedderburn;
use mdomain::analysis::analyze;
use mdomain::gallery::m3_example;
use mdomain::Tolerance;

fn main() -> mdomain::Result<()> {
    let tol = Tolerance::default();
    let ch = m3_example();
    let report = analyze(&ch, &tol, 0)?;

    println!("{} (d={})", report.label, report.dim);
    for (k, m) in report.chain.domains.iter().enumerate() {
        let ty = wedderburn(m, &tol, 0)?.ty;
        println!("  M_E^{} = {ty} (dim {})", k + 1, m.dim());
    }
    println!("kappa = {} (bound 2d-2 = {})", report.kappa, report.kappa_bound);
    println!("irreducible = {}, primitive = {}", report.irreducible, report.primitive);
    Ok(())
}
