//! The lattice of maximal unital proper subalgebra types of `M_d`.
//!
//! ```text
//! cargo run --example mupsa_lattice -- 5 > lattice.dot
//! ```

use mdomain::mupsa::build_lattice;

fn main() -> mdomain::Result<()> {
    let d: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let lattice = build_lattice(d)?;
    let chain: Vec<String> = lattice.longest_chain().iter().map(|&i| lattice.nodes[i].to_string()).collect();
    eprintln!("d={d}: {} types, longest chain {}", lattice.nodes.len(), chain.len());
    eprintln!("  {}", chain.join(" → "));
    print!("{}", lattice.to_dot());
    Ok(())
}
