//! Hide a block algebra behind a random unitary and recover its type.

use mdomain::algebra::{embed_type, wedderburn};
use mdomain::gallery::random_unitary;
use mdomain::{Tolerance, WedderburnType};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mdomain::Result<()> {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for spec in ["M2⊕M1⊗1_2", "M3⊕M1", "M1⊗1_3⊕M1", "M2⊗1_2"] {
        let ty: WedderburnType = spec.parse()?;
        let hidden = embed_type(&ty).conjugate(&random_unitary(ty.unital_dim(), &mut rng));
        let found = wedderburn(&hidden, &tol, 0)?;
        println!("{ty:>12} -> {} (dim {}, blocks {})", found.ty, hidden.dim(), found.blocks.len());
    }
    Ok(())
}
