//! Multiplicative domains, multiplicative indices, fixed-point algebras and
//! peripheral spectra of unital quantum channels given in Kraus form.
//!
//! ```
//! use mdomain::{analysis::md_chain, gallery::m3_example, Tolerance};
//!
//! let chain = md_chain(&m3_example(), &Tolerance::default()).unwrap();
//! assert_eq!(chain.kappa, 3);
//! assert_eq!(chain.dims(), vec![3, 2, 1]);
//! ```

pub mod algebra;
pub mod analysis;
pub mod channel;
pub mod cli;
pub mod error;
pub mod gallery;
pub mod linalg;
pub mod mupsa;
pub mod verify;

pub use algebra::{OperatorSubspace, WedderburnType};
pub use channel::{Channel, Superoperator};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Tolerance, C64};
