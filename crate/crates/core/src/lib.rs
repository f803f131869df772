//! Decomposable entanglement witnesses and completely entangled subspaces on
//! small bipartite Hilbert spaces `C^m ⊗ C^n`.
//!
//! The crate builds witnesses `W = aP + (1−a)Q^Γ`, checks the entanglement
//! witness conditions, enumerates the product vectors on which a witness
//! vanishes, and certifies optimality whenever those vectors span the space.

pub mod document;
pub mod error;
pub mod families;
pub mod fixtures;
pub mod random;
pub mod reproduce;
pub mod seesaw;
pub mod subspace;
pub mod tensor;
pub mod witness;

pub use error::{Error, Result};
pub use families::{ProductFamily, SpanCertificate};
pub use subspace::{CesCertificate, CesOptions, Subspace};
pub use tensor::{BipartiteDims, CMat, CVec, ProductVector};
