//! Hermitian polar spaces `H(n, q^2)` in the field-tower model
//! `V = F_{q^2} × F_{q^{2n}}`, their ovoids, and searches for transitive
//! ovoids stabilized by subgroups of `G = ⟨ρ, φ⟩`.

pub mod arith;
pub mod bounds;
pub mod equiv;
pub mod error;
pub mod geometry;
pub mod gf;
pub mod group;
pub mod io;
mod linalg;
pub mod ovoid;
pub mod search;

pub use error::{Error, Result};
