//! Rational quaternion algebras, their orders, and their matrix splittings.

mod algebra;
pub mod hilbert;
mod matrix;
mod order;

pub use algebra::{QuatAlgebra, QuatElement};
pub use hilbert::{discriminant, hilbert_symbol, is_indefinite, ramified_places, Place};
pub use matrix::*;
pub use order::{find_mu, riemann_form, LatticeOrder, ModPSplitting};
