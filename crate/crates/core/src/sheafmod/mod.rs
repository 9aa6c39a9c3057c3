//! Sheaves of modules on finite ringed spaces.

mod ops;
mod sheaf;
mod space;

pub use ops::*;
pub(crate) use sheaf::all_strict_pairs as strict_pairs;
pub use sheaf::{direct_sum, quotient_sheaf, sub_sheaf, Sheaf, SheafMorphism};
pub use space::{RingedMap, RingedSpace};
pub use crate::derived::{classify, is_schematic_morphism, Classification};
