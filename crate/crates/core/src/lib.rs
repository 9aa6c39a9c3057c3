//! Sheaves of modules on finite ringed spaces and their derived functors.

pub mod error;
pub mod finring;
pub mod fixtures;
pub mod group;
pub mod linalg;
pub mod poset;
pub mod random;
pub mod cxalg;
pub mod derived;
pub mod sheafmod;

pub use error::{Error, Result};
pub use finring::{FiniteRing, Module, ModuleHom, RingHom};
pub use linalg::Mat;
pub use poset::{ChainIndex, MonotoneMap, PointSet, Poset};
pub use sheafmod::{RingedMap, RingedSpace, Sheaf, SheafMorphism};
