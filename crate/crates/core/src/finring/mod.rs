//! Finite commutative rings and their finitely generated modules.

mod duality;
mod hom;
mod ideal;
mod module;
mod ring;

pub use duality::{character_module, coinduced, injective_embedding, Coinduced, InjectiveEmbedding};
pub use hom::{find_isomorphism, KerCoker, ModuleHom};
pub use ideal::{ideals, is_flat, multiplication_map, Ideal, DEFAULT_RING_CAP};
pub use module::*;
pub use ring::{same_ring, Elem, FiniteRing, RingHom};
