//! Bounded complexes of sheaves: cones, totalization, cohomology, Hom complexes.
//!
//! Sign conventions: total complexes use `d = d_h + (-1)^p d_v`; Hom
//! complexes use `δf = d∘f - (-1)^n f∘d`; cones use `d(c, d) = (-dc, φc + dd)`.

mod bicomplex;
mod complex;
mod groups;
mod hom;

pub use bicomplex::Bicomplex;
pub use complex::{cone, in_dqc, shift_morphism, Complex, ComplexMorphism, Cone};
pub(crate) use complex::block_morphism;
pub use groups::{group_quasi_iso, GroupCohom, GroupComplex};
pub use hom::{HomBlock, HomComplex};
