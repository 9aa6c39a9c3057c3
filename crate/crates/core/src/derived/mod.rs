//! Resolutions and derived functors: `C^•`, `Č^•`, `RΓ`, `Rf_*`, `Qc`, `RQc`,
//! injective resolutions, `f^∇`, `f^!`, derived Hom, the `D_qc` coherator and
//! flat quasi-coherent resolutions.

use std::sync::Arc;

use crate::cxalg::{block_morphism, Complex, ComplexMorphism};
use crate::group;
use crate::sheafmod::{Sheaf, SheafMorphism};

mod cech;
mod chains;
mod classify;
mod coherator;
mod duality;
mod flat;
mod injective;
mod local;
mod qc;
mod standard;

pub use classify::{
    classify, is_schematic_morphism, schematic_morphism_failure, Classification, MorphismFailure, SeparationFailure,
};
pub use cech::{pseudo_cech, push_cech};
pub use coherator::{dqc_coherator, Coherator};
pub use duality::{duality_check, f_nabla, f_shriek, DualityReport, Nabla, Shriek};
pub use flat::{flat_qcoh_res, flat_qcoh_res_with, FlatResolution};
pub use injective::{hom_derived, inj_res, injective_envelope, min_depth, reliable_top, DerivedHom};
pub use qc::{bn_check, qc, qc_derived, qc_to_cech, rqc_push, BnReport, DerivedQc, Quasicoherator, RqcPush};
pub use standard::{gamma_derived, push_derived, sheaf_cohomology, standard, standard_sheaf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionKind {
    Standard,
    PseudoCech,
    Injective,
    FlatQcoh,
}

/// A complex `R` with an augmentation `M -> R` (`R -> M` for flat resolutions).
#[derive(Clone, Debug)]
pub struct Resolution {
    pub kind: ResolutionKind,
    pub complex: Arc<Complex>,
    pub augmentation: ComplexMorphism,
}

/// Places degreewise maps `M^n -> R^{0,n}` into the first summand of a total complex.
pub(crate) fn place_in_column_zero(
    m: &Arc<Complex>,
    total: &Arc<Complex>,
    parts: impl Fn(i64) -> Vec<Arc<Sheaf>>,
    aug: impl Fn(i64) -> SheafMorphism,
) -> ComplexMorphism {
    if m.is_empty() {
        return ComplexMorphism::zero(m, total);
    }
    let comps = (m.lo()..=m.hi())
        .map(|n| {
            let ps = parts(n);
            let refs: Vec<&Sheaf> = ps.iter().map(|s| &**s).collect();
            block_morphism(m.term(n), &[m.term(n)], total.term(n), &refs, &[(0, 0, aug(n))])
        })
        .collect();
    ComplexMorphism::from_parts(m.clone(), total.clone(), m.lo(), comps)
}

/// First degree and point where a morphism fails to induce an isomorphism
/// on cohomology, restricted to degrees `≤ up_to` when given.
pub fn quasi_iso_failure(f: &ComplexMorphism, up_to: Option<i64>) -> Option<(i64, usize)> {
    let (a, b) = (&f.source, &f.target);
    let lo = a.lo().min(b.lo());
    let mut hi = a.hi().max(b.hi());
    if let Some(u) = up_to {
        hi = hi.min(u);
    }
    for n in lo..=hi {
        for p in a.space().poset().points() {
            let ha = a.stalk_cohomology(n, p);
            let hb = b.stalk_cohomology(n, p);
            let m = ha.induced(&f.comp(n).comps[p], &hb);
            if !group::is_injective(&m, &ha.orders, &hb.orders) || !group::is_surjective(&m, &hb.orders) {
                return Some((n, p));
            }
        }
    }
    None
}
