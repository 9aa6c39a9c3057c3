use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finring::{self as fr, base_change, Module, RingHom, DEFAULT_RING_CAP};
use crate::linalg::Mat;
use crate::poset::{PointSet, Poset};
use crate::sheafmod::{RingedMap, RingedSpace, Sections, Sheaf};

use super::local::LocalComplex;

/// Why a pair of points breaks semi-separatedness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparationFailure {
    /// `H^degree(U_p ∩ U_q, O) ≠ 0`
    Cohomology { p: usize, q: usize, degree: usize },
    /// `O(U_p ∩ U_q) ⊗_{O_p} O_{p'} -> O(U_{p'} ∩ U_q)` is not an isomorphism
    BaseChange { p: usize, q: usize, p_prime: usize },
}

impl SeparationFailure {
    pub fn describe(&self, poset: &Poset) -> String {
        let n = |p: &usize| poset.name(*p).to_string();
        match self {
            SeparationFailure::Cohomology { p, q, degree } => {
                format!("H^{degree}(U_{} ∩ U_{}, O) ≠ 0", n(p), n(q))
            }
            SeparationFailure::BaseChange { p, q, p_prime } => format!(
                "O(U_{p} ∩ U_{q}) ⊗ O_{pp} -> O(U_{pp} ∩ U_{q}) is not an isomorphism",
                p = n(p),
                q = n(q),
                pp = n(p_prime)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub finite_space: bool,
    pub semi_separated: bool,
    pub schematic: bool,
    /// first restriction `O_p -> O_q` that is not flat
    pub flat_failure: Option<(usize, usize)>,
    pub separation_failure: Option<SeparationFailure>,
    pub schematic_failure: Option<SeparationFailure>,
}

fn intersection(a: &[usize], b: &[usize]) -> PointSet {
    a.iter().copied().filter(|p| b.contains(p)).collect()
}

fn first_non_flat(x: &RingedSpace) -> Result<Option<(usize, usize)>> {
    let poset = x.poset();
    for (p, q) in crate::sheafmod::strict_pairs(poset) {
        let m = Module::regular(x.ring(q).clone()).restrict(x.res(p, q))?;
        if !fr::is_flat(&m, DEFAULT_RING_CAP)? {
            return Ok(Some((p, q)));
        }
    }
    Ok(None)
}

/// Conditions (a) and (b) for one pair `p, q`.
fn pair_failure(x: &Arc<RingedSpace>, o: &Sheaf, p: usize, q: usize) -> Result<Option<SeparationFailure>> {
    let poset = x.poset();
    let w = intersection(&poset.up_set(p), &poset.up_set(q));
    if !w.is_empty() {
        let lc = LocalComplex::new(o, &w, x.ring(p), |v| x.res(p, v).clone());
        for i in 1..=poset.height_within(&w) + 1 {
            if !lc.cohomology(i).0.is_zero() {
                return Ok(Some(SeparationFailure::Cohomology { p, q, degree: i }));
            }
        }
    }
    let sec = Sections::new(o, &w);
    let maps: Vec<RingHom> = sec.points.iter().map(|&v| x.res(p, v).clone()).collect();
    let src = sec.module_over(o, x.ring(p), &maps);
    for p2 in poset.up_set(p) {
        if p2 == p {
            continue;
        }
        let w2 = intersection(&poset.up_set(p2), &poset.up_set(q));
        let sec2 = Sections::new(o, &w2);
        let maps2: Vec<RingHom> = sec2.points.iter().map(|&v| x.res(p2, v).clone()).collect();
        let tgt = sec2.module_over(o, x.ring(p2), &maps2);
        let bc = base_change(&src, x.res(p, p2))?;
        let map = bc.adjoint(&tgt, &sec.restriction_to(&sec2));
        if !fr::is_iso(&bc.module, &tgt, &map) {
            return Ok(Some(SeparationFailure::BaseChange { p, q, p_prime: p2 }));
        }
    }
    Ok(None)
}

/// Finite-space, semi-separated and schematic tests with the first witness of failure.
pub fn classify(x: &Arc<RingedSpace>) -> Result<Classification> {
    let flat_failure = first_non_flat(x)?;
    let finite_space = flat_failure.is_none();
    let o = Sheaf::structure(x.clone());
    let poset = x.poset();
    let mut separation_failure = None;
    let mut schematic_failure = None;
    if finite_space {
        for p in poset.points() {
            for q in poset.points() {
                if separation_failure.is_some() && schematic_failure.is_some() {
                    break;
                }
                let bounded = poset.points().any(|r| poset.leq(r, p) && poset.leq(r, q));
                if separation_failure.is_none() || (bounded && schematic_failure.is_none()) {
                    if let Some(f) = pair_failure(x, &o, p, q)? {
                        if bounded && schematic_failure.is_none() {
                            schematic_failure = Some(f.clone());
                        }
                        separation_failure.get_or_insert(f);
                    }
                }
            }
        }
    }
    Ok(Classification {
        finite_space,
        semi_separated: finite_space && separation_failure.is_none(),
        schematic: finite_space && schematic_failure.is_none(),
        flat_failure,
        separation_failure,
        schematic_failure,
    })
}

/// A failing instance of the schematic-morphism criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismFailure {
    pub x: usize,
    pub x_prime: usize,
    pub y: usize,
    pub y_prime: usize,
    pub degree: usize,
    /// `true` for the base change along `O_x -> O_{x'}`, `false` along `O_y -> O_{y'}`
    pub along_source: bool,
}

/// First failure of the base-change criterion for `H^i(U_x ∩ f^{-1} U_y, O_X)`.
pub fn schematic_morphism_failure(f: &RingedMap) -> Result<Option<MorphismFailure>> {
    let (x, y) = (&f.source, &f.target);
    for s in [x, y] {
        if first_non_flat(s)?.is_some() {
            return Err(Error::Precondition("schematic morphisms need finite spaces".into()));
        }
    }
    let (xs, ys) = (x.poset(), y.poset());
    let o = Sheaf::structure(x.clone());
    let dim = xs.dimension()?;
    let w = |a: usize, b: usize| intersection(&xs.up_set(a), &f.map.preimage(&ys.up_set(b)));
    let over_x = |a: usize, b: usize| LocalComplex::new(&o, &w(a, b), x.ring(a), |v| x.res(a, v).clone());
    let over_y = |a: usize, b: usize| {
        LocalComplex::new(&o, &w(a, b), y.ring(b), |v| {
            y.res(b, f.apply(v)).then(&f.comparison[v]).expect("composable ring maps")
        })
    };
    let iso_after_base_change = |src: &LocalComplex, tgt: &LocalComplex, i: usize, phi: &RingHom| -> Result<bool> {
        let (hs, ms) = src.cohomology(i);
        let (ht, mt) = tgt.cohomology(i);
        let r: Mat = src.restriction(tgt, i, &hs, &ht);
        let bc = base_change(&ms, phi)?;
        let map = bc.adjoint(&mt, &r);
        Ok(fr::is_iso(&bc.module, &mt, &map))
    };
    for a in xs.points() {
        for b in ys.points() {
            let base_x = over_x(a, b);
            let base_y = over_y(a, b);
            for a2 in xs.up_set(a).into_iter().filter(|&a2| a2 != a) {
                let t = over_x(a2, b);
                for i in 0..=dim {
                    if !iso_after_base_change(&base_x, &t, i, x.res(a, a2))? {
                        return Ok(Some(MorphismFailure { x: a, x_prime: a2, y: b, y_prime: b, degree: i, along_source: true }));
                    }
                }
            }
            for b2 in ys.up_set(b).into_iter().filter(|&b2| b2 != b) {
                let t = over_y(a, b2);
                for i in 0..=dim {
                    if !iso_after_base_change(&base_y, &t, i, y.res(b, b2))? {
                        return Ok(Some(MorphismFailure { x: a, x_prime: a, y: b, y_prime: b2, degree: i, along_source: false }));
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn is_schematic_morphism(f: &RingedMap) -> Result<bool> {
    Ok(schematic_morphism_failure(f)?.is_none())
}
