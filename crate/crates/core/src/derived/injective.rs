//! Truncated injective resolutions by products of co-skyscrapers.

use std::sync::Arc;

use super::{Resolution, ResolutionKind};
use crate::cxalg::{Complex, ComplexMorphism, HomComplex};
use crate::error::{Error, Result};
use crate::finring::{injective_embedding, submodule, HomSpace, Module};
use crate::group;
use crate::linalg::Mat;
use crate::sheafmod::{co_skyscraper, direct_sum, quotient_sheaf, Sheaf, SheafMorphism};

/// Extends `iota : K -> E` along the inclusion `incl : K -> P` to an
/// `R`-linear `P -> E`; exists whenever `E` is injective.
pub(crate) fn extend(p: &Module, incl: &Mat, e: &Module, iota: &Mat) -> Result<Mat> {
    let hs = HomSpace::new(p, e)?;
    let (em, _) = hs.entry_map();
    let (n, m, k) = (e.dim(), p.dim(), incl.cols());
    let mut c = Mat::zeros(n * k, hs.dim());
    let mut orders = Vec::with_capacity(n * k);
    let mut target = Vec::with_capacity(n * k);
    for i in 0..n {
        for t in 0..k {
            for s in 0..hs.dim() {
                let v: i64 = (0..m).map(|j| incl.get(j, t) * em.get(i * m + j, s)).sum();
                c.set(i * k + t, s, v);
            }
            orders.push(e.orders()[i]);
            target.push(iota.get(i, t));
        }
    }
    let c = c.reduced_rows(&orders);
    let coords = group::preimage(&c, hs.module.orders(), &orders, &target)
        .ok_or_else(|| Error::NoSolution("map into an injective does not extend".into()))?;
    Ok(hs.to_matrix(&coords))
}

/// Embeds `P` into `⊕_x co_skyscraper(x, E_x)`, where `E_x` is an injective
/// hull-style envelope of the germs at `x` vanishing at every `y > x`.
pub fn injective_envelope(p: &Arc<Sheaf>) -> Result<(Arc<Sheaf>, SheafMorphism)> {
    let space = p.space().clone();
    let poset = space.poset().clone();
    let mut parts = Vec::new();
    for x in poset.points() {
        let above: Vec<usize> = poset.points().filter(|&y| poset.lt(x, y)).collect();
        let px = p.stalk(x);
        if px.is_zero() {
            continue;
        }
        let mut res = Mat::zeros(0, px.dim());
        let mut orders = Vec::new();
        for &y in &above {
            res = res.vstack(p.res(x, y));
            orders.extend_from_slice(p.stalk(y).orders());
        }
        let (_, gens) = group::kernel(&res, px.orders(), &orders);
        let (k, incl) = submodule(px, &gens);
        if k.is_zero() {
            continue;
        }
        let emb = injective_embedding(&k);
        let g = extend(px, &incl, &emb.module, &emb.iota)?;
        parts.push((x, co_skyscraper(&space, x, &emb.module)?, g));
    }
    let sheaves: Vec<&Sheaf> = parts.iter().map(|(_, s, _)| s).collect();
    let target = Arc::new(direct_sum(&space, &sheaves));
    let comps = poset
        .points()
        .map(|q| {
            let mut m = Mat::zeros(0, p.stalk(q).dim());
            for (x, s, g) in &parts {
                m = if poset.leq(q, *x) {
                    m.vstack(&g.mul(p.res(q, *x)))
                } else {
                    m.vstack(&Mat::zeros(s.stalk(q).dim(), p.stalk(q).dim()))
                };
            }
            m.reduced_rows(target.stalk(q).orders())
        })
        .collect();
    let iota = SheafMorphism::new(p.clone(), target.clone(), comps)?;
    Ok((target, iota))
}

/// Minimal depth accepted by [`inj_res`] for `m`.
pub fn min_depth(m: &Complex) -> Result<i64> {
    let dim = m.space().poset().dimension()? as i64;
    Ok(if m.is_empty() { dim } else { m.hi() + dim + 1 })
}

/// Injective resolution `M -> I` with `I` in degrees `≤ depth`; the
/// augmentation is a quasi-isomorphism in degrees `< depth`.
pub fn inj_res(m: &Arc<Complex>, depth: i64) -> Result<Resolution> {
    let min = min_depth(m)?;
    if depth < min {
        return Err(Error::DepthTooSmall { given: depth, min });
    }
    let space = m.space().clone();
    let points: Vec<usize> = space.poset().points().collect();
    if m.is_empty() {
        let complex = Arc::new(Complex::zero(space));
        let augmentation = ComplexMorphism::zero(m, &complex);
        return Ok(Resolution { kind: ResolutionKind::Injective, complex, augmentation });
    }
    let lo = m.lo();
    let mut terms: Vec<Arc<Sheaf>> = Vec::new();
    let mut diffs: Vec<SheafMorphism> = Vec::new();
    let mut augs: Vec<SheafMorphism> = Vec::new();
    // I^{n-1} modulo the image of d^{n-2}
    let mut quot: Option<(Arc<Sheaf>, SheafMorphism)> = None;
    for n in lo..=depth {
        let mn = m.term(n);
        let (s, into_q, into_m, rel) = match &quot {
            None => (mn.clone(), None, SheafMorphism::identity(mn), None),
            Some((q, proj)) => {
                let s = Arc::new(direct_sum(&space, &[&**q, &**mn]));
                let (a, b) = (q.clone(), mn.clone());
                let inc = |t: &Arc<Sheaf>, off: bool| {
                    let comps = points
                        .iter()
                        .map(|&p| {
                            let (dq, dm) = (a.stalk(p).dim(), b.stalk(p).dim());
                            let mut c = Mat::zeros(dq + dm, t.stalk(p).dim());
                            c.set_block(if off { dq } else { 0 }, 0, &Mat::identity(t.stalk(p).dim()));
                            c
                        })
                        .collect();
                    SheafMorphism::new(t.clone(), s.clone(), comps)
                };
                let iq = inc(&a, false)?;
                let im = inc(&b, true)?;
                let prev = augs.last().expect("augmentation in degree n - 1").then(proj);
                let rel = prev.then(&iq).sub(&m.diff(n - 1).then(&im));
                (s, Some(iq), im, Some(rel))
            }
        };
        let gens: Vec<Mat> = match &rel {
            Some(r) => r.comps.clone(),
            None => points.iter().map(|&p| Mat::zeros(s.stalk(p).dim(), 0)).collect(),
        };
        let (pn, pi, _) = quotient_sheaf(&s, &gens);
        if n > m.hi() && pn.is_zero() {
            break;
        }
        let (inj, e) = injective_envelope(&pn)?;
        let to_i = pi.then(&e);
        if let (Some(iq), Some((_, proj))) = (into_q, &quot) {
            diffs.push(proj.then(&iq).then(&to_i));
        }
        augs.push(into_m.then(&to_i));
        terms.push(inj.clone());
        let last = diffs.last().cloned();
        quot = Some(match last {
            None => (inj.clone(), SheafMorphism::identity(&inj)),
            Some(d) => {
                let (q, proj, _) = quotient_sheaf(&inj, &d.comps);
                (q, proj)
            }
        });
    }
    let complex = Arc::new(Complex::new(space, lo, terms, diffs)?);
    let n_aug = (m.hi() - lo + 1).max(0) as usize;
    augs.truncate(n_aug);
    let augmentation = ComplexMorphism::new(m.clone(), complex.clone(), lo, augs)?;
    Ok(Resolution { kind: ResolutionKind::Injective, complex, augmentation })
}

/// Derived Hom groups `Hom_D(M, N[i])` for `i` in a window, with the
/// resolution depth used for `N`.
#[derive(Clone, Debug)]
pub struct DerivedHom {
    pub depth: i64,
    /// `(i, invariant factors of Hom_D(M, N[i]))`
    pub groups: Vec<(i64, Vec<u64>)>,
    pub hom: HomComplex,
}

impl DerivedHom {
    pub fn at(&self, i: i64) -> &[u64] {
        self.groups.iter().find(|(k, _)| *k == i).map(|(_, g)| g.as_slice()).unwrap_or(&[])
    }
}

/// Highest degree `i` for which `Hom_D(M, N[i])` is certified when `N` is
/// resolved to depth `depth`: the discarded tail only meets `Hom^{≥ depth - hi(M)}`.
pub fn reliable_top(m: &Complex, depth: i64) -> i64 {
    if m.is_empty() {
        return i64::MAX;
    }
    depth - m.hi() - 1
}

/// `Hom_{D(X)}(M, N[i])` for `lo ≤ i ≤ hi`, via a truncated injective resolution of `N`.
/// A depth of `None` picks the smallest one covering the window.
pub fn hom_derived(m: &Arc<Complex>, n: &Arc<Complex>, window: (i64, i64), depth: Option<i64>) -> Result<DerivedHom> {
    let (lo, hi) = window;
    let need = if m.is_empty() { min_depth(n)? } else { (hi + m.hi() + 1).max(min_depth(n)?) };
    let depth = depth.unwrap_or(need);
    let rhi = reliable_top(m, depth);
    if hi > rhi {
        return Err(Error::WindowUnreliable { lo, hi, rlo: i64::MIN, rhi });
    }
    let res = inj_res(n, depth)?;
    let hom = HomComplex::new(m, &res.complex)?;
    let groups = (lo..=hi).map(|i| (i, hom.groups.cohomology_invariants(i))).collect();
    Ok(DerivedHom { depth, groups, hom })
}
