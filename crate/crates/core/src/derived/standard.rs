use std::collections::HashMap;
use std::sync::Arc;

use crate::cxalg::{Bicomplex, Complex, ComplexMorphism, GroupComplex};
use crate::error::Result;
use crate::finring::{FiniteRing, Module, RingHom};
use crate::linalg::{lcm_all, Mat};
use crate::sheafmod::{RingedMap, RingedSpace, Sheaf, SheafMorphism};

use super::chains::{face, sign, ChainProduct};
use super::{place_in_column_zero, Resolution, ResolutionKind};

/// `f_* C^p M`: stalk at `y` is `∏ M_{x_p}` over chains with `f(x_0) ≥ y`.
/// Only chains inside the open set `within` are used.
pub(crate) fn standard_term(f: &RingedMap, m: &Sheaf, p: usize, within: &[usize]) -> ChainProduct {
    let (x, y) = (&f.source, &f.target);
    let chains = x.poset().chains(p, within);
    let mods: Vec<Module> = chains.iter().map(|c| m.stalk(*c.last().unwrap()).clone()).collect();
    let keys: Vec<usize> = chains.iter().map(|c| f.apply(c[0])).collect();
    let lasts: Vec<usize> = chains.iter().map(|c| *c.last().unwrap()).collect();
    ChainProduct::new(
        y,
        chains,
        &mods,
        |b, c| y.poset().leq(b, keys[c]),
        |b, c| y.res(b, f.apply(lasts[c])).then(&f.comparison[lasts[c]]).expect("composable ring maps"),
    )
}

/// Global matrix of `d : C^p M -> C^{p+1} M`.
pub(crate) fn standard_diff(m: &Sheaf, src: &ChainProduct, tgt: &ChainProduct) -> Mat {
    let index: HashMap<&[usize], usize> = src.chains.iter().enumerate().map(|(k, c)| (c.as_slice(), k)).collect();
    let mut d = Mat::zeros(tgt.global_orders.len(), src.global_orders.len());
    for (t, c) in tgt.chains.iter().enumerate() {
        let last = c.len() - 1;
        for k in 0..=last {
            let s = index[face(c, k).as_slice()];
            if k < last {
                d.add_block(tgt.offsets[t], src.offsets[s], &m.stalk(c[last]).identity(), sign(k));
            } else {
                d.add_block(tgt.offsets[t], src.offsets[s], m.res(c[last - 1], c[last]), sign(k));
            }
        }
    }
    d.reduced_rows(&tgt.global_orders)
}

/// Global matrix of `C^p(φ)`, projecting onto the chains of `tgt` (a subset of those of `src`).
pub(crate) fn standard_map(phi: &SheafMorphism, src: &ChainProduct, tgt: &ChainProduct) -> Mat {
    let index: HashMap<&[usize], usize> = src.chains.iter().enumerate().map(|(k, c)| (c.as_slice(), k)).collect();
    let mut out = Mat::zeros(tgt.global_orders.len(), src.global_orders.len());
    for (t, c) in tgt.chains.iter().enumerate() {
        out.set_block(tgt.offsets[t], src.offsets[index[c.as_slice()]], &phi.comps[*c.last().unwrap()]);
    }
    out.reduced_rows(&tgt.global_orders)
}

/// `f_* C^• M` for a complex `M`, kept with its bicomplex.
#[derive(Clone, Debug)]
pub(crate) struct StandardData {
    pub bicomplex: Option<Bicomplex>,
    /// `cps[q - lo][p]`
    pub cps: Vec<Vec<ChainProduct>>,
    pub total: Arc<Complex>,
    pub lo: i64,
    pub dim: usize,
}

impl StandardData {
    pub fn new(f: &RingedMap, m: &Complex) -> Result<Self> {
        Ok(Self::with_dim(f, m, f.source.poset().dimension()?))
    }

    /// Same, with columns `0..=dim` (`dim` at least the dimension of the source).
    pub fn with_dim(f: &RingedMap, m: &Complex, dim: usize) -> Self {
        Self::within(f, m, dim, &f.source.poset().whole())
    }

    /// `f_* j_* C^•(M|_U)` for an open `U` of the source, with columns `0..=dim`.
    pub fn within(f: &RingedMap, m: &Complex, dim: usize, within: &[usize]) -> Self {
        if m.is_empty() {
            return StandardData {
                bicomplex: None,
                cps: Vec::new(),
                total: Arc::new(Complex::zero(f.target.clone())),
                lo: 0,
                dim,
            };
        }
        let (lo, hi) = (m.lo(), m.hi());
        let cps: Vec<Vec<ChainProduct>> =
            (lo..=hi).map(|q| (0..=dim).map(|p| standard_term(f, m.term(q), p, within)).collect()).collect();
        let at = |p: i64, q: i64| &cps[(q - lo) as usize][p as usize];
        let bic = Bicomplex::build(
            f.target.clone(),
            (0, dim as i64),
            (lo, hi),
            |p, q| at(p, q).sheaf.clone(),
            |p, q, _, _| {
                let (s, t) = (at(p, q), at(p + 1, q));
                s.morphism(t, &standard_diff(m.term(q), s, t))
            },
            |p, q, _, _| {
                let (s, t) = (at(p, q), at(p, q + 1));
                s.morphism(t, &standard_map(&m.diff(q), s, t))
            },
        );
        let total = Arc::new(bic.total());
        StandardData { bicomplex: Some(bic), cps, total, lo, dim }
    }

    pub fn cp(&self, p: i64, q: i64) -> &ChainProduct {
        &self.cps[(q - self.lo) as usize][p as usize]
    }

    /// Parts of the total term in degree `n`, ordered by `p`.
    pub fn parts(&self, n: i64) -> Vec<(i64, Arc<Sheaf>)> {
        let hi = self.lo + self.cps.len() as i64 - 1;
        (0..=self.dim as i64)
            .filter(|&p| n - p >= self.lo && n - p <= hi)
            .map(|p| (p, self.cp(p, n - p).sheaf.clone()))
            .collect()
    }

    /// `f_* C^•(φ)` between two standard data over the same map.
    pub fn morphism_to(&self, other: &StandardData, phi: &ComplexMorphism) -> ComplexMorphism {
        match (&self.bicomplex, &other.bicomplex) {
            (Some(a), Some(b)) => a.total_morphism(b, &self.total, &other.total, |p, q| {
                let (s, t) = (self.cp(p, q), other.cp(p, q));
                s.morphism(t, &standard_map(&phi.comp(q), s, t))
            }),
            _ => ComplexMorphism::zero(&self.total, &other.total),
        }
    }
}

/// Augmentation `M -> C^0 M`, the diagonal into chains of length 0.
pub(crate) fn standard_augmentation(m: &Arc<Sheaf>, c0: &ChainProduct) -> SheafMorphism {
    let space = m.space().clone();
    let comps = space
        .poset()
        .points()
        .map(|x| {
            let mut a = Mat::zeros(c0.sheaf.stalk(x).dim(), m.stalk(x).dim());
            for (c, chain) in c0.chains.iter().enumerate() {
                if let Some(off) = c0.local[x][c] {
                    a.set_block(off, 0, m.res(x, chain[0]));
                }
            }
            a
        })
        .collect();
    SheafMorphism::from_parts(m.clone(), c0.sheaf.clone(), comps)
}

/// Standard resolution `M -> C^• M` (totalized for complexes).
pub fn standard(m: &Arc<Complex>) -> Result<Resolution> {
    let id = RingedMap::identity(m.space().clone());
    Ok(resolution_from(m, &StandardData::new(&id, m)?))
}

/// The resolution `M -> C^• M` for already built data over the identity.
pub(crate) fn resolution_from(m: &Arc<Complex>, data: &StandardData) -> Resolution {
    let parts = |n: i64| -> Vec<Arc<Sheaf>> { data.parts(n).into_iter().map(|(_, s)| s).collect() };
    let augmentation = place_in_column_zero(m, &data.total, parts, |n| standard_augmentation(m.term(n), data.cp(0, n)));
    Resolution { kind: ResolutionKind::Standard, complex: data.total.clone(), augmentation }
}

/// Standard resolution of a single sheaf placed in degree 0.
pub fn standard_sheaf(m: &Arc<Sheaf>) -> Result<Resolution> {
    standard(&Arc::new(Complex::single(m.clone(), 0)))
}

/// `R f_* M`, computed as `f_* C^• M`.
pub fn push_derived(f: &RingedMap, m: &Complex) -> Result<Complex> {
    Ok((*StandardData::new(f, m)?.total).clone())
}

/// Map to a point whose ring is `Z/N`, `N` the common characteristic.
pub(crate) fn to_prime_point(x: &Arc<RingedSpace>) -> Result<RingedMap> {
    let n = lcm_all(x.rings().iter().flat_map(|r| r.orders().iter())).max(1);
    let k = Arc::new(FiniteRing::cyclic(n));
    let structure = x.rings().iter().map(|r| RingHom::from_cyclic(k.clone(), r.clone())).collect::<Result<Vec<_>>>()?;
    RingedMap::to_point(x.clone(), k, structure)
}

/// `Γ(X, C^• M)`, whose cohomology is `H^i(X, M)`.
pub fn gamma_derived(m: &Complex) -> Result<GroupComplex> {
    let f = to_prime_point(m.space())?;
    let total = push_derived(&f, m)?;
    Ok(total.stalk_groups(0))
}

/// Invariant factors of `H^i(X, M)` for `i = 0 ..= dim X`.
pub fn sheaf_cohomology(m: &Arc<Sheaf>) -> Result<Vec<Vec<u64>>> {
    let g = gamma_derived(&Complex::single(m.clone(), 0))?;
    let dim = m.space().poset().dimension()? as i64;
    Ok((0..=dim).map(|i| g.cohomology_invariants(i)).collect())
}
