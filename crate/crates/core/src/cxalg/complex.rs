use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finring::{self as fr, Module};
use crate::linalg::Mat;
use crate::sheafmod::{direct_sum, RingedSpace, Sheaf, SheafMorphism};

use super::groups::{group_quasi_iso, GroupCohom, GroupComplex};

/// Bounded complex of sheaves, terms in degrees `lo ..= hi`.
#[derive(Clone, Debug)]
pub struct Complex {
    space: Arc<RingedSpace>,
    lo: i64,
    terms: Vec<Arc<Sheaf>>,
    /// `diffs[k] : terms[k] -> terms[k + 1]`
    diffs: Vec<SheafMorphism>,
    zero: Arc<Sheaf>,
}

impl Complex {
    pub fn new(space: Arc<RingedSpace>, lo: i64, terms: Vec<Arc<Sheaf>>, diffs: Vec<SheafMorphism>) -> Result<Self> {
        if diffs.len() + 1 != terms.len().max(1) {
            return Err(Error::InvalidComplex("need one differential between consecutive terms".into()));
        }
        for t in &terms {
            if *t.space() != space {
                return Err(Error::SpaceMismatch);
            }
        }
        for (k, d) in diffs.iter().enumerate() {
            if *d.source != *terms[k] || *d.target != *terms[k + 1] || !d.is_valid() {
                return Err(Error::InvalidComplex(format!("differential in degree {} is not a morphism", lo + k as i64)));
            }
        }
        let c = Complex::from_parts(space, lo, terms, diffs);
        for k in 0..c.diffs.len().saturating_sub(1) {
            if !c.diffs[k].then(&c.diffs[k + 1]).is_zero() {
                return Err(Error::InvalidComplex(format!("d∘d ≠ 0 in degree {}", lo + k as i64)));
            }
        }
        Ok(c)
    }

    pub(crate) fn from_parts(space: Arc<RingedSpace>, lo: i64, terms: Vec<Arc<Sheaf>>, diffs: Vec<SheafMorphism>) -> Self {
        let zero = Arc::new(Sheaf::zero(space.clone()));
        Complex { space, lo, terms, diffs, zero }
    }

    pub fn zero(space: Arc<RingedSpace>) -> Self {
        Complex::from_parts(space, 0, Vec::new(), Vec::new())
    }

    /// A single sheaf placed in degree `n`.
    pub fn single(m: Arc<Sheaf>, n: i64) -> Self {
        Complex::from_parts(m.space().clone(), n, vec![m], Vec::new())
    }

    /// Two-term complex `a -> b` with `a` in degree `n`.
    pub fn two_term(d: SheafMorphism, n: i64) -> Self {
        let space = d.source.space().clone();
        Complex::from_parts(space, n, vec![d.source.clone(), d.target.clone()], vec![d])
    }

    pub fn space(&self) -> &Arc<RingedSpace> {
        &self.space
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, n: i64) -> &Arc<Sheaf> {
        if n < self.lo || n > self.hi() {
            return &self.zero;
        }
        &self.terms[(n - self.lo) as usize]
    }

    /// `d^n : C^n -> C^{n+1}`.
    pub fn diff(&self, n: i64) -> SheafMorphism {
        if n < self.lo || n >= self.hi() {
            return SheafMorphism::zero(self.term(n), self.term(n + 1));
        }
        self.diffs[(n - self.lo) as usize].clone()
    }

    pub fn terms(&self) -> &[Arc<Sheaf>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.is_zero())
    }

    /// Drops zero terms at both ends.
    pub fn trimmed(&self) -> Complex {
        let mut a = 0;
        let mut b = self.terms.len();
        while a < b && self.terms[a].is_zero() {
            a += 1;
        }
        while b > a && self.terms[b - 1].is_zero() {
            b -= 1;
        }
        if a == b {
            return Complex::zero(self.space.clone());
        }
        Complex::from_parts(
            self.space.clone(),
            self.lo + a as i64,
            self.terms[a..b].to_vec(),
            self.diffs[a..b - 1].to_vec(),
        )
    }

    /// Complex of stalks at `p` as abelian groups.
    pub fn stalk_groups(&self, p: usize) -> GroupComplex {
        GroupComplex::new(
            self.lo,
            self.terms.iter().map(|t| t.stalk(p).orders().to_vec()).collect(),
            self.diffs.iter().map(|d| d.comps[p].clone()).collect(),
        )
    }

    /// `C[k]`, with `C[k]^n = C^{n+k}` and differential `(-1)^k d`.
    pub fn shift(&self, k: i64) -> Complex {
        let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        Complex::from_parts(
            self.space.clone(),
            self.lo - k,
            self.terms.clone(),
            self.diffs.iter().map(|d| d.scale(sign)).collect(),
        )
    }

    /// Stalkwise cohomology data in degree `n`.
    pub fn stalk_cohomology(&self, n: i64, p: usize) -> GroupCohom {
        let c = self.term(n);
        GroupCohom::new(&self.diff(n - 1).comps[p], c.stalk(p).orders(), &self.diff(n).comps[p], self.term(n + 1).stalk(p).orders())
    }

    /// Cohomology sheaf `H^n(C)` with per-point data.
    pub fn cohomology(&self, n: i64) -> (Arc<Sheaf>, Vec<GroupCohom>) {
        let c = self.term(n);
        let poset = self.space.poset().clone();
        let data: Vec<GroupCohom> = poset.points().map(|p| self.stalk_cohomology(n, p)).collect();
        let stalks: Vec<Module> = poset
            .points()
            .map(|p| {
                let h = &data[p];
                let action = c.stalk(p).action().iter().map(|a| h.induced(a, h)).collect();
                fr::Module::new(self.space.ring(p).clone(), h.orders.clone(), action).expect("cohomology is a module")
            })
            .collect();
        let sheaf = Sheaf::from_fn(self.space.clone(), stalks, |p, q| data[p].induced(c.res(p, q), &data[q]));
        (Arc::new(sheaf), data)
    }

    pub fn is_acyclic(&self) -> bool {
        self.space.poset().points().all(|p| self.stalk_groups(p).is_acyclic())
    }

    /// Whether every cohomology sheaf is quasi-coherent.
    pub fn has_qc_cohomology(&self) -> Result<bool> {
        for n in self.lo..=self.hi() {
            if !self.cohomology(n).0.is_quasicoherent()? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Morphism of complexes with components in degrees `lo ..`.
#[derive(Clone, Debug)]
pub struct ComplexMorphism {
    pub source: Arc<Complex>,
    pub target: Arc<Complex>,
    lo: i64,
    comps: Vec<SheafMorphism>,
}

impl ComplexMorphism {
    pub fn new(source: Arc<Complex>, target: Arc<Complex>, lo: i64, comps: Vec<SheafMorphism>) -> Result<Self> {
        let f = ComplexMorphism { source, target, lo, comps };
        for n in f.range() {
            let c = f.comp(n);
            if *c.source != **f.source.term(n) || *c.target != **f.target.term(n) || !c.is_valid() {
                return Err(Error::InvalidMorphism(format!("component in degree {n} is not a morphism")));
            }
            let lhs = c.then(&f.target.diff(n));
            let rhs = f.source.diff(n).then(&f.comp(n + 1));
            if lhs.comps != rhs.comps {
                return Err(Error::InvalidMorphism(format!("does not commute with d in degree {n}")));
            }
        }
        Ok(f)
    }

    pub(crate) fn from_parts(source: Arc<Complex>, target: Arc<Complex>, lo: i64, comps: Vec<SheafMorphism>) -> Self {
        ComplexMorphism { source, target, lo, comps }
    }

    pub fn identity(c: &Arc<Complex>) -> Self {
        let comps = c.terms.iter().map(SheafMorphism::identity).collect();
        ComplexMorphism { source: c.clone(), target: c.clone(), lo: c.lo, comps }
    }

    pub fn zero(source: &Arc<Complex>, target: &Arc<Complex>) -> Self {
        ComplexMorphism { source: source.clone(), target: target.clone(), lo: 0, comps: Vec::new() }
    }

    fn range(&self) -> std::ops::RangeInclusive<i64> {
        self.source.lo.min(self.target.lo)..=self.source.hi().max(self.target.hi())
    }

    pub fn comp(&self, n: i64) -> SheafMorphism {
        let k = n - self.lo;
        if k >= 0 && (k as usize) < self.comps.len() {
            self.comps[k as usize].clone()
        } else {
            SheafMorphism::zero(self.source.term(n), self.target.term(n))
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ComplexMorphism) -> ComplexMorphism {
        let lo = self.source.lo.min(other.target.lo);
        let hi = self.source.hi().max(other.target.hi());
        let comps = (lo..=hi).map(|n| self.comp(n).then(&other.comp(n))).collect();
        ComplexMorphism { source: self.source.clone(), target: other.target.clone(), lo, comps }
    }

    pub fn sub(&self, other: &ComplexMorphism) -> ComplexMorphism {
        let r = self.range();
        let lo = *r.start();
        let comps = r.map(|n| self.comp(n).sub(&other.comp(n))).collect();
        ComplexMorphism { source: self.source.clone(), target: self.target.clone(), lo, comps }
    }

    pub fn is_quasi_iso(&self) -> bool {
        let lo = *self.range().start();
        let hi = *self.range().end();
        self.source.space.poset().points().all(|p| {
            let maps: Vec<Mat> = (lo..=hi).map(|n| self.comp(n).comps[p].clone()).collect();
            group_quasi_iso(&self.source.stalk_groups(p), &self.target.stalk_groups(p), lo, &maps)
        })
    }

    /// Stalkwise maps `H^n(f)` at every point.
    pub fn on_cohomology(&self, n: i64) -> Vec<Mat> {
        let poset = self.source.space.poset().clone();
        poset
            .points()
            .map(|p| {
                let a = self.source.stalk_cohomology(n, p);
                let b = self.target.stalk_cohomology(n, p);
                a.induced(&self.comp(n).comps[p], &b)
            })
            .collect()
    }
}

/// Block morphism `⊕ src -> ⊕ tgt` from optional blocks `(i, j) : src_j -> tgt_i`.
pub(crate) fn block_morphism(
    src: &Arc<Sheaf>,
    src_parts: &[&Sheaf],
    tgt: &Arc<Sheaf>,
    tgt_parts: &[&Sheaf],
    blocks: &[(usize, usize, SheafMorphism)],
) -> SheafMorphism {
    let space = src.space().clone();
    let comps = space
        .poset()
        .points()
        .map(|p| {
            let mut m = Mat::zeros(tgt.stalk(p).dim(), src.stalk(p).dim());
            let roff = offsets(tgt_parts, p);
            let coff = offsets(src_parts, p);
            for (i, j, f) in blocks {
                m.add_block(roff[*i], coff[*j], &f.comps[p], 1);
            }
            m
        })
        .collect();
    SheafMorphism::from_parts(src.clone(), tgt.clone(), comps)
}

fn offsets(parts: &[&Sheaf], p: usize) -> Vec<usize> {
    let mut out = vec![0];
    for s in parts {
        out.push(out.last().unwrap() + s.stalk(p).dim());
    }
    out
}

/// Mapping cone with its structure maps `D -> cone` and `cone -> C[1]`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub complex: Arc<Complex>,
    pub incl: ComplexMorphism,
    pub proj: ComplexMorphism,
}

/// `cone(φ)^n = C^{n+1} ⊕ D^n` with `d(c, d) = (-d c, φ c + d d)`.
pub fn cone(phi: &ComplexMorphism) -> Cone {
    let (c, d) = (&phi.source, &phi.target);
    let space = c.space.clone();
    let lo = (c.lo - 1).min(d.lo);
    let hi = (c.hi() - 1).max(d.hi());
    let mut terms = Vec::new();
    for n in lo..=hi {
        terms.push(Arc::new(direct_sum(&space, &[c.term(n + 1), d.term(n)])));
    }
    let mut diffs = Vec::new();
    for n in lo..hi {
        let k = (n - lo) as usize;
        let blocks = vec![
            (0, 0, c.diff(n + 1).scale(-1)),
            (1, 0, phi.comp(n + 1)),
            (1, 1, d.diff(n)),
        ];
        diffs.push(block_morphism(
            &terms[k],
            &[c.term(n + 1), d.term(n)],
            &terms[k + 1],
            &[c.term(n + 2), d.term(n + 1)],
            &blocks,
        ));
    }
    let complex = Arc::new(Complex::from_parts(space, lo, terms, diffs));
    let shifted = Arc::new(c.shift(1));
    let incl_comps = (lo..=hi)
        .map(|n| {
            let k = (n - lo) as usize;
            block_morphism(d.term(n), &[d.term(n)], &complex.terms[k], &[c.term(n + 1), d.term(n)], &[(1, 0, SheafMorphism::identity(d.term(n)))])
        })
        .collect();
    let proj_comps = (lo..=hi)
        .map(|n| {
            let k = (n - lo) as usize;
            block_morphism(&complex.terms[k], &[c.term(n + 1), d.term(n)], c.term(n + 1), &[c.term(n + 1)], &[(0, 0, SheafMorphism::identity(c.term(n + 1)))])
        })
        .collect();
    let incl = ComplexMorphism::from_parts(d.clone(), complex.clone(), lo, incl_comps);
    let proj = ComplexMorphism::from_parts(complex.clone(), shifted, lo, proj_comps);
    Cone { complex, incl, proj }
}

/// `f[k]`, same components as `f`.
pub fn shift_morphism(f: &ComplexMorphism, k: i64) -> ComplexMorphism {
    ComplexMorphism::from_parts(Arc::new(f.source.shift(k)), Arc::new(f.target.shift(k)), f.lo - k, f.comps.clone())
}

/// `in D_qc`: every base-changed restriction `C_p ⊗ O_q -> C_q` is a quasi-isomorphism.
///
/// Needs flat restriction maps, so that base change is computed degreewise.
pub fn in_dqc(c: &Complex, ring_cap: u128) -> Result<bool> {
    let space = c.space.clone();
    let poset = space.poset().clone();
    for (p, q) in poset.points().flat_map(|p| poset.points().map(move |q| (p, q))).filter(|&(p, q)| poset.lt(p, q)) {
        let oq = Module::regular(space.ring(q).clone()).restrict(space.res(p, q))?;
        if !fr::is_flat(&oq, ring_cap)? {
            return Err(Error::Precondition(format!(
                "restriction O_{} -> O_{} is not flat",
                poset.name(p),
                poset.name(q)
            )));
        }
        let bcs = (c.lo..=c.hi())
            .map(|n| fr::base_change(c.term(n).stalk(p), space.res(p, q)))
            .collect::<Result<Vec<_>>>()?;
        let id_q = crate::finring::RingHom::identity(space.ring(q).clone());
        let orders: Vec<Vec<u64>> = bcs.iter().map(|b| b.module.orders().to_vec()).collect();
        let diffs: Vec<Mat> = (0..bcs.len().saturating_sub(1))
            .map(|k| bcs[k].map_to(&bcs[k + 1], &c.diffs[k].comps[p], &id_q))
            .collect();
        let a = GroupComplex::new(c.lo, orders, diffs);
        let maps: Vec<Mat> = (c.lo..=c.hi())
            .map(|n| {
                let k = (n - c.lo) as usize;
                bcs[k].adjoint(c.term(n).stalk(q), c.term(n).res(p, q))
            })
            .collect();
        if !group_quasi_iso(&a, &c.stalk_groups(q), c.lo, &maps) {
            return Ok(false);
        }
    }
    Ok(true)
}
