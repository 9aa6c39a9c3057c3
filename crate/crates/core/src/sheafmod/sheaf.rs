use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finring::{self as fr, base_change, same_ring, Module};
use crate::group::Solver;
use crate::linalg::Mat;

use super::space::RingedSpace;

/// Sheaf of modules on a ringed finite space: stalks `M_p` over `O_p` and
/// `O_p`-linear restrictions `M_p -> M_q` for `p ≤ q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sheaf {
    space: Arc<RingedSpace>,
    stalks: Vec<Module>,
    res: Vec<Vec<Option<Mat>>>,
}

impl Sheaf {
    /// Builds from restriction matrices on (at least) all covering relations.
    pub fn new(space: Arc<RingedSpace>, stalks: Vec<Module>, maps: Vec<((usize, usize), Mat)>) -> Result<Self> {
        let poset = space.poset().clone();
        let n = poset.len();
        if stalks.len() != n {
            return Err(Error::InvalidSheaf("one stalk per point expected".into()));
        }
        for p in 0..n {
            if !same_ring(stalks[p].ring(), space.ring(p)) {
                return Err(Error::RingMismatch(format!("stalk at `{}`", poset.name(p))));
            }
        }
        let mut res: Vec<Vec<Option<Mat>>> = vec![vec![None; n]; n];
        for (p, row) in res.iter_mut().enumerate() {
            row[p] = Some(stalks[p].identity());
        }
        let mut given = Vec::new();
        for ((p, q), m) in maps {
            if p >= n || q >= n || !poset.leq(p, q) {
                return Err(Error::InvalidSheaf(format!("restriction given on a non-relation ({p}, {q})")));
            }
            if m.rows() != stalks[q].dim() || m.cols() != stalks[p].dim() {
                return Err(Error::InvalidSheaf(format!(
                    "restriction `{}` -> `{}` has the wrong shape",
                    poset.name(p),
                    poset.name(q)
                )));
            }
            let m = m.reduced_rows(stalks[q].orders());
            let r = space.res(p, q);
            let as_p = stalks[q].restrict(r)?;
            if !stalks[p].is_linear_map(&as_p, &m) {
                return Err(Error::InvalidSheaf(format!(
                    "restriction `{}` -> `{}` is not O_{}-linear",
                    poset.name(p),
                    poset.name(q),
                    poset.name(p)
                )));
            }
            given.push(((p, q), m));
        }
        for (p, q) in poset.hasse() {
            let m = given.iter().find(|(k, _)| *k == (p, q)).map(|(_, m)| m.clone()).ok_or_else(|| {
                Error::InvalidSheaf(format!("missing restriction `{}` -> `{}`", poset.name(p), poset.name(q)))
            })?;
            res[p][q] = Some(m);
        }
        let mut pairs: Vec<(usize, usize)> =
            poset.points().flat_map(|p| poset.points().map(move |q| (p, q))).filter(|&(p, q)| poset.lt(p, q)).collect();
        pairs.sort_by_key(|&(p, q)| poset.up_set(q).len() as i64 - poset.up_set(p).len() as i64);
        let mut pending = pairs;
        while !pending.is_empty() {
            let before = pending.len();
            pending.retain(|&(p, q)| {
                if res[p][q].is_some() {
                    return false;
                }
                let mid = poset.points().find(|&r| poset.lt(p, r) && poset.lt(r, q) && res[p][r].is_some() && res[r][q].is_some());
                match mid {
                    Some(r) => {
                        let m = res[r][q].as_ref().unwrap().mul_reduce(res[p][r].as_ref().unwrap(), stalks[q].orders());
                        res[p][q] = Some(m);
                        false
                    }
                    None => true,
                }
            });
            assert!(pending.len() < before, "restriction closure stalled");
        }
        for ((p, q), m) in &given {
            if res[*p][*q].as_ref() != Some(m) {
                return Err(Error::InvalidSheaf(format!(
                    "given restriction `{}` -> `{}` differs from the composite",
                    poset.name(*p),
                    poset.name(*q)
                )));
            }
        }
        let sheaf = Sheaf { space, stalks, res };
        sheaf.check_functorial()?;
        Ok(sheaf)
    }

    fn check_functorial(&self) -> Result<()> {
        let poset = self.space.poset();
        for a in poset.points() {
            for b in poset.points() {
                if !poset.lt(a, b) {
                    continue;
                }
                for c in poset.points() {
                    if poset.lt(b, c) {
                        let comp = self.res(b, c).mul_reduce(self.res(a, b), self.stalks[c].orders());
                        if &comp != self.res(a, c) {
                            return Err(Error::InvalidSheaf(format!(
                                "restrictions not functorial on the triple ({}, {}, {})",
                                poset.name(a),
                                poset.name(b),
                                poset.name(c)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Unchecked constructor from a restriction function on all pairs `p ≤ q`.
    pub(crate) fn from_fn(space: Arc<RingedSpace>, stalks: Vec<Module>, mut f: impl FnMut(usize, usize) -> Mat) -> Self {
        let poset = space.poset().clone();
        let res = poset
            .points()
            .map(|p| {
                poset
                    .points()
                    .map(|q| {
                        if p == q {
                            Some(stalks[p].identity())
                        } else if poset.leq(p, q) {
                            Some(f(p, q).reduced_rows(stalks[q].orders()))
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect();
        Sheaf { space, stalks, res }
    }

    pub fn zero(space: Arc<RingedSpace>) -> Self {
        let stalks = space.rings().iter().map(|r| Module::zero(r.clone())).collect();
        Sheaf::from_fn(space, stalks, |_, _| Mat::zeros(0, 0))
    }

    /// Structure sheaf `O`.
    pub fn structure(space: Arc<RingedSpace>) -> Self {
        let stalks: Vec<Module> = space.rings().iter().map(|r| Module::regular(r.clone())).collect();
        let sp = space.clone();
        Sheaf::from_fn(space, stalks, move |p, q| sp.res(p, q).matrix())
    }

    pub fn space(&self) -> &Arc<RingedSpace> {
        &self.space
    }

    pub fn stalks(&self) -> &[Module] {
        &self.stalks
    }

    pub fn stalk(&self, p: usize) -> &Module {
        &self.stalks[p]
    }

    /// Restriction `M_p -> M_q`; panics unless `p ≤ q`.
    pub fn res(&self, p: usize, q: usize) -> &Mat {
        self.res[p][q].as_ref().expect("restriction requested for incomparable points")
    }

    pub fn is_zero(&self) -> bool {
        self.stalks.iter().all(Module::is_zero)
    }

    /// Total number of cyclic summands over all stalks.
    pub fn total_dim(&self) -> usize {
        self.stalks.iter().map(Module::dim).sum()
    }

    /// The base-change map `M_p ⊗_{O_p} O_q -> M_q`.
    pub fn base_change_map(&self, p: usize, q: usize) -> Result<(Module, Mat)> {
        let bc = base_change(&self.stalks[p], self.space.res(p, q))?;
        let map = bc.adjoint(&self.stalks[q], self.res(p, q));
        Ok((bc.module, map))
    }

    /// First pair `p < q` where the base-change map fails to be an isomorphism.
    pub fn quasicoherence_failure(&self) -> Result<Option<(usize, usize)>> {
        let poset = self.space.poset();
        for (p, q) in all_strict_pairs(poset) {
            let (src, map) = self.base_change_map(p, q)?;
            if !fr::is_iso(&src, &self.stalks[q], &map) {
                return Ok(Some((p, q)));
            }
        }
        Ok(None)
    }

    pub fn is_quasicoherent(&self) -> Result<bool> {
        Ok(self.quasicoherence_failure()?.is_none())
    }

    /// Restriction to an open subspace produced by [`RingedSpace::open_subspace`].
    pub fn restrict_to(&self, sub: &Arc<RingedSpace>, idx: &[usize]) -> Sheaf {
        let stalks = idx.iter().map(|&p| self.stalks[p].clone()).collect();
        let res = idx.iter().map(|&p| idx.iter().map(|&q| self.res[p][q].clone()).collect()).collect();
        Sheaf { space: sub.clone(), stalks, res }
    }

    pub fn restrict_open(&self, u: &[usize]) -> Result<Sheaf> {
        let (sub, idx) = self.space.open_subspace(u)?;
        Ok(self.restrict_to(&sub, &idx))
    }

    /// Whether all stalks are flat over their rings.
    pub fn has_flat_stalks(&self, cap: u128) -> Result<bool> {
        for m in &self.stalks {
            if !fr::is_flat(m, cap)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn all_strict_pairs(poset: &crate::poset::Poset) -> Vec<(usize, usize)> {
    poset.points().flat_map(|p| poset.points().map(move |q| (p, q))).filter(|&(p, q)| poset.lt(p, q)).collect()
}

/// Direct sum with stalk coordinates concatenated in order.
pub fn direct_sum(space: &Arc<RingedSpace>, parts: &[&Sheaf]) -> Sheaf {
    let stalks: Vec<Module> = space
        .poset()
        .points()
        .map(|p| fr::direct_sum_over(space.ring(p), &parts.iter().map(|s| &s.stalks[p]).collect::<Vec<_>>()))
        .collect();
    Sheaf::from_fn(space.clone(), stalks, |p, q| Mat::block_diag(&parts.iter().map(|s| s.res(p, q)).collect::<Vec<_>>()))
}

/// Morphism of sheaves, one matrix per point.
#[derive(Clone, Debug, PartialEq)]
pub struct SheafMorphism {
    pub source: Arc<Sheaf>,
    pub target: Arc<Sheaf>,
    pub comps: Vec<Mat>,
}

impl SheafMorphism {
    pub fn new(source: Arc<Sheaf>, target: Arc<Sheaf>, comps: Vec<Mat>) -> Result<Self> {
        if source.space != target.space && *source.space != *target.space {
            return Err(Error::SpaceMismatch);
        }
        let poset = source.space.poset().clone();
        if comps.len() != poset.len() {
            return Err(Error::InvalidMorphism("one component per point expected".into()));
        }
        let mut comps = comps;
        for p in poset.points() {
            let (s, t) = (&source.stalks[p], &target.stalks[p]);
            if comps[p].rows() != t.dim() || comps[p].cols() != s.dim() {
                return Err(Error::InvalidMorphism(format!("component at `{}` has the wrong shape", poset.name(p))));
            }
            comps[p].reduce_rows(t.orders());
            if !s.is_linear_map(t, &comps[p]) {
                return Err(Error::InvalidMorphism(format!("component at `{}` is not linear", poset.name(p))));
            }
        }
        let f = SheafMorphism { source, target, comps };
        if let Some((p, q)) = f.first_noncommuting() {
            return Err(Error::InvalidMorphism(format!(
                "does not commute with restriction `{}` -> `{}`",
                poset.name(p),
                poset.name(q)
            )));
        }
        Ok(f)
    }

    pub(crate) fn from_parts(source: Arc<Sheaf>, target: Arc<Sheaf>, mut comps: Vec<Mat>) -> Self {
        for (p, c) in comps.iter_mut().enumerate() {
            c.reduce_rows(target.stalks[p].orders());
        }
        SheafMorphism { source, target, comps }
    }

    fn first_noncommuting(&self) -> Option<(usize, usize)> {
        let poset = self.source.space.poset();
        poset.hasse().into_iter().find(|&(p, q)| {
            let o = self.target.stalks[q].orders();
            self.target.res(p, q).mul_reduce(&self.comps[p], o) != self.comps[q].mul_reduce(self.source.res(p, q), o)
        })
    }

    pub fn is_valid(&self) -> bool {
        self.first_noncommuting().is_none()
    }

    pub fn zero(source: &Arc<Sheaf>, target: &Arc<Sheaf>) -> Self {
        let comps =
            (0..source.stalks.len()).map(|p| Mat::zeros(target.stalks[p].dim(), source.stalks[p].dim())).collect();
        SheafMorphism { source: source.clone(), target: target.clone(), comps }
    }

    pub fn identity(s: &Arc<Sheaf>) -> Self {
        let comps = s.stalks.iter().map(Module::identity).collect();
        SheafMorphism { source: s.clone(), target: s.clone(), comps }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SheafMorphism) -> SheafMorphism {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .enumerate()
            .map(|(p, (a, b))| b.mul_reduce(a, other.target.stalks[p].orders()))
            .collect();
        SheafMorphism { source: self.source.clone(), target: other.target.clone(), comps }
    }

    pub fn add(&self, other: &SheafMorphism) -> SheafMorphism {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &SheafMorphism) -> SheafMorphism {
        self.combine(other, -1)
    }

    fn combine(&self, other: &SheafMorphism, sign: i64) -> SheafMorphism {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .enumerate()
            .map(|(p, (a, b))| a.add(&b.scale(sign)).reduced_rows(self.target.stalks[p].orders()))
            .collect();
        SheafMorphism { source: self.source.clone(), target: self.target.clone(), comps }
    }

    pub fn scale(&self, s: i64) -> SheafMorphism {
        let comps =
            self.comps.iter().enumerate().map(|(p, a)| a.scale(s).reduced_rows(self.target.stalks[p].orders())).collect();
        SheafMorphism { source: self.source.clone(), target: self.target.clone(), comps }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Mat::is_zero)
    }

    pub fn is_iso(&self) -> bool {
        (0..self.comps.len()).all(|p| fr::is_iso(&self.source.stalks[p], &self.target.stalks[p], &self.comps[p]))
    }

    pub fn is_injective(&self) -> bool {
        (0..self.comps.len()).all(|p| fr::is_injective(&self.source.stalks[p], &self.target.stalks[p], &self.comps[p]))
    }

    pub fn is_surjective(&self) -> bool {
        (0..self.comps.len()).all(|p| fr::is_surjective(&self.target.stalks[p], &self.comps[p]))
    }

    /// Stalkwise kernel with its inclusion.
    pub fn kernel(&self) -> (Arc<Sheaf>, SheafMorphism) {
        let n = self.comps.len();
        let parts: Vec<(Module, Mat)> =
            (0..n).map(|p| fr::kernel(&self.source.stalks[p], &self.target.stalks[p], &self.comps[p])).collect();
        sub_sheaf(&self.source, parts)
    }

    /// Stalkwise image with its inclusion into the target.
    pub fn image(&self) -> (Arc<Sheaf>, SheafMorphism) {
        let n = self.comps.len();
        let parts: Vec<(Module, Mat)> = (0..n).map(|p| fr::image(&self.target.stalks[p], &self.comps[p])).collect();
        sub_sheaf(&self.target, parts)
    }

    /// Stalkwise cokernel: sheaf, projection, and stalkwise lifts.
    pub fn cokernel(&self) -> (Arc<Sheaf>, SheafMorphism, Vec<Mat>) {
        quotient_sheaf(&self.target, &self.comps)
    }
}

/// Sub-sheaf from stalkwise submodules (inclusions must be compatible).
pub fn sub_sheaf(ambient: &Arc<Sheaf>, parts: Vec<(Module, Mat)>) -> (Arc<Sheaf>, SheafMorphism) {
    let space = ambient.space.clone();
    let solvers: Vec<Option<Solver>> = parts
        .iter()
        .enumerate()
        .map(|(p, (m, incl))| {
            if m.is_zero() {
                None
            } else {
                Some(Solver::new(incl, m.orders(), ambient.stalks[p].orders()))
            }
        })
        .collect();
    let stalks: Vec<Module> = parts.iter().map(|(m, _)| m.clone()).collect();
    let incls: Vec<Mat> = parts.into_iter().map(|(_, i)| i).collect();
    let sheaf = Sheaf::from_fn(space, stalks.clone(), |p, q| {
        if stalks[p].is_zero() || stalks[q].is_zero() {
            return Mat::zeros(stalks[q].dim(), stalks[p].dim());
        }
        let img = ambient.res(p, q).mul_reduce(&incls[p], ambient.stalks[q].orders());
        solvers[q].as_ref().unwrap().solve_cols(&img).expect("stalkwise submodules are not compatible")
    });
    let sheaf = Arc::new(sheaf);
    let incl = SheafMorphism { source: sheaf.clone(), target: ambient.clone(), comps: incls };
    (sheaf, incl)
}

/// Quotient of `ambient` by the images of stalkwise maps (compatible).
pub fn quotient_sheaf(ambient: &Arc<Sheaf>, gens: &[Mat]) -> (Arc<Sheaf>, SheafMorphism, Vec<Mat>) {
    let space = ambient.space.clone();
    let parts: Vec<(Module, Mat, Mat)> =
        gens.iter().enumerate().map(|(p, g)| fr::cokernel(&ambient.stalks[p], g)).collect();
    let stalks: Vec<Module> = parts.iter().map(|(m, _, _)| m.clone()).collect();
    let sheaf = Sheaf::from_fn(space, stalks.clone(), |p, q| {
        parts[q].1.mul(ambient.res(p, q)).mul(&parts[p].2).reduced_rows(stalks[q].orders())
    });
    let sheaf = Arc::new(sheaf);
    let proj = SheafMorphism { source: ambient.clone(), target: sheaf.clone(), comps: parts.iter().map(|x| x.1.clone()).collect() };
    let lifts = parts.into_iter().map(|x| x.2).collect();
    (sheaf, proj, lifts)
}
