use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finring::{same_ring, FiniteRing, RingHom};
use crate::poset::{MonotoneMap, PointSet, Poset};

/// Finite poset with a ring at each point and ring maps `r_pq : O_p -> O_q` for `p ≤ q`.
#[derive(Clone, Debug)]
pub struct RingedSpace {
    poset: Arc<Poset>,
    rings: Vec<Arc<FiniteRing>>,
    /// `res[p][q]` is set exactly when `p ≤ q`.
    res: Vec<Vec<Option<RingHom>>>,
}

impl PartialEq for RingedSpace {
    fn eq(&self, other: &Self) -> bool {
        self.poset == other.poset && self.res == other.res
    }
}

impl RingedSpace {
    /// Builds from ring maps on (at least) every covering relation; maps on
    /// longer relations are composed and any given ones must agree.
    pub fn new(poset: Arc<Poset>, rings: Vec<Arc<FiniteRing>>, maps: Vec<((usize, usize), RingHom)>) -> Result<Self> {
        let n = poset.len();
        if rings.len() != n {
            return Err(Error::InvalidSheaf("one ring per point expected".into()));
        }
        let mut given: HashMap<(usize, usize), RingHom> = HashMap::new();
        for ((p, q), h) in maps {
            if p >= n || q >= n {
                return Err(Error::UnknownPoint(format!("{}", p.max(q))));
            }
            if !poset.leq(p, q) {
                return Err(Error::InvalidRingHom(format!(
                    "ring map given for `{}` ≰ `{}`",
                    poset.name(p),
                    poset.name(q)
                )));
            }
            if !same_ring(h.source(), &rings[p]) || !same_ring(h.target(), &rings[q]) {
                return Err(Error::RingMismatch(format!("ring map `{}` -> `{}`", poset.name(p), poset.name(q))));
            }
            given.insert((p, q), h);
        }
        let mut res: Vec<Vec<Option<RingHom>>> = vec![vec![None; n]; n];
        for p in 0..n {
            res[p][p] = Some(RingHom::identity(rings[p].clone()));
        }
        for (p, q) in poset.hasse() {
            let h = given.get(&(p, q)).cloned().ok_or_else(|| {
                Error::InvalidRingHom(format!("missing ring map `{}` -> `{}`", poset.name(p), poset.name(q)))
            })?;
            res[p][q] = Some(h);
        }
        // compose along chains ordered by increasing length
        let mut pairs: Vec<(usize, usize)> =
            poset.points().flat_map(|p| poset.points().map(move |q| (p, q))).filter(|&(p, q)| poset.lt(p, q)).collect();
        pairs.sort_by_key(|&(p, q)| poset.height_within(&interval(&poset, p, q)));
        for &(p, q) in &pairs {
            if res[p][q].is_none() {
                let mid = poset
                    .points()
                    .find(|&r| poset.lt(p, r) && poset.lt(r, q) && res[p][r].is_some() && res[r][q].is_some())
                    .expect("intermediate point of a non-covering relation");
                let h = res[p][mid].as_ref().unwrap().then(res[mid][q].as_ref().unwrap())?;
                res[p][q] = Some(h);
            }
        }
        for ((p, q), h) in &given {
            if res[*p][*q].as_ref() != Some(h) {
                let mid = poset.points().find(|&r| poset.lt(*p, r) && poset.lt(r, *q)).expect("non-covering relation");
                return Err(Error::InvalidRingHom(format!(
                    "r_{{{0}{2}}} ≠ r_{{{1}{2}}} ∘ r_{{{0}{1}}} on the triple ({0}, {1}, {2})",
                    poset.name(*p),
                    poset.name(mid),
                    poset.name(*q)
                )));
            }
        }
        let space = RingedSpace { poset, rings, res };
        space.check_functorial()?;
        Ok(space)
    }

    fn check_functorial(&self) -> Result<()> {
        let p = &self.poset;
        for a in p.points() {
            for b in p.points() {
                if !p.lt(a, b) {
                    continue;
                }
                for c in p.points() {
                    if p.lt(b, c) {
                        let comp = self.res(a, b).then(self.res(b, c))?;
                        if &comp != self.res(a, c) {
                            return Err(Error::InvalidRingHom(format!(
                                "r_{{{0}{2}}} ≠ r_{{{1}{2}}} ∘ r_{{{0}{1}}} on the triple ({0}, {1}, {2})",
                                p.name(a),
                                p.name(b),
                                p.name(c)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Constant ringed space with the same ring everywhere and identity maps.
    pub fn constant(poset: Arc<Poset>, ring: Arc<FiniteRing>) -> Self {
        let n = poset.len();
        let rings = vec![ring.clone(); n];
        let res = (0..n)
            .map(|p| {
                (0..n).map(|q| if poset.leq(p, q) { Some(RingHom::identity(ring.clone())) } else { None }).collect()
            })
            .collect();
        RingedSpace { poset, rings, res }
    }

    pub fn point(ring: Arc<FiniteRing>) -> Self {
        RingedSpace::constant(Arc::new(Poset::from_indices(1, &[]).expect("one point")), ring)
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn ring(&self, p: usize) -> &Arc<FiniteRing> {
        &self.rings[p]
    }

    pub fn rings(&self) -> &[Arc<FiniteRing>] {
        &self.rings
    }

    /// `r_pq`; panics unless `p ≤ q`.
    pub fn res(&self, p: usize, q: usize) -> &RingHom {
        self.res[p][q].as_ref().expect("restriction requested for incomparable points")
    }

    pub fn dimension(&self) -> usize {
        self.poset.dimension().unwrap_or(0)
    }

    /// Open subspace on `u`, points kept in their original order.
    pub fn open_subspace(&self, u: &[usize]) -> Result<(Arc<RingedSpace>, Vec<usize>)> {
        self.poset.check_open(u)?;
        let (sub, idx) = self.poset.subposet(u);
        let rings = idx.iter().map(|&p| self.rings[p].clone()).collect();
        let res = idx
            .iter()
            .map(|&p| idx.iter().map(|&q| self.res[p][q].clone()).collect())
            .collect();
        Ok((Arc::new(RingedSpace { poset: Arc::new(sub), rings, res }), idx))
    }
}

fn interval(p: &Poset, a: usize, b: usize) -> PointSet {
    p.points().filter(|&r| p.leq(a, r) && p.leq(r, b)).collect()
}

/// Morphism of ringed finite spaces: a monotone map and comparison maps
/// `O_{Y,f(x)} -> O_{X,x}` compatible with restrictions.
#[derive(Clone, Debug)]
pub struct RingedMap {
    pub source: Arc<RingedSpace>,
    pub target: Arc<RingedSpace>,
    pub map: MonotoneMap,
    pub comparison: Vec<RingHom>,
}

impl RingedMap {
    pub fn new(
        source: Arc<RingedSpace>,
        target: Arc<RingedSpace>,
        map: Vec<usize>,
        comparison: Vec<RingHom>,
    ) -> Result<Self> {
        let map = MonotoneMap::new(source.poset.clone(), target.poset.clone(), map)?;
        if comparison.len() != source.len() {
            return Err(Error::InvalidMorphism("one comparison map per source point expected".into()));
        }
        for x in source.poset.points() {
            let h = &comparison[x];
            if !same_ring(h.source(), target.ring(map.apply(x))) || !same_ring(h.target(), source.ring(x)) {
                return Err(Error::RingMismatch(format!("comparison map at `{}`", source.poset.name(x))));
            }
        }
        let f = RingedMap { source, target, map, comparison };
        f.check_squares()?;
        Ok(f)
    }

    fn check_squares(&self) -> Result<()> {
        let xs = &self.source;
        for x in xs.poset.points() {
            for x2 in xs.poset.points() {
                if xs.poset.lt(x, x2) {
                    let (y, y2) = (self.map.apply(x), self.map.apply(x2));
                    let a = self.target.res(y, y2).then(&self.comparison[x2])?;
                    let b = self.comparison[x].then(xs.res(x, x2))?;
                    if a != b {
                        return Err(Error::InvalidMorphism(format!(
                            "comparison square does not commute on `{}` ≤ `{}`",
                            xs.poset.name(x),
                            xs.poset.name(x2)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(x: Arc<RingedSpace>) -> Self {
        let map = MonotoneMap::identity(x.poset.clone());
        let comparison = x.rings.iter().map(|r| RingHom::identity(r.clone())).collect();
        RingedMap { source: x.clone(), target: x, map, comparison }
    }

    /// Map to a one-point space with ring `k`, given the structure maps `k -> O_x`.
    pub fn to_point(x: Arc<RingedSpace>, k: Arc<FiniteRing>, structure: Vec<RingHom>) -> Result<Self> {
        let pt = Arc::new(RingedSpace::point(k));
        let n = x.len();
        RingedMap::new(x, pt, vec![0; n], structure)
    }

    /// Inclusion of an open subspace (as produced by [`RingedSpace::open_subspace`]).
    pub fn open_inclusion(x: &Arc<RingedSpace>, u: &[usize]) -> Result<(Arc<RingedSpace>, Self)> {
        let (sub, idx) = x.open_subspace(u)?;
        let comparison = idx.iter().map(|&p| RingHom::identity(x.ring(p).clone())).collect();
        let f = RingedMap::new(sub.clone(), x.clone(), idx, comparison)?;
        Ok((sub, f))
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map.apply(x)
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &RingedMap) -> Result<RingedMap> {
        if *self.target != *g.source {
            return Err(Error::SpaceMismatch);
        }
        let map: Vec<usize> = self.source.poset.points().map(|x| g.apply(self.apply(x))).collect();
        let comparison = self
            .source
            .poset
            .points()
            .map(|x| g.comparison[self.apply(x)].then(&self.comparison[x]))
            .collect::<Result<Vec<_>>>()?;
        RingedMap::new(self.source.clone(), g.target.clone(), map, comparison)
    }
}
