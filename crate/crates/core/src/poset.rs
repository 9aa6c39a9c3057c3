//! Finite posets viewed as finite T0 spaces (`p ≤ q` iff `U_p ⊇ U_q`).

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Sorted list of point indices.
pub type PointSet = Vec<usize>;

/// Strictly increasing chain `x_0 < ... < x_i` of point indices.
pub type ChainIndex = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    /// Transitively closed, reflexive.
    leq: Vec<Vec<bool>>,
}

impl Poset {
    /// Builds from point names and any generating relations `(p, q)` meaning `p ≤ q`.
    pub fn new<S: AsRef<str>>(points: &[S], relations: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidPoset(format!("duplicate point `{n}`")));
            }
        }
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownPoint(s.to_string()));
        let mut rel = Vec::with_capacity(relations.len());
        for (p, q) in relations {
            rel.push((lookup(p.as_ref())?, lookup(q.as_ref())?));
        }
        Self::build(names, index, &rel)
    }

    /// Points named `0..n`.
    pub fn from_indices(n: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Self::with_names(names, relations)
    }

    pub fn with_names(names: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidPoset(format!("duplicate point `{n}`")));
            }
        }
        if let Some(&(p, q)) = relations.iter().find(|&&(p, q)| p >= names.len() || q >= names.len()) {
            return Err(Error::UnknownPoint(format!("{}", p.max(q))));
        }
        Self::build(names, index, relations)
    }

    fn build(names: Vec<String>, index: HashMap<String, usize>, rel: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(p, q) in rel {
            leq[p][q] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::InvalidPoset(format!(
                        "relation is not antisymmetric on `{}` and `{}`",
                        names[i], names[j]
                    )));
                }
            }
        }
        Ok(Poset { names, index, leq })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, p: usize) -> &str {
        &self.names[p]
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.leq[p][q]
    }

    pub fn lt(&self, p: usize, q: usize) -> bool {
        p != q && self.leq[p][q]
    }

    /// Covering relations (Hasse diagram edges).
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in self.points() {
            for q in self.points() {
                if self.lt(p, q) && !self.points().any(|r| self.lt(p, r) && self.lt(r, q)) {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Minimal open neighbourhood `U_p = {q : q ≥ p}`.
    pub fn up_set(&self, p: usize) -> PointSet {
        self.points().filter(|&q| self.leq(p, q)).collect()
    }

    pub fn up_set_named(&self, name: &str) -> Result<PointSet> {
        Ok(self.up_set(self.index(name)?))
    }

    /// Closure `{q : q ≤ p}`.
    pub fn down_set(&self, p: usize) -> PointSet {
        self.points().filter(|&q| self.leq(q, p)).collect()
    }

    pub fn whole(&self) -> PointSet {
        self.points().collect()
    }

    pub fn is_open(&self, set: &[usize]) -> bool {
        set.iter().all(|&p| self.points().all(|q| !self.leq(p, q) || set.contains(&q)))
    }

    pub fn check_open(&self, set: &[usize]) -> Result<()> {
        if set.iter().any(|&p| p >= self.len()) {
            return Err(Error::UnknownPoint(format!("{set:?}")));
        }
        if !self.is_open(set) {
            let names: Vec<&str> = set.iter().map(|&p| self.name(p)).collect();
            return Err(Error::NotOpen(format!("{names:?}")));
        }
        Ok(())
    }

    /// Smallest open set containing `set`.
    pub fn open_hull(&self, set: &[usize]) -> PointSet {
        self.points().filter(|&q| set.iter().any(|&p| self.leq(p, q))).collect()
    }

    pub fn minimal_points(&self, set: &[usize]) -> PointSet {
        set.iter().copied().filter(|&p| !set.iter().any(|&q| self.lt(q, p))).collect()
    }

    /// The minimum of `set`, if it has one.
    pub fn minimum(&self, set: &[usize]) -> Option<usize> {
        set.iter().copied().find(|&p| set.iter().all(|&q| self.leq(p, q)))
    }

    /// Chains `x_0 < ... < x_i` with `x_0 ∈ U`, in lexicographic order of point positions.
    pub fn chains(&self, i: usize, u: &[usize]) -> Vec<ChainIndex> {
        let mut out = Vec::new();
        let mut starts: Vec<usize> = u.to_vec();
        starts.sort_unstable();
        for &x in &starts {
            self.extend_chains(vec![x], i, &mut out);
        }
        out
    }

    fn extend_chains(&self, prefix: ChainIndex, i: usize, out: &mut Vec<ChainIndex>) {
        if prefix.len() == i + 1 {
            out.push(prefix);
            return;
        }
        let last = *prefix.last().expect("nonempty prefix");
        for q in self.points() {
            if self.lt(last, q) {
                let mut next = prefix.clone();
                next.push(q);
                self.extend_chains(next, i, out);
            }
        }
    }

    /// Length of the longest strict chain.
    pub fn dimension(&self) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::EmptyPoset);
        }
        Ok(self.height_within(&self.whole()))
    }

    /// Longest chain length inside a subset (0 for empty or singleton sets).
    pub fn height_within(&self, set: &[usize]) -> usize {
        let mut h = vec![0usize; self.len()];
        let mut order: Vec<usize> = set.to_vec();
        // points with larger up-sets first so predecessors are finished
        order.sort_by_key(|&p| std::cmp::Reverse(self.up_set(p).len()));
        let mut best = 0;
        for (k, &p) in order.iter().enumerate() {
            for &q in &order[..k] {
                if self.lt(q, p) {
                    h[p] = h[p].max(h[q] + 1);
                }
            }
            best = best.max(h[p]);
        }
        best
    }

    /// Induced subposet on `set`, with the inclusion of indices.
    pub fn subposet(&self, set: &[usize]) -> (Poset, Vec<usize>) {
        let names: Vec<String> = set.iter().map(|&p| self.names[p].clone()).collect();
        let mut rel = Vec::new();
        for (a, &p) in set.iter().enumerate() {
            for (b, &q) in set.iter().enumerate() {
                if self.leq(p, q) {
                    rel.push((a, b));
                }
            }
        }
        (Poset::with_names(names, &rel).expect("subposet of a poset"), set.to_vec())
    }

    /// Maximal chains, i.e. the facets of the order complex.
    pub fn order_complex(&self) -> Vec<ChainIndex> {
        let mut facets = Vec::new();
        for x in self.minimal_points(&self.whole()) {
            self.maximal_from(vec![x], &mut facets);
        }
        facets
    }

    fn maximal_from(&self, prefix: ChainIndex, out: &mut Vec<ChainIndex>) {
        let last = *prefix.last().expect("nonempty prefix");
        let covers: Vec<usize> =
            self.points().filter(|&q| self.lt(last, q) && !self.points().any(|r| self.lt(last, r) && self.lt(r, q))).collect();
        if covers.is_empty() {
            out.push(prefix);
            return;
        }
        for q in covers {
            let mut next = prefix.clone();
            next.push(q);
            self.maximal_from(next, out);
        }
    }

    /// Order-preserving bijection to `other`, if one exists (small posets only).
    pub fn isomorphism_to(&self, other: &Poset) -> Option<Vec<usize>> {
        if self.len() != other.len() {
            return None;
        }
        let mut assign = vec![usize::MAX; self.len()];
        let mut used = vec![false; other.len()];
        if self.iso_search(other, 0, &mut assign, &mut used) {
            Some(assign)
        } else {
            None
        }
    }

    fn iso_search(&self, other: &Poset, k: usize, assign: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if k == self.len() {
            return true;
        }
        for t in other.points() {
            if used[t] {
                continue;
            }
            let ok = (0..k).all(|j| self.leq(j, k) == other.leq(assign[j], t) && self.leq(k, j) == other.leq(t, assign[j]));
            if ok {
                assign[k] = t;
                used[t] = true;
                if self.iso_search(other, k + 1, assign, used) {
                    return true;
                }
                used[t] = false;
            }
        }
        false
    }
}

/// Monotone map between finite posets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneMap {
    pub source: Arc<Poset>,
    pub target: Arc<Poset>,
    pub map: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(source: Arc<Poset>, target: Arc<Poset>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() || map.iter().any(|&y| y >= target.len()) {
            return Err(Error::InvalidPoset("map has the wrong domain or codomain".into()));
        }
        for p in source.points() {
            for q in source.points() {
                if source.leq(p, q) && !target.leq(map[p], map[q]) {
                    return Err(Error::InvalidPoset(format!(
                        "map is not monotone on `{}` ≤ `{}`",
                        source.name(p),
                        source.name(q)
                    )));
                }
            }
        }
        Ok(MonotoneMap { source, target, map })
    }

    pub fn identity(p: Arc<Poset>) -> Self {
        let map = p.whole();
        MonotoneMap { source: p.clone(), target: p, map }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `f^{-1}(V)`.
    pub fn preimage(&self, v: &[usize]) -> PointSet {
        self.source.points().filter(|&x| v.contains(&self.map[x])).collect()
    }
}

/// Finite model of a covered space: `U^s = ∩_{s ∈ U_i} U_i`, points identified when
/// their `U^s` agree, classes ordered by reverse inclusion.
pub fn covering_model(s: &Arc<Poset>, covering: &[PointSet]) -> Result<(Arc<Poset>, MonotoneMap)> {
    for u in covering {
        s.check_open(u)?;
    }
    let mut neighbourhoods: Vec<BTreeSet<usize>> = Vec::with_capacity(s.len());
    for p in s.points() {
        let members: Vec<&PointSet> = covering.iter().filter(|u| u.contains(&p)).collect();
        if members.is_empty() {
            return Err(Error::NotACovering(s.name(p).to_string()));
        }
        let mut inter: BTreeSet<usize> = members[0].iter().copied().collect();
        for u in &members[1..] {
            inter.retain(|q| u.contains(q));
        }
        neighbourhoods.push(inter);
    }
    let mut classes: Vec<usize> = Vec::new();
    let mut pi = vec![0usize; s.len()];
    for p in s.points() {
        match classes.iter().position(|&r| neighbourhoods[r] == neighbourhoods[p]) {
            Some(c) => pi[p] = c,
            None => {
                pi[p] = classes.len();
                classes.push(p);
            }
        }
    }
    let names: Vec<String> = classes
        .iter()
        .map(|&r| {
            let members: Vec<&str> = s.points().filter(|&p| pi[p] == pi[r]).map(|p| s.name(p)).collect();
            members.join("=")
        })
        .collect();
    let mut rel = Vec::new();
    for (a, &ra) in classes.iter().enumerate() {
        for (b, &rb) in classes.iter().enumerate() {
            if neighbourhoods[ra].is_superset(&neighbourhoods[rb]) {
                rel.push((a, b));
            }
        }
    }
    let x = Arc::new(Poset::with_names(names, &rel)?);
    let map = MonotoneMap::new(s.clone(), x.clone(), pi)?;
    Ok((x, map))
}

/// Face poset of a simplicial complex given by its maximal simplices;
/// faces ordered by inclusion, so `U_σ` is the open star of `σ`.
pub fn face_poset<S: AsRef<str>>(simplices: &[Vec<S>]) -> Result<Poset> {
    if simplices.is_empty() {
        return Err(Error::InvalidSimplicial("empty complex".into()));
    }
    let mut seen = BTreeSet::new();
    let mut faces: BTreeSet<Vec<String>> = BTreeSet::new();
    for s in simplices {
        let mut verts: Vec<String> = s.iter().map(|v| v.as_ref().to_string()).collect();
        verts.sort();
        if verts.is_empty() {
            return Err(Error::InvalidSimplicial("empty simplex".into()));
        }
        if verts.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSimplicial(format!("repeated vertex in {verts:?}")));
        }
        if !seen.insert(verts.clone()) {
            return Err(Error::InvalidSimplicial(format!("duplicate simplex {verts:?}")));
        }
        let n = verts.len();
        for mask in 1u64..(1u64 << n) {
            let face: Vec<String> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| verts[i].clone()).collect();
            faces.insert(face);
        }
    }
    let mut faces: Vec<Vec<String>> = faces.into_iter().collect();
    faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let names: Vec<String> = faces.iter().map(|f| f.join(",")).collect();
    let mut rel = Vec::new();
    for (i, a) in faces.iter().enumerate() {
        for (j, b) in faces.iter().enumerate() {
            if i != j && a.iter().all(|v| b.contains(v)) {
                rel.push((i, j));
            }
        }
    }
    Poset::with_names(names, &rel)
}

/// Face poset of the order complex of `p` (its barycentric subdivision).
pub fn subdivision(p: &Poset) -> Result<Poset> {
    let facets: Vec<Vec<String>> =
        p.order_complex().into_iter().map(|c| c.into_iter().map(|x| p.name(x).to_string()).collect()).collect();
    face_poset(&facets)
}
