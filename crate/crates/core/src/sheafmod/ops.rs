use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finring::{self as fr, base_change, FiniteRing, HomSpace, Module, RingHom};
use crate::group::{self, Solver};
use crate::linalg::Mat;
use crate::poset::PointSet;

use super::sheaf::{Sheaf, SheafMorphism};
use super::space::{RingedMap, RingedSpace};

/// Compatible families over an open set, as a subgroup of `∏_{p ∈ V} M_p`.
#[derive(Clone, Debug)]
pub struct Sections {
    pub points: PointSet,
    pub orders: Vec<u64>,
    /// Inclusion into the product (blocks in the order of `points`).
    pub incl: Mat,
    offsets: Vec<usize>,
    prod_orders: Vec<u64>,
}

impl Sections {
    pub fn new(sheaf: &Sheaf, v: &[usize]) -> Self {
        let mut points = v.to_vec();
        points.sort_unstable();
        let mut offsets = Vec::with_capacity(points.len() + 1);
        let mut prod_orders = Vec::new();
        offsets.push(0);
        for &p in &points {
            prod_orders.extend_from_slice(sheaf.stalk(p).orders());
            offsets.push(prod_orders.len());
        }
        let total = prod_orders.len();
        let poset = sheaf.space().poset();
        if let Some(m) = poset.minimum(&points) {
            // sections over a set with a minimum are the stalk there
            let dm = sheaf.stalk(m).dim();
            let mut incl = Mat::zeros(total, dm);
            for (k, &q) in points.iter().enumerate() {
                incl.set_block(offsets[k], 0, sheaf.res(m, q));
            }
            return Sections { points, orders: sheaf.stalk(m).orders().to_vec(), incl, offsets, prod_orders };
        }
        let pos = |p: usize| points.iter().position(|&x| x == p).unwrap();
        let edges: Vec<(usize, usize)> =
            poset.hasse().into_iter().filter(|(p, q)| points.contains(p) && points.contains(q)).collect();
        let rows: usize = edges.iter().map(|&(_, q)| sheaf.stalk(q).dim()).sum();
        let mut cond = Mat::zeros(rows, total);
        let mut cond_orders = Vec::with_capacity(rows);
        let mut r0 = 0;
        for &(p, q) in &edges {
            let (kp, kq) = (pos(p), pos(q));
            cond.add_block(r0, offsets[kp], sheaf.res(p, q), 1);
            cond.add_block(r0, offsets[kq], &sheaf.stalk(q).identity(), -1);
            cond_orders.extend_from_slice(sheaf.stalk(q).orders());
            r0 += sheaf.stalk(q).dim();
        }
        let cond = cond.reduced_rows(&cond_orders);
        let (orders, incl) = group::kernel(&cond, &prod_orders, &cond_orders);
        Sections { points, orders, incl, offsets, prod_orders }
    }

    pub fn dim(&self) -> usize {
        self.orders.len()
    }

    pub fn size(&self) -> u128 {
        group::size(&self.orders)
    }

    fn block_of(&self, p: usize) -> Option<usize> {
        self.points.iter().position(|&x| x == p)
    }

    /// Component at `p` of the section with coordinates `c`.
    pub fn component(&self, c: &[i64], p: usize) -> Vec<i64> {
        let k = self.block_of(p).expect("point outside the open set");
        let full = self.incl.apply_reduce(c, &self.prod_orders);
        full[self.offsets[k]..self.offsets[k + 1]].to_vec()
    }

    /// Matrix of `c ↦ component at p`.
    pub fn projection(&self, p: usize) -> Mat {
        let k = self.block_of(p).expect("point outside the open set");
        let rows: Vec<usize> = (self.offsets[k]..self.offsets[k + 1]).collect();
        self.incl.select_rows(&rows)
    }

    /// Coordinates of the section given by a product vector (must be compatible).
    pub fn solve(&self, full: &[i64]) -> Option<Vec<i64>> {
        group::preimage(&self.incl, &self.orders, &self.prod_orders, full)
    }

    /// Columns are product vectors; returns section coordinates.
    fn solve_cols(&self, full: &Mat) -> Mat {
        if self.orders.is_empty() {
            return Mat::zeros(0, full.cols());
        }
        Solver::new(&self.incl, &self.orders, &self.prod_orders)
            .solve_cols(&full.clone().reduced_rows(&self.prod_orders))
            .expect("family is not a section")
    }

    /// Restriction to a smaller open set `W ⊆ V`.
    pub fn restriction_to(&self, other: &Sections) -> Mat {
        let mut rows = Vec::new();
        for &p in &other.points {
            let k = self.block_of(p).expect("restriction to a non-subset");
            rows.extend(self.offsets[k]..self.offsets[k + 1]);
        }
        other.solve_cols(&self.incl.select_rows(&rows))
    }

    /// Matrix `M_p -> Γ(V, M)` for `V ⊆ U_p`, restricting a germ at `p`.
    pub fn from_stalk(&self, sheaf: &Sheaf, p: usize) -> Mat {
        let blocks: Vec<Mat> = self.points.iter().map(|&v| sheaf.res(p, v).clone()).collect();
        let mut full = Mat::zeros(self.prod_orders.len(), sheaf.stalk(p).dim());
        for (k, b) in blocks.iter().enumerate() {
            full.set_block(self.offsets[k], 0, b);
        }
        self.solve_cols(&full)
    }

    /// Map `Γ(V, M) -> Γ(W, N)` for `W ⊆ V` given pointwise maps `M_w -> N_w`.
    pub fn map_with(&self, other: &Sections, mut at: impl FnMut(usize) -> Mat) -> Mat {
        let mut blocks = Vec::new();
        let mut rows = Vec::new();
        for &w in &other.points {
            let k = self.block_of(w).expect("target set is not contained in the source set");
            rows.extend(self.offsets[k]..self.offsets[k + 1]);
            blocks.push(at(w));
        }
        let big = Mat::block_diag(&blocks.iter().collect::<Vec<_>>());
        other.solve_cols(&big.mul(&self.incl.select_rows(&rows)))
    }

    /// Module structure over `T` given compatible ring maps `T -> O_p` for each point.
    pub fn module_over(&self, sheaf: &Sheaf, ring: &Arc<FiniteRing>, maps: &[RingHom]) -> Module {
        let action = (0..ring.rank())
            .map(|k| {
                let blocks: Vec<Mat> =
                    self.points.iter().zip(maps).map(|(&p, h)| sheaf.stalk(p).act(&h.images()[k])).collect();
                let big = Mat::block_diag(&blocks.iter().collect::<Vec<_>>());
                self.solve_cols(&big.mul(&self.incl))
            })
            .collect();
        fr::Module::new(ring.clone(), self.orders.clone(), action).expect("sections form a module")
    }

    /// Map of sections induced by a sheaf morphism.
    pub fn map_to(&self, other: &Sections, f: &SheafMorphism) -> Mat {
        let blocks: Vec<&Mat> = self.points.iter().map(|&p| &f.comps[p]).collect();
        let big = Mat::block_diag(&blocks);
        other.solve_cols(&big.mul(&self.incl))
    }
}

/// Ring `O(V)` with the projection maps `O(V) -> O_p`.
pub fn ring_of_sections(space: &Arc<RingedSpace>, v: &[usize]) -> Result<(Arc<FiniteRing>, Vec<RingHom>)> {
    space.poset().check_open(v)?;
    let mut pts = v.to_vec();
    pts.sort_unstable();
    if let Some(m) = space.poset().minimum(&pts) {
        let maps = pts.iter().map(|&q| space.res(m, q).clone()).collect();
        return Ok((space.ring(m).clone(), maps));
    }
    if pts.is_empty() {
        return Ok((Arc::new(FiniteRing::zero()), Vec::new()));
    }
    let o = Sheaf::structure(space.clone());
    let sec = Sections::new(&o, &pts);
    let d = sec.dim();
    let family = |c: &[i64]| -> Vec<Vec<i64>> { pts.iter().map(|&p| sec.component(c, p)).collect() };
    let basis: Vec<Vec<Vec<i64>>> = (0..d)
        .map(|s| {
            let mut e = vec![0; d];
            e[s] = 1;
            family(&e)
        })
        .collect();
    let coords = |fam: Vec<Vec<i64>>| -> Vec<i64> { sec.solve(&fam.concat()).expect("ring of sections is closed") };
    let table: Vec<Vec<Vec<i64>>> = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    let prod = pts.iter().enumerate().map(|(k, &p)| space.ring(p).mul(&basis[a][k], &basis[b][k])).collect();
                    coords(prod)
                })
                .collect()
        })
        .collect();
    let one = coords(pts.iter().map(|&p| space.ring(p).one().clone()).collect());
    let ring = Arc::new(FiniteRing::new(sec.orders.clone(), table, one)?);
    let maps = pts
        .iter()
        .enumerate()
        .map(|(k, &p)| RingHom::new(ring.clone(), space.ring(p).clone(), (0..d).map(|s| basis[s][k].clone()).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok((ring, maps))
}

/// `M(U)` as a module over `O(U)`.
pub fn sections(m: &Sheaf, u: &[usize]) -> Result<(Module, Sections)> {
    let (ring, maps) = ring_of_sections(m.space(), u)?;
    let sec = Sections::new(m, u);
    let module = sec.module_over(m, &ring, &maps);
    Ok((module, sec))
}

/// Global sections as an abelian group.
pub fn global_sections(m: &Sheaf) -> Sections {
    Sections::new(m, &m.space().poset().whole())
}

/// Stalkwise section data of a pushforward, reused for morphisms.
#[derive(Clone, Debug)]
pub struct PushData {
    pub sections: Vec<Sections>,
}

/// `f_* M` with `(f_* M)_y = M(f^{-1} U_y)`.
pub fn pushforward(f: &RingedMap, m: &Sheaf) -> (Sheaf, PushData) {
    let y = &f.target;
    let ypos = y.poset();
    let secs: Vec<Sections> = ypos.points().map(|b| Sections::new(m, &f.map.preimage(&ypos.up_set(b)))).collect();
    let stalks: Vec<Module> = ypos
        .points()
        .map(|b| {
            let maps: Vec<RingHom> = secs[b]
                .points
                .iter()
                .map(|&x| y.res(b, f.apply(x)).then(&f.comparison[x]).expect("composable"))
                .collect();
            secs[b].module_over(m, y.ring(b), &maps)
        })
        .collect();
    let sheaf = Sheaf::from_fn(y.clone(), stalks, |b, b2| secs[b].restriction_to(&secs[b2]));
    (sheaf, PushData { sections: secs })
}

/// `f_* φ` for a morphism between sheaves with known push data.
pub fn pushforward_morphism(
    src_data: &PushData,
    tgt_data: &PushData,
    src: &Arc<Sheaf>,
    tgt: &Arc<Sheaf>,
    phi: &SheafMorphism,
) -> SheafMorphism {
    let comps =
        src_data.sections.iter().zip(&tgt_data.sections).map(|(a, b)| a.map_to(b, phi)).collect();
    SheafMorphism::from_parts(src.clone(), tgt.clone(), comps)
}

/// `f^* N` with `(f^* N)_x = N_{f(x)} ⊗ O_x`.
pub fn pullback(f: &RingedMap, n: &Sheaf) -> Result<Sheaf> {
    let x = &f.source;
    let bcs = x
        .poset()
        .points()
        .map(|p| base_change(n.stalk(f.apply(p)), &f.comparison[p]))
        .collect::<Result<Vec<_>>>()?;
    let stalks = bcs.iter().map(|b| b.module.clone()).collect();
    Ok(Sheaf::from_fn(x.clone(), stalks, |p, q| {
        bcs[p].map_to(&bcs[q], n.res(f.apply(p), f.apply(q)), x.res(p, q))
    }))
}

/// `f^* φ`.
pub fn pullback_morphism(f: &RingedMap, src: &Arc<Sheaf>, tgt: &Arc<Sheaf>, phi: &SheafMorphism) -> Result<SheafMorphism> {
    let x = &f.source;
    let n_src = phi.source.clone();
    let n_tgt = phi.target.clone();
    let comps = x
        .poset()
        .points()
        .map(|p| {
            let y = f.apply(p);
            let a = base_change(n_src.stalk(y), &f.comparison[p])?;
            let b = base_change(n_tgt.stalk(y), &f.comparison[p])?;
            Ok(a.map_to(&b, &phi.comps[y], &RingHom::identity(x.ring(p).clone())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SheafMorphism::from_parts(src.clone(), tgt.clone(), comps))
}

/// Quasi-coherent sheaf `Ã` on the open subspace `U_x` with stalks `A ⊗ O_q`.
pub fn tilde(space: &Arc<RingedSpace>, x: usize, a: &Module) -> Result<(Arc<RingedSpace>, Vec<usize>, Sheaf)> {
    if !fr::same_ring(a.ring(), space.ring(x)) {
        return Err(Error::RingMismatch("tilde of a module over another ring".into()));
    }
    let (sub, idx) = space.open_subspace(&space.poset().up_set(x))?;
    let bcs = idx.iter().map(|&q| base_change(a, space.res(x, q))).collect::<Result<Vec<_>>>()?;
    let stalks = bcs.iter().map(|b| b.module.clone()).collect();
    let id = a.identity();
    let sheaf = Sheaf::from_fn(sub.clone(), stalks, |i, j| bcs[i].map_to(&bcs[j], &id, space.res(idx[i], idx[j])));
    Ok((sub, idx, sheaf))
}

/// Extension by zero `O^U` of the structure sheaf from an open set.
pub fn ext_by_zero(space: &Arc<RingedSpace>, u: &[usize]) -> Result<Sheaf> {
    space.poset().check_open(u)?;
    let stalks: Vec<Module> = space
        .poset()
        .points()
        .map(|p| if u.contains(&p) { Module::regular(space.ring(p).clone()) } else { Module::zero(space.ring(p).clone()) })
        .collect();
    let s2 = stalks.clone();
    Ok(Sheaf::from_fn(space.clone(), stalks, |p, q| {
        if u.contains(&p) {
            space.res(p, q).matrix()
        } else {
            Mat::zeros(s2[q].dim(), 0)
        }
    }))
}

/// `O^U -> M` sending `1` to the restrictions of a germ `s ∈ M_p`, `U = U_p`.
pub fn germ_morphism(m: &Arc<Sheaf>, p: usize, s: &[i64]) -> Result<SheafMorphism> {
    let space = m.space().clone();
    let src = Arc::new(ext_by_zero(&space, &space.poset().up_set(p))?);
    let comps = space
        .poset()
        .points()
        .map(|q| {
            if !space.poset().leq(p, q) {
                return Mat::zeros(m.stalk(q).dim(), src.stalk(q).dim());
            }
            let v = m.res(p, q).apply_reduce(s, m.stalk(q).orders());
            let ring = space.ring(q);
            let cols: Vec<Vec<i64>> =
                (0..ring.rank()).map(|k| m.stalk(q).act(&ring.basis(k)).apply_reduce(&v, m.stalk(q).orders())).collect();
            Mat::from_cols(m.stalk(q).dim(), &cols)
        })
        .collect();
    SheafMorphism::new(src, m.clone(), comps)
}

/// Sheaf with stalk `A` (restricted to `O_q`) on every `q ≤ x`, identity
/// restrictions there, zero elsewhere. `A` must be an `O_x`-module.
pub fn co_skyscraper(space: &Arc<RingedSpace>, x: usize, a: &Module) -> Result<Sheaf> {
    if !fr::same_ring(a.ring(), space.ring(x)) {
        return Err(Error::RingMismatch("co-skyscraper of a module over another ring".into()));
    }
    let poset = space.poset().clone();
    let stalks = poset
        .points()
        .map(|q| if poset.leq(q, x) { a.restrict(space.res(q, x)) } else { Ok(Module::zero(space.ring(q).clone())) })
        .collect::<Result<Vec<_>>>()?;
    let s2: Vec<Module> = stalks.clone();
    Ok(Sheaf::from_fn(space.clone(), stalks, |p, q| {
        if poset.leq(q, x) {
            a.identity()
        } else {
            Mat::zeros(0, s2[p].dim())
        }
    }))
}

/// `Hom_O(M, N)` as an abelian group of compatible stalkwise maps.
#[derive(Clone, Debug)]
pub struct SheafHom {
    pub orders: Vec<u64>,
    incl: Mat,
    spaces: Vec<HomSpace>,
    offsets: Vec<usize>,
    prod_orders: Vec<u64>,
    solver: Arc<Solver>,
}

impl SheafHom {
    pub fn new(m: &Sheaf, n: &Sheaf) -> Result<Self> {
        if m.space() != n.space() {
            return Err(Error::SpaceMismatch);
        }
        let poset = m.space().poset().clone();
        let spaces = poset.points().map(|p| HomSpace::new(m.stalk(p), n.stalk(p))).collect::<Result<Vec<_>>>()?;
        let mut offsets = vec![0];
        let mut prod_orders = Vec::new();
        for h in &spaces {
            prod_orders.extend_from_slice(h.module.orders());
            offsets.push(prod_orders.len());
        }
        let mut blocks = Vec::new();
        let mut cond_orders = Vec::new();
        for (p, q) in poset.hasse() {
            let (nq, mp) = (n.stalk(q), m.stalk(p));
            let rows = nq.dim() * mp.dim();
            if rows == 0 {
                continue;
            }
            let mut block = Mat::zeros(rows, prod_orders.len());
            let rn = n.res(p, q);
            let rm = m.res(p, q);
            for s in 0..spaces[p].dim() {
                let mut e = vec![0; spaces[p].dim()];
                e[s] = 1;
                let h = rn.mul(&spaces[p].to_matrix(&e));
                for i in 0..nq.dim() {
                    for j in 0..mp.dim() {
                        block.set(i * mp.dim() + j, offsets[p] + s, h.get(i, j));
                    }
                }
            }
            for s in 0..spaces[q].dim() {
                let mut e = vec![0; spaces[q].dim()];
                e[s] = 1;
                let h = spaces[q].to_matrix(&e).mul(rm);
                for i in 0..nq.dim() {
                    for j in 0..mp.dim() {
                        let idx = i * mp.dim() + j;
                        block.set(idx, offsets[q] + s, block.get(idx, offsets[q] + s) - h.get(i, j));
                    }
                }
            }
            for i in 0..nq.dim() {
                for _ in 0..mp.dim() {
                    cond_orders.push(nq.orders()[i]);
                }
            }
            blocks.push(block);
        }
        let mut cond = Mat::zeros(0, prod_orders.len());
        for b in &blocks {
            cond = cond.vstack(b);
        }
        let cond = cond.reduced_rows(&cond_orders);
        let (orders, incl) = group::kernel(&cond, &prod_orders, &cond_orders);
        let solver = Arc::new(Solver::new(&incl, &orders, &prod_orders));
        Ok(SheafHom { orders, incl, spaces, offsets, prod_orders, solver })
    }

    pub fn dim(&self) -> usize {
        self.orders.len()
    }

    pub fn size(&self) -> u128 {
        group::size(&self.orders)
    }

    pub fn cardinality(&self) -> num_bigint::BigUint {
        group::cardinality(&self.orders)
    }

    /// Components of the morphism with the given coordinates.
    pub fn to_comps(&self, c: &[i64]) -> Vec<Mat> {
        let full = self.incl.apply_reduce(c, &self.prod_orders);
        self.spaces
            .iter()
            .enumerate()
            .map(|(p, h)| h.to_matrix(&full[self.offsets[p]..self.offsets[p + 1]]))
            .collect()
    }

    /// Coordinates of a morphism; `None` if it is not a valid morphism.
    pub fn from_comps(&self, comps: &[Mat]) -> Option<Vec<i64>> {
        let mut full = Vec::with_capacity(self.prod_orders.len());
        for (p, h) in self.spaces.iter().enumerate() {
            full.extend(h.from_matrix(&comps[p])?);
        }
        self.solver.solve(&full)
    }

    pub fn morphism(&self, src: &Arc<Sheaf>, tgt: &Arc<Sheaf>, c: &[i64]) -> SheafMorphism {
        SheafMorphism::from_parts(src.clone(), tgt.clone(), self.to_comps(c))
    }
}
