use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{self, Solver};
use crate::linalg::{gcd, lcm_all, Mat};

use super::ring::{same_ring, Elem, FiniteRing, RingHom};

/// Finitely generated module over a finite commutative ring.
///
/// Stored as its additive group `⊕ Z/orders[j]` together with the action
/// matrix of every additive generator of the ring. Presentations over the
/// ring are converted into this form on construction.
#[derive(Clone, PartialEq, Eq)]
pub struct Module {
    ring: Arc<FiniteRing>,
    orders: Vec<u64>,
    action: Vec<Mat>,
}

impl fmt::Debug for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Module{:?}", self.orders)
    }
}

impl Module {
    pub fn new(ring: Arc<FiniteRing>, orders: Vec<u64>, action: Vec<Mat>) -> Result<Self> {
        if orders.iter().any(|&o| o < 2) {
            return Err(Error::InvalidModule("cyclic orders must be at least 2".into()));
        }
        if action.len() != ring.rank() {
            return Err(Error::InvalidModule("one action matrix per ring generator expected".into()));
        }
        let n = orders.len();
        let mut action = action;
        for a in action.iter_mut() {
            if a.rows() != n || a.cols() != n {
                return Err(Error::InvalidModule("action matrix has the wrong shape".into()));
            }
            a.reduce_rows(&orders);
        }
        let m = Module { ring, orders, action };
        m.validate()?;
        Ok(m)
    }

    /// Builds without validation; callers guarantee the module axioms.
    pub(crate) fn from_parts(ring: Arc<FiniteRing>, orders: Vec<u64>, mut action: Vec<Mat>) -> Self {
        for a in action.iter_mut() {
            a.reduce_rows(&orders);
        }
        Module { ring, orders, action }
    }

    fn validate(&self) -> Result<()> {
        let r = &self.ring;
        for (k, a) in self.action.iter().enumerate() {
            if !group::is_well_defined(a, &self.orders, &self.orders) {
                return Err(Error::InvalidModule(format!("action of e{k} is not additive")));
            }
            let scaled = a.scale(r.orders()[k] as i64);
            if !scaled.reduced_rows(&self.orders).is_zero() {
                return Err(Error::InvalidModule(format!("action of e{k} violates its additive order")));
            }
        }
        if self.act(r.one()) != Mat::identity(self.dim()).reduced_rows(&self.orders) {
            return Err(Error::InvalidModule("unit does not act as the identity".into()));
        }
        for i in 0..r.rank() {
            for j in 0..r.rank() {
                let lhs = self.action[i].mul_reduce(&self.action[j], &self.orders);
                if lhs != self.act(&r.table()[i][j]) {
                    return Err(Error::InvalidModule(format!("action not multiplicative on (e{i},e{j})")));
                }
            }
        }
        Ok(())
    }

    pub fn zero(ring: Arc<FiniteRing>) -> Self {
        let action = vec![Mat::zeros(0, 0); ring.rank()];
        Module { ring, orders: Vec::new(), action }
    }

    /// The ring as a module over itself.
    pub fn regular(ring: Arc<FiniteRing>) -> Self {
        let action = (0..ring.rank()).map(|k| ring.mult_matrix(&ring.basis(k))).collect();
        let orders = ring.orders().to_vec();
        Module { ring, orders, action }
    }

    pub fn free(ring: Arc<FiniteRing>, rank: usize) -> Self {
        let r = Module::regular(ring);
        direct_sum(&vec![&r; rank])
    }

    /// `R^g / (R-span of the relation columns)`; each relation lists `g` ring elements.
    pub fn presented(ring: Arc<FiniteRing>, g: usize, relations: &[Vec<Elem>]) -> Result<Self> {
        let free = Module::free(ring.clone(), g);
        let k = ring.rank();
        let mut cols = Vec::new();
        for rel in relations {
            if rel.len() != g || rel.iter().any(|e| e.len() != k) {
                return Err(Error::InvalidModule("relation has the wrong shape".into()));
            }
            cols.push(rel.concat());
        }
        let gens = Mat::from_cols(free.dim(), &cols);
        Ok(quotient(&free, &gens).0)
    }

    /// `Z/n`-style cyclic module `R / I` for the ideal generated by `gens`.
    pub fn cyclic_quotient(ring: Arc<FiniteRing>, gens: &[Elem]) -> Result<Self> {
        let rels: Vec<Vec<Elem>> = gens.iter().map(|e| vec![e.clone()]).collect();
        Module::presented(ring, 1, &rels)
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn action(&self) -> &[Mat] {
        &self.action
    }

    /// Number of cyclic summands in the stored decomposition.
    pub fn dim(&self) -> usize {
        self.orders.len()
    }

    pub fn is_zero(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn size(&self) -> u128 {
        group::size(&self.orders)
    }

    pub fn cardinality(&self) -> num_bigint::BigUint {
        group::cardinality(&self.orders)
    }

    /// Invariant factors `d_1 | d_2 | ...` of the additive group.
    pub fn abelian_invariants(&self) -> Vec<u64> {
        group::invariant_factors(&self.orders)
    }

    pub fn exponent(&self) -> u64 {
        lcm_all(&self.orders)
    }

    /// Matrix by which the ring element `a` acts.
    pub fn act(&self, a: &[i64]) -> Mat {
        let n = self.dim();
        let mut out = Mat::zeros(n, n);
        for (k, &c) in a.iter().enumerate() {
            if c != 0 {
                out = out.add(&self.action[k].scale(c));
            }
        }
        out.reduced_rows(&self.orders)
    }

    pub fn identity(&self) -> Mat {
        Mat::identity(self.dim()).reduced_rows(&self.orders)
    }

    pub fn reduce(&self, v: &mut [i64]) {
        group::reduce(v, &self.orders);
    }

    pub fn is_zero_elem(&self, v: &[i64]) -> bool {
        group::is_zero_vec(v, &self.orders)
    }

    /// Restriction of scalars along `phi : R -> S` (self must be an `S`-module).
    pub fn restrict(&self, phi: &RingHom) -> Result<Module> {
        if !same_ring(phi.target(), &self.ring) {
            return Err(Error::RingMismatch("restriction of scalars".into()));
        }
        let action = phi.images().iter().map(|img| self.act(img)).collect();
        Ok(Module { ring: phi.source().clone(), orders: self.orders.clone(), action })
    }

    /// Replaces the ring by an equal one (same table), used after parsing.
    pub fn with_ring(&self, ring: Arc<FiniteRing>) -> Result<Module> {
        if !same_ring(&ring, &self.ring) {
            return Err(Error::RingMismatch("with_ring".into()));
        }
        Ok(Module { ring, orders: self.orders.clone(), action: self.action.clone() })
    }

    /// All elements (fails above `cap`).
    pub fn elements(&self, cap: u128) -> Result<Vec<Vec<i64>>> {
        let size = self.size();
        if size > cap {
            return Err(Error::CapExceeded { size, cap });
        }
        Ok(group::elements(&self.orders).collect())
    }

    /// Whether `mat : self -> other` is additive and `R`-linear.
    pub fn is_linear_map(&self, other: &Module, mat: &Mat) -> bool {
        if !same_ring(&self.ring, &other.ring) || !group::is_well_defined(mat, &self.orders, &other.orders) {
            return false;
        }
        self.action.iter().zip(&other.action).all(|(a, b)| {
            mat.mul_reduce(a, &other.orders) == b.mul_reduce(mat, &other.orders)
        })
    }
}

/// Direct sum, coordinates concatenated in order.
pub fn direct_sum(parts: &[&Module]) -> Module {
    assert!(!parts.is_empty(), "direct sum of an empty list needs a ring");
    let ring = parts[0].ring.clone();
    let orders: Vec<u64> = parts.iter().flat_map(|m| m.orders.iter().copied()).collect();
    let action = (0..ring.rank())
        .map(|k| Mat::block_diag(&parts.iter().map(|m| &m.action[k]).collect::<Vec<_>>()))
        .collect();
    Module { ring, orders, action }
}

/// Direct sum over an explicit ring (handles the empty list).
pub fn direct_sum_over(ring: &Arc<FiniteRing>, parts: &[&Module]) -> Module {
    if parts.is_empty() {
        Module::zero(ring.clone())
    } else {
        direct_sum(parts)
    }
}

/// Submodule generated by the columns of `gens` (closed under the action).
pub fn submodule(ambient: &Module, gens: &Mat) -> (Module, Mat) {
    let span = ring_span(ambient, gens);
    let (orders, incl) = group::subgroup(&span, &ambient.orders);
    let action = transport_to_sub(ambient, &orders, &incl);
    (Module { ring: ambient.ring.clone(), orders, action }, incl)
}

/// Additive span of `{e_k g}` for all ring generators `e_k` and columns `g`.
fn ring_span(ambient: &Module, gens: &Mat) -> Mat {
    let mut out = gens.clone();
    for a in &ambient.action {
        out = out.hstack(&a.mul(gens));
    }
    out.reduced_rows(&ambient.orders)
}

/// Action on a subgroup that is known to be stable under the ambient action.
pub(crate) fn transport_to_sub(ambient: &Module, orders: &[u64], incl: &Mat) -> Vec<Mat> {
    if orders.is_empty() {
        return vec![Mat::zeros(0, 0); ambient.ring.rank()];
    }
    let solver = Solver::new(incl, orders, &ambient.orders);
    ambient
        .action
        .iter()
        .map(|a| {
            let img = a.mul(incl).reduced_rows(&ambient.orders);
            solver.solve_cols(&img).expect("subgroup is not stable under the ring action")
        })
        .collect()
}

/// Quotient by the submodule generated by `gens`; returns the projection
/// and a lift (section of the projection on coordinates).
pub fn quotient(ambient: &Module, gens: &Mat) -> (Module, Mat, Mat) {
    let span = ring_span(ambient, gens);
    let (orders, proj, lift) = group::cokernel(&span, &ambient.orders);
    let action = ambient
        .action
        .iter()
        .map(|a| proj.mul(a).mul(&lift).reduced_rows(&orders))
        .collect();
    (Module { ring: ambient.ring.clone(), orders, action }, proj, lift)
}

/// Kernel of a linear map with its inclusion.
pub fn kernel(src: &Module, tgt: &Module, mat: &Mat) -> (Module, Mat) {
    let (orders, incl) = group::kernel(mat, &src.orders, &tgt.orders);
    let action = transport_to_sub(src, &orders, &incl);
    (Module { ring: src.ring.clone(), orders, action }, incl)
}

/// Cokernel of a linear map: module, projection and lift.
pub fn cokernel(tgt: &Module, mat: &Mat) -> (Module, Mat, Mat) {
    let (orders, proj, lift) = group::cokernel(mat, &tgt.orders);
    let action = tgt
        .action
        .iter()
        .map(|a| proj.mul(a).mul(&lift).reduced_rows(&orders))
        .collect();
    (Module { ring: tgt.ring.clone(), orders, action }, proj, lift)
}

/// Image of a linear map as a submodule of the target.
pub fn image(tgt: &Module, mat: &Mat) -> (Module, Mat) {
    let (orders, incl) = group::subgroup(mat, &tgt.orders);
    let action = transport_to_sub(tgt, &orders, &incl);
    (Module { ring: tgt.ring.clone(), orders, action }, incl)
}

pub fn is_injective(src: &Module, tgt: &Module, mat: &Mat) -> bool {
    group::is_injective(mat, &src.orders, &tgt.orders)
}

pub fn is_surjective(tgt: &Module, mat: &Mat) -> bool {
    group::is_surjective(mat, &tgt.orders)
}

pub fn is_iso(src: &Module, tgt: &Module, mat: &Mat) -> bool {
    src.size() == tgt.size() && is_injective(src, tgt, mat)
}

/// Inverse matrix of an isomorphism.
pub fn inverse(src: &Module, tgt: &Module, mat: &Mat) -> Option<Mat> {
    if !is_iso(src, tgt, mat) {
        return None;
    }
    Solver::new(mat, &src.orders, &tgt.orders).solve_cols(&tgt.identity())
}

/// `Hom_R(M, N)` as an `R`-module, with conversions to and from matrices.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub module: Module,
    src_orders: Vec<u64>,
    tgt_orders: Vec<u64>,
    /// order and scaling step of each `Hom_Z(Z/m_j, Z/n_i)` summand, index `i*m + j`
    steps: Vec<i64>,
    z_orders: Vec<u64>,
    incl: Mat,
    solver: Arc<Solver>,
}

impl HomSpace {
    pub fn new(src: &Module, tgt: &Module) -> Result<Self> {
        if !same_ring(&src.ring, &tgt.ring) {
            return Err(Error::RingMismatch("Hom between modules over different rings".into()));
        }
        let (m, n) = (src.dim(), tgt.dim());
        let mut z_orders = Vec::with_capacity(n * m);
        let mut steps = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let g = gcd(tgt.orders[i], src.orders[j]);
                z_orders.push(g);
                steps.push((tgt.orders[i] / g) as i64);
            }
        }
        // R-linearity: H A_k - B_k H = 0 for each ring generator
        let kr = src.ring.rank();
        let mut lin = Mat::zeros(kr * n * m, n * m);
        let mut lin_orders = Vec::with_capacity(kr * n * m);
        for _ in 0..kr {
            for i in 0..n {
                for _ in 0..m {
                    lin_orders.push(tgt.orders[i]);
                }
            }
        }
        for k in 0..kr {
            let (a, b) = (&src.action[k], &tgt.action[k]);
            for i in 0..n {
                for j in 0..m {
                    let col = i * m + j;
                    let s = steps[col];
                    // (E_ij A)[i][t] = A[j][t]
                    for t in 0..m {
                        let row = k * n * m + i * m + t;
                        let v = lin.get(row, col) + s * a.get(j, t);
                        lin.set(row, col, v);
                    }
                    // (B E_ij)[t][j] = B[t][i]
                    for t in 0..n {
                        let row = k * n * m + t * m + j;
                        let v = lin.get(row, col) - s * b.get(t, i);
                        lin.set(row, col, v);
                    }
                }
            }
        }
        let keep: Vec<usize> = (0..n * m).filter(|&c| z_orders[c] > 1).collect();
        let z_kept: Vec<u64> = keep.iter().map(|&c| z_orders[c]).collect();
        let lin_kept = lin.select_cols(&keep).reduced_rows(&lin_orders);
        let (orders, incl_kept) = group::kernel(&lin_kept, &z_kept, &lin_orders);
        let mut incl = Mat::zeros(n * m, orders.len());
        for (r, &c) in keep.iter().enumerate() {
            for s in 0..orders.len() {
                incl.set(c, s, incl_kept.get(r, s));
            }
        }
        let solver = Arc::new(Solver::new(&incl, &orders, &z_orders));
        let mut hs = HomSpace {
            module: Module::zero(src.ring.clone()),
            src_orders: src.orders.clone(),
            tgt_orders: tgt.orders.clone(),
            steps,
            z_orders,
            incl,
            solver,
        };
        let action = src.action.iter().map(|a| hs.precompose_matrix(&orders, a)).collect();
        hs.module = Module { ring: src.ring.clone(), orders, action };
        Ok(hs)
    }

    fn precompose_matrix(&self, orders: &[u64], a: &Mat) -> Mat {
        debug_assert_eq!(orders, self.solver_src());
        let cols: Vec<Vec<i64>> = (0..orders.len())
            .map(|s| {
                let mut e = vec![0; orders.len()];
                e[s] = 1;
                let f = self.to_matrix(&e).mul(a).reduced_rows(&self.tgt_orders);
                self.from_matrix(&f).expect("precomposition leaves Hom_R")
            })
            .collect();
        Mat::from_cols(orders.len(), &cols)
    }

    fn solver_src(&self) -> &[u64] {
        self.solver.src()
    }

    /// Action on Hom coordinates of `f ↦ f ∘ a` for an endomorphism `a` of the source
    /// commuting with the ring action.
    pub fn precompose_action(&self, a: &Mat) -> Mat {
        self.precompose_matrix(&self.module.orders, a)
    }

    /// Action on Hom coordinates of `f ↦ b ∘ f` for an endomorphism `b` of the target.
    pub fn postcompose_action(&self, b: &Mat) -> Mat {
        let d = self.module.dim();
        let cols: Vec<Vec<i64>> = (0..d)
            .map(|s| {
                let mut e = vec![0; d];
                e[s] = 1;
                let f = b.mul(&self.to_matrix(&e)).reduced_rows(&self.tgt_orders);
                self.from_matrix(&f).expect("postcomposition leaves Hom_R")
            })
            .collect();
        Mat::from_cols(d, &cols)
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    /// Linear map from Hom coordinates to the row-major entries of the matrix,
    /// with the entry orders (`n_i` repeated across row `i`).
    pub fn entry_map(&self) -> (Mat, Vec<u64>) {
        let (n, m) = (self.tgt_orders.len(), self.src_orders.len());
        let d = self.dim();
        let mut out = Mat::zeros(n * m, d);
        let mut orders = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let idx = i * m + j;
                for s in 0..d {
                    out.set(idx, s, self.incl.get(idx, s) * self.steps[idx]);
                }
                orders.push(self.tgt_orders[i]);
            }
        }
        (out.reduced_rows(&orders), orders)
    }

    pub fn to_matrix(&self, coords: &[i64]) -> Mat {
        let z = self.incl.apply(coords);
        let (n, m) = (self.tgt_orders.len(), self.src_orders.len());
        let mut h = Mat::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                let idx = i * m + j;
                h.set(i, j, (z[idx] * self.steps[idx]).rem_euclid(self.tgt_orders[i] as i64));
            }
        }
        h
    }

    /// Coordinates of an `R`-linear matrix; `None` if it is not in `Hom_R`.
    pub fn from_matrix(&self, h: &Mat) -> Option<Vec<i64>> {
        let (n, m) = (self.tgt_orders.len(), self.src_orders.len());
        let mut z = vec![0i64; n * m];
        for i in 0..n {
            for j in 0..m {
                let idx = i * m + j;
                let v = h.get(i, j).rem_euclid(self.tgt_orders[i] as i64);
                if v % self.steps[idx] != 0 {
                    return None;
                }
                z[idx] = (v / self.steps[idx]).rem_euclid(self.z_orders[idx] as i64);
            }
        }
        self.solver.solve(&z)
    }
}

/// `Hom_R(M, N)` as an `R`-module.
pub fn hom_mod(m: &Module, n: &Module) -> Result<Module> {
    Ok(HomSpace::new(m, n)?.module)
}

/// Presentation of `M ⊗_R N` as a quotient of `⊕ Z/gcd(m_j, n_i)`.
#[derive(Clone, Debug)]
pub struct TensorPres {
    m_dim: usize,
    n_dim: usize,
    gen_orders: Vec<u64>,
    pub orders: Vec<u64>,
    to_canon: Mat,
    from_canon: Mat,
}

impl TensorPres {
    /// Balanced tensor product over the common ring.
    pub fn new(m: &Module, n: &Module) -> Result<Self> {
        if !same_ring(&m.ring, &n.ring) {
            return Err(Error::RingMismatch("tensor over different rings".into()));
        }
        let (md, nd) = (m.dim(), n.dim());
        let gen_orders: Vec<u64> =
            (0..md).flat_map(|j| (0..nd).map(move |i| (j, i))).map(|(j, i)| gcd(m.orders[j], n.orders[i])).collect();
        let mut cols = Vec::new();
        for k in 0..m.ring.rank() {
            let (a, b) = (&m.action[k], &n.action[k]);
            for j in 0..md {
                for i in 0..nd {
                    let mut col = vec![0i64; md * nd];
                    for jj in 0..md {
                        col[jj * nd + i] += a.get(jj, j);
                    }
                    for ii in 0..nd {
                        col[j * nd + ii] -= b.get(ii, i);
                    }
                    cols.push(col);
                }
            }
        }
        let rel = Mat::from_cols(md * nd, &cols).reduced_rows(&gen_orders);
        let (orders, to_canon, from_canon) = if gen_orders.is_empty() {
            (Vec::new(), Mat::zeros(0, 0), Mat::zeros(0, 0))
        } else {
            group::cokernel(&rel, &gen_orders)
        };
        Ok(TensorPres { m_dim: md, n_dim: nd, gen_orders, orders, to_canon, from_canon })
    }

    fn gen(&self, j: usize, i: usize) -> usize {
        j * self.n_dim + i
    }

    /// Canonical coordinates of `x ⊗ y`.
    pub fn elem(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let mut g = vec![0i64; self.gen_orders.len()];
        for (j, &a) in x.iter().enumerate() {
            for (i, &b) in y.iter().enumerate() {
                g[self.gen(j, i)] += a * b;
            }
        }
        group::reduce(&mut g, &self.gen_orders);
        self.to_canon.apply_reduce(&g, &self.orders)
    }

    /// Matrix (generator space -> canonical) of `f ⊗ g` into another tensor.
    pub fn map_to(&self, other: &TensorPres, f: &Mat, g: &Mat) -> Mat {
        let mut gen_img = Mat::zeros(other.gen_orders.len(), self.gen_orders.len());
        for j in 0..self.m_dim {
            for i in 0..self.n_dim {
                let c = self.gen(j, i);
                for jj in 0..other.m_dim {
                    let a = f.get(jj, j);
                    if a == 0 {
                        continue;
                    }
                    for ii in 0..other.n_dim {
                        let b = g.get(ii, i);
                        if b != 0 {
                            let r = other.gen(jj, ii);
                            gen_img.set(r, c, gen_img.get(r, c) + a * b);
                        }
                    }
                }
            }
        }
        let gen_img = gen_img.reduced_rows(&other.gen_orders);
        other.to_canon.mul(&gen_img).mul(&self.from_canon).reduced_rows(&other.orders)
    }

    /// Matrix of the map `M ⊗ N -> T` determined by `x_j ⊗ y_i ↦ value(j, i)`.
    pub fn map_from(&self, tgt_orders: &[u64], value: impl Fn(usize, usize) -> Vec<i64>) -> Mat {
        let mut gen_img = Mat::zeros(tgt_orders.len(), self.gen_orders.len());
        for j in 0..self.m_dim {
            for i in 0..self.n_dim {
                let v = value(j, i);
                for (r, x) in v.into_iter().enumerate() {
                    gen_img.set(r, self.gen(j, i), x);
                }
            }
        }
        gen_img.mul(&self.from_canon).reduced_rows(tgt_orders)
    }
}

/// Result of `M ⊗_R S` along `phi : R -> S`.
#[derive(Clone, Debug)]
pub struct BaseChange {
    pub module: Module,
    pub pres: TensorPres,
    /// `m ↦ m ⊗ 1`
    pub unit: Mat,
}

/// `M ⊗_R S`, the pushed-forward module over `S`.
pub fn base_change(m: &Module, phi: &RingHom) -> Result<BaseChange> {
    if !same_ring(phi.source(), &m.ring) {
        return Err(Error::RingMismatch("base change source ring".into()));
    }
    let s = phi.target().clone();
    let s_reg = Module::regular(s.clone());
    let s_as_r = s_reg.restrict(phi)?;
    let pres = TensorPres::new(m, &s_as_r)?;
    let id_m = Mat::identity(m.dim());
    let action = (0..s.rank())
        .map(|t| pres.map_to(&pres, &id_m, &s_reg.action[t]))
        .collect();
    let module = Module::from_parts(s.clone(), pres.orders.clone(), action);
    let one = s.one().clone();
    let cols: Vec<Vec<i64>> = (0..m.dim())
        .map(|j| {
            let mut e = vec![0; m.dim()];
            e[j] = 1;
            pres.elem(&e, &one)
        })
        .collect();
    let unit = Mat::from_cols(module.dim(), &cols);
    Ok(BaseChange { module, pres, unit })
}

impl BaseChange {
    /// For an `R`-linear `g : M -> B` into an `S`-module `B`, the induced
    /// `S`-linear map `M ⊗ S -> B`, `m ⊗ s ↦ s g(m)`.
    pub fn adjoint(&self, b: &Module, g: &Mat) -> Mat {
        let s = self.module.ring.clone();
        self.pres.map_from(&b.orders, |j, i| {
            let col = g.column(j);
            b.act(&s.basis(i)).apply_reduce(&col, &b.orders)
        })
    }

    /// `f ⊗ ψ : M ⊗_R S -> M' ⊗_{R'} S'` for compatible maps.
    pub fn map_to(&self, other: &BaseChange, f: &Mat, psi: &RingHom) -> Mat {
        self.pres.map_to(&other.pres, f, &psi.matrix())
    }
}

/// `M ⊗_R N` as an `R`-module.
pub fn tensor(m: &Module, n: &Module) -> Result<(Module, TensorPres)> {
    let pres = TensorPres::new(m, n)?;
    let id_n = Mat::identity(n.dim());
    let action = m.action.iter().map(|a| pres.map_to(&pres, a, &id_n)).collect();
    Ok((Module::from_parts(m.ring.clone(), pres.orders.clone(), action), pres))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> Arc<FiniteRing> {
        Arc::new(FiniteRing::cyclic(n))
    }

    #[test]
    fn cyclic_presentation() {
        let r = z(4);
        let m = Module::cyclic_quotient(r, &[vec![2]]).unwrap();
        assert_eq!(m.orders(), &[2]);
    }

    #[test]
    fn hom_z2_into_z4() {
        let r = z(4);
        let m = Module::cyclic_quotient(r.clone(), &[vec![2]]).unwrap();
        let n = Module::regular(r);
        let h = HomSpace::new(&m, &n).unwrap();
        assert_eq!(h.module.size(), 2);
        let f = h.to_matrix(&[1]);
        assert_eq!(f.get(0, 0), 2);
    }

    #[test]
    fn hom_from_regular_is_target() {
        let r = Arc::new(FiniteRing::truncated_poly(2, 2));
        let n = Module::cyclic_quotient(r.clone(), &[r.basis(1)]).unwrap();
        let h = hom_mod(&Module::regular(r.clone()), &n).unwrap();
        assert_eq!(h.size(), n.size());
        assert!(hom_mod(&Module::zero(r.clone()), &n).unwrap().is_zero());
    }

    #[test]
    fn base_change_examples() {
        let (z4, z2) = (z(4), z(2));
        let phi = RingHom::from_cyclic(z4.clone(), z2).unwrap();
        let bc = base_change(&Module::regular(z4.clone()), &phi).unwrap();
        assert_eq!(bc.module.orders(), &[2]);
        let m = Module::cyclic_quotient(z4.clone(), &[vec![2]]).unwrap();
        assert_eq!(base_change(&m, &phi).unwrap().module.orders(), &[2]);
        assert!(base_change(&Module::zero(z4), &phi).unwrap().module.is_zero());
    }

    #[test]
    fn z3_dies_over_z2() {
        let (z6, z2) = (z(6), z(2));
        let phi = RingHom::from_cyclic(z6.clone(), z2).unwrap();
        let m = Module::cyclic_quotient(z6, &[vec![3]]).unwrap();
        assert_eq!(m.size(), 3);
        assert!(base_change(&m, &phi).unwrap().module.is_zero());
    }

    #[test]
    fn kernel_cokernel_of_doubling() {
        let r = z(4);
        let m = Module::regular(r);
        let two = m.act(&[2]);
        let (k, _) = kernel(&m, &m, &two);
        let (c, _, _) = cokernel(&m, &two);
        assert_eq!(k.orders(), &[2]);
        assert_eq!(c.orders(), &[2]);
        let id = m.identity();
        assert!(kernel(&m, &m, &id).0.is_zero());
        assert!(cokernel(&m, &id).0.is_zero());
        let zero = Mat::zeros(1, 1);
        assert_eq!(kernel(&m, &m, &zero).0.size(), 4);
        assert_eq!(cokernel(&m, &zero).0.size(), 4);
    }

    #[test]
    fn tensor_of_cyclics() {
        let r = z(12);
        let a = Module::cyclic_quotient(r.clone(), &[vec![4]]).unwrap();
        let b = Module::cyclic_quotient(r, &[vec![6]]).unwrap();
        let (t, _) = tensor(&a, &b).unwrap();
        assert_eq!(t.size(), 2);
    }

    #[test]
    fn module_validation_rejects_nonlinear_action() {
        let r = z(2);
        assert!(Module::new(r, vec![2], vec![Mat::from_rows(&[vec![0]])]).is_err());
    }
}
