//! The right adjoint `f^∇` of `f_* C^•` and the duality functor `f^!`.
//!
//! For a chain `c = (x_0 < ⋯ < x_p)` of `X` with `t = f(x_0)` and `x = x_p`,
//! the representing module is `R_c(N) = Hom_Y(K, N)`, where `K` is the
//! co-skyscraper on `Y` at `t` with stalk `O_{X,x}`; `O_{X,x}` acts by
//! precomposition with multiplication. Then
//! `f^{-p} N = ∏_c co_skyscraper(x, R_c(N))`.

use std::collections::HashMap;
use std::sync::Arc;

use super::chains::{face, sign, ChainProduct};
use super::injective::inj_res;
use super::standard::StandardData;
use crate::cxalg::{Bicomplex, Complex, HomComplex};
use crate::error::{Error, Result};
use crate::finring::Module;
use crate::group;
use crate::linalg::Mat;
use crate::sheafmod::{co_skyscraper, RingedMap, Sheaf, SheafHom, SheafMorphism};

/// `R_c(N^q)` for `t = f(x_0)`, `x = x_p`.
#[derive(Clone, Debug)]
struct Rep {
    t: usize,
    k: Arc<Sheaf>,
    hom: SheafHom,
    module: Module,
}

/// Matrix of a linear operation on sheaf-Hom coordinates.
fn hom_map(src: &SheafHom, tgt: &SheafHom, op: impl Fn(Vec<Mat>) -> Vec<Mat>) -> Mat {
    let cols: Vec<Vec<i64>> = (0..src.dim())
        .map(|s| {
            let mut e = vec![0; src.dim()];
            e[s] = 1;
            tgt.from_comps(&op(src.to_comps(&e))).expect("operation leaves Hom")
        })
        .collect();
    Mat::from_cols(tgt.dim(), &cols)
}

/// `f^∇ N` for a bounded complex `N` on `Y`, with the data behind it.
#[derive(Clone, Debug)]
pub struct Nabla {
    pub complex: Arc<Complex>,
    pub(crate) dim: usize,
    lo: i64,
    /// `prods[q - lo][p]`: `f^{-p} N^q` as a product over chains
    prods: Vec<Vec<ChainProduct>>,
    /// `(t, x, q) -> R_c(N^q)`
    reps: HashMap<(usize, usize, i64), Rep>,
    bicomplex: Option<Bicomplex>,
}

impl Nabla {
    fn prod(&self, p: usize, q: i64) -> &ChainProduct {
        &self.prods[(q - self.lo) as usize][p]
    }

    fn rep(&self, t: usize, x: usize, q: i64) -> &Rep {
        &self.reps[&(t, x, q)]
    }

    /// Parts `(p, q)` of the total term in degree `m`, in summand order.
    fn parts(&self, m: i64) -> Vec<(usize, i64)> {
        let hi = self.lo + self.prods.len() as i64 - 1;
        (0..=self.dim).rev().map(|p| (p, m + p as i64)).filter(|&(_, q)| q >= self.lo && q <= hi).collect()
    }
}

/// `f^∇ N`: the bicomplex `(p, q) ↦ f^{-p} N^q` in total degree `q - p`, with
/// `D = D_N + (-1)^{q-p+1} Δ` on `f^{-p} N^q`.
pub fn f_nabla(f: &RingedMap, n: &Arc<Complex>) -> Result<Nabla> {
    if n.space() != &f.target {
        return Err(Error::SpaceMismatch);
    }
    let (x, y) = (f.source.clone(), f.target.clone());
    let dim = x.poset().dimension()?;
    if n.is_empty() {
        let complex = Arc::new(Complex::zero(x));
        return Ok(Nabla { complex, dim, lo: 0, prods: Vec::new(), reps: HashMap::new(), bicomplex: None });
    }
    let (lo, hi) = (n.lo(), n.hi());
    let mut reps = HashMap::new();
    for q in lo..=hi {
        for xp in x.poset().points() {
            for t in y.poset().points().filter(|&t| y.poset().leq(t, f.apply(xp))) {
                // some chain ending at xp has f(x_0) = t?
                let starts = x.poset().points().any(|x0| x.poset().leq(x0, xp) && f.apply(x0) == t);
                if starts {
                    reps.insert((t, xp, q), make_rep(f, n.term(q), t, xp)?);
                }
            }
        }
    }
    let mut prods = Vec::new();
    for q in lo..=hi {
        let mut row = Vec::new();
        for p in 0..=dim {
            let chains = x.poset().chains(p, &x.poset().whole());
            let mods: Vec<Module> =
                chains.iter().map(|c| reps[&(f.apply(c[0]), *c.last().unwrap(), q)].module.clone()).collect();
            let lasts: Vec<usize> = chains.iter().map(|c| *c.last().unwrap()).collect();
            row.push(ChainProduct::new(&x, chains, &mods, |z, c| x.poset().leq(z, lasts[c]), |z, c| x.res(z, lasts[c]).clone()));
        }
        prods.push(row);
    }
    let mut nabla = Nabla { complex: Arc::new(Complex::zero(x.clone())), dim, lo, prods, reps, bicomplex: None };
    let bic = Bicomplex::build(
        x.clone(),
        (-(dim as i64), 0),
        (lo, hi),
        |pp, q| nabla.prod((-pp) as usize, q).sheaf.clone(),
        |pp, q, _, _| {
            let p = (-pp) as usize;
            let (s, t) = (nabla.prod(p, q), nabla.prod(p - 1, q));
            let g = delta(f, &nabla, p - 1, q);
            s.morphism(t, &g.scale(sign((q - p as i64 + 1).rem_euclid(2) as usize)).reduced_rows(&t.global_orders))
        },
        |pp, q, _, _| {
            let p = (-pp) as usize;
            let (s, t) = (nabla.prod(p, q), nabla.prod(p, q + 1));
            let g = vertical(f, &nabla, p, q, &n.diff(q));
            s.morphism(t, &g.scale(sign(p)).reduced_rows(&t.global_orders))
        },
    );
    nabla.complex = Arc::new(bic.total());
    nabla.bicomplex = Some(bic);
    Ok(nabla)
}

fn make_rep(f: &RingedMap, nq: &Arc<Sheaf>, t: usize, x: usize) -> Result<Rep> {
    let y = &f.target;
    let psi = y.res(t, f.apply(x)).then(&f.comparison[x])?;
    let ox = Module::regular(f.source.ring(x).clone());
    let k = Arc::new(co_skyscraper(y, t, &ox.restrict(&psi)?)?);
    let hom = SheafHom::new(&k, nq)?;
    let ring = f.source.ring(x).clone();
    let action = (0..ring.rank())
        .map(|j| {
            let a = ox.act(&ring.basis(j));
            hom_map(&hom, &hom, |comps| {
                comps
                    .into_iter()
                    .enumerate()
                    .map(|(w, phi)| if y.poset().leq(w, t) { phi.mul(&a) } else { phi })
                    .collect()
            })
        })
        .collect();
    let module = Module::new(ring, hom.orders.clone(), action)?;
    Ok(Rep { t, k, hom, module })
}

/// Global matrix of `Δ : f^{-p-1} N^q -> f^{-p} N^q`, dual to `f_* d`.
fn delta(f: &RingedMap, nb: &Nabla, p: usize, q: i64) -> Mat {
    let (src, tgt) = (nb.prod(p + 1, q), nb.prod(p, q));
    let index: HashMap<&[usize], usize> = tgt.chains.iter().enumerate().map(|(k, c)| (c.as_slice(), k)).collect();
    let ypos = f.target.poset();
    let mut d = Mat::zeros(tgt.global_orders.len(), src.global_orders.len());
    for (s, c) in src.chains.iter().enumerate() {
        let last = c.len() - 1;
        let rs = nb.rep(f.apply(c[0]), c[last], q);
        for k in 0..=last {
            let fc = face(c, k);
            let tt = index[fc.as_slice()];
            let rt = nb.rep(f.apply(fc[0]), *fc.last().unwrap(), q);
            let block = if k == 0 {
                // precompose with K_{t(c_face)} -> K_{t(c)}
                hom_map(&rs.hom, &rt.hom, |comps| {
                    comps
                        .into_iter()
                        .enumerate()
                        .map(|(w, phi)| {
                            if ypos.leq(w, rs.t) {
                                phi
                            } else {
                                Mat::zeros(phi.rows(), rt.k.stalk(w).dim())
                            }
                        })
                        .collect()
                })
            } else if k < last {
                Mat::identity(rs.hom.dim())
            } else {
                // precompose with the restriction O_{x_{p}} -> O_{x_{p+1}}
                let r = f.source.res(c[last - 1], c[last]).matrix();
                hom_map(&rs.hom, &rt.hom, |comps| {
                    comps
                        .into_iter()
                        .enumerate()
                        .map(|(w, phi)| if ypos.leq(w, rs.t) { phi.mul(&r) } else { Mat::zeros(phi.rows(), 0) })
                        .collect()
                })
            };
            d.add_block(tgt.offsets[tt], src.offsets[s], &block, sign(k));
        }
    }
    d.reduced_rows(&tgt.global_orders)
}

/// Global matrix of `f^{-p}(d) : f^{-p} N^q -> f^{-p} N^{q+1}`.
fn vertical(f: &RingedMap, nb: &Nabla, p: usize, q: i64, d: &SheafMorphism) -> Mat {
    let (src, tgt) = (nb.prod(p, q), nb.prod(p, q + 1));
    let blocks: Vec<Mat> = src
        .chains
        .iter()
        .map(|c| {
            let (t, x) = (f.apply(c[0]), *c.last().unwrap());
            let (a, b) = (nb.rep(t, x, q), nb.rep(t, x, q + 1));
            hom_map(&a.hom, &b.hom, |comps| comps.iter().enumerate().map(|(w, phi)| d.comps[w].mul(phi)).collect())
        })
        .collect();
    Mat::block_diag(&blocks.iter().collect::<Vec<_>>()).reduced_rows(&tgt.global_orders)
}

/// `f^! N = f^∇ I` for a truncated injective resolution `N -> I`.
#[derive(Clone, Debug)]
pub struct Shriek {
    pub nabla: Nabla,
    pub resolution: super::Resolution,
    /// Degrees in which `f^! N` is certified.
    pub window: (i64, i64),
}

/// `f^! N`, reliable in degrees `[lo(N) - n, depth - n - 1]`, `n = dim X`.
pub fn f_shriek(f: &RingedMap, n: &Arc<Complex>, depth: i64) -> Result<Shriek> {
    let resolution = inj_res(n, depth)?;
    let nabla = f_nabla(f, &resolution.complex)?;
    let d = nabla.dim as i64;
    let bottom = if n.is_empty() { 0 } else { n.lo() };
    Ok(Shriek { nabla, resolution, window: (bottom - d, depth - d - 1) })
}

/// The isomorphism `Hom^k(f_* C^• M, N) -> Hom^k(M, f^∇ N)` on coordinates,
/// `h ↦ (-1)^{p i} (m ↦ (a ↦ h(a m)))` on the summand `f_* C^p M^i`.
fn transport(f: &RingedMap, std: &StandardData, nb: &Nabla, lhs: &HomComplex, rhs: &HomComplex, k: i64) -> Mat {
    let (x, y) = (&f.source, &f.target);
    let m = &rhs.source;
    let src_dim = lhs.groups.orders_at(k).len();
    let tgt_dim = rhs.groups.orders_at(k).len();
    let mut cols = Vec::with_capacity(src_dim);
    for e in 0..src_dim {
        let mut coords = vec![0; src_dim];
        coords[e] = 1;
        let mut out: HashMap<i64, Vec<Mat>> = HashMap::new();
        for (deg, g) in lhs.to_maps(k, &coords) {
            let q = deg + k;
            // summand offsets of f_* C^p M^i inside A^deg, per stalk of Y
            let parts = std.parts(deg);
            let mut base = vec![0usize; y.len()];
            for (p, _) in parts {
                let i = deg - p;
                let cp = std.cp(p, i);
                let fi = nb.complex.term(i + k);
                let f_parts = nb.parts(i + k);
                let pos = f_parts.iter().position(|&(pp, _)| pp as i64 == p).expect("matching summand");
                let comps = out.entry(i).or_insert_with(|| {
                    x.poset().points().map(|z| Mat::zeros(fi.stalk(z).dim(), m.term(i).stalk(z).dim())).collect()
                });
                let prod = nb.prod(p as usize, q);
                let mi = m.term(i);
                let sgn = sign((p * i).rem_euclid(2) as usize);
                for (c, chain) in cp.chains.iter().enumerate() {
                    let (t, xl) = (f.apply(chain[0]), *chain.last().unwrap());
                    let rep = nb.rep(t, xl, q);
                    let mx = mi.stalk(xl);
                    let ring = x.ring(xl);
                    // h^c : M_x -> R_c, column by column
                    let hcols: Vec<Vec<i64>> = (0..mx.dim())
                        .map(|s| {
                            let hc: Vec<Mat> = y
                                .poset()
                                .points()
                                .map(|w| match cp.local[w][c] {
                                    Some(off) => {
                                        let gw = g.comps[w].select_cols(
                                            &(base[w] + off..base[w] + off + cp.block_dim(c)).collect::<Vec<_>>(),
                                        );
                                        let vcols: Vec<Vec<i64>> = (0..ring.rank())
                                            .map(|j| gw.apply(&mx.act(&ring.basis(j)).column(s)))
                                            .collect();
                                        Mat::from_cols(gw.rows(), &vcols)
                                    }
                                    None => Mat::zeros(g.comps[w].rows(), 0),
                                })
                                .collect();
                            let hc: Vec<Mat> =
                                hc.into_iter().enumerate().map(|(w, h)| h.reduced_rows(g.target.stalk(w).orders())).collect();
                            rep.hom.from_comps(&hc).expect("transported map is a morphism")
                        })
                        .collect();
                    let h = Mat::from_cols(rep.hom.dim(), &hcols);
                    for z in x.poset().points() {
                        if let Some(off) = prod.local[z][c] {
                            let before: usize = f_parts[..pos]
                                .iter()
                                .map(|&(pp, qq)| nb.prod(pp, qq).sheaf.stalk(z).dim())
                                .sum();
                            let blk = h.mul(mi.res(z, xl)).scale(sgn);
                            comps[z].add_block(before + off, 0, &blk, 1);
                        }
                    }
                }
                for w in y.poset().points() {
                    base[w] += cp.sheaf.stalk(w).dim();
                }
            }
        }
        let out: HashMap<i64, Vec<Mat>> = out
            .into_iter()
            .map(|(i, comps)| {
                let fi = nb.complex.term(i + k);
                (i, comps.into_iter().enumerate().map(|(z, c)| c.reduced_rows(fi.stalk(z).orders())).collect())
            })
            .collect();
        let c = rhs.from_maps(k, &|i| out.get(&i).cloned()).expect("transported cochain is a morphism");
        cols.push(c);
    }
    Mat::from_cols(tgt_dim, &cols)
}

/// Per-degree comparison of `Hom_{D(Y)}(Rf_* M, N[i])` and `Hom_{D(X)}(M, f^! N[i])`.
#[derive(Clone, Debug)]
pub struct DualityReport {
    pub depth: i64,
    /// `(i, invariant factors on the Y side, on the X side)`
    pub degrees: Vec<(i64, Vec<u64>, Vec<u64>)>,
    /// The transported map is an isomorphism of cochain complexes in the window.
    pub chain_iso: bool,
    /// It induces isomorphisms on cohomology in the window.
    pub cohomology_iso: bool,
    pub pass: bool,
}

/// Checks `Hom(Rf_* M, N[i]) ≅ Hom(M, f^! N[i])` for `lo ≤ i ≤ hi` by transporting
/// cochains through `Hom^•(f_* C^• M, I) = Hom^•(M, f^∇ I)`.
pub fn duality_check(
    f: &RingedMap,
    m: &Arc<Complex>,
    n: &Arc<Complex>,
    window: (i64, i64),
    depth: Option<i64>,
) -> Result<DualityReport> {
    let (lo, hi) = window;
    let std = StandardData::new(f, m)?;
    let top = if std.total.is_empty() { 0 } else { std.total.hi() };
    let need = (hi + top + 1).max(super::injective::min_depth(n)?);
    let depth = depth.unwrap_or(need);
    if hi > depth - top - 1 {
        return Err(Error::WindowUnreliable { lo, hi, rlo: i64::MIN, rhi: depth - top - 1 });
    }
    let res = inj_res(n, depth)?;
    let nb = f_nabla(f, &res.complex)?;
    let lhs = HomComplex::new(&std.total, &res.complex)?;
    let rhs = HomComplex::new(m, &nb.complex)?;
    let phis: HashMap<i64, Mat> = (lo - 1..=hi + 1).map(|k| (k, transport(f, &std, &nb, &lhs, &rhs, k))).collect();
    let mut chain_iso = true;
    for k in lo - 1..=hi + 1 {
        let (a, b) = (lhs.groups.orders_at(k), rhs.groups.orders_at(k));
        let phi = &phis[&k];
        chain_iso &= group::is_injective(phi, a, b) && group::is_surjective(phi, b);
        if k <= hi {
            let b1 = rhs.groups.orders_at(k + 1);
            let left = phis[&(k + 1)].mul(&lhs.groups.diff(k)).reduced_rows(b1);
            let right = rhs.groups.diff(k).mul(phi).reduced_rows(b1);
            chain_iso &= left == right;
        }
    }
    let mut cohomology_iso = true;
    let mut degrees = Vec::new();
    for k in lo..=hi {
        let (ha, hb) = (lhs.groups.cohomology(k), rhs.groups.cohomology(k));
        let ind = ha.induced(&phis[&k], &hb);
        cohomology_iso &= group::is_injective(&ind, &ha.orders, &hb.orders) && group::is_surjective(&ind, &hb.orders);
        degrees.push((k, group::invariant_factors(&ha.orders), group::invariant_factors(&hb.orders)));
    }
    let pass = chain_iso && cohomology_iso && degrees.iter().all(|(_, a, b)| a == b);
    Ok(DualityReport { depth, degrees, chain_iso, cohomology_iso, pass })
}
