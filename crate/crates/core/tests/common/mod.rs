//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::sync::Arc;

use finsheaf::cxalg::Complex;
use finsheaf::finring::{HomSpace, DEFAULT_RING_CAP};
use finsheaf::group;
use finsheaf::sheafmod::{Sections, SheafHom};
use finsheaf::{Mat, Poset, Sheaf, SheafMorphism};

/// Strict chains `x_0 < … < x_i` in lexicographic order, by brute force.
pub fn strict_chains(p: &Poset, i: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = p.points().map(|x| vec![x]).collect();
    for _ in 0..i {
        out = out
            .into_iter()
            .flat_map(|c| {
                let last = *c.last().unwrap();
                p.points().filter(move |&y| p.lt(last, y)).map(move |y| {
                    let mut d = c.clone();
                    d.push(y);
                    d
                })
            })
            .collect();
    }
    out.sort();
    out
}

/// All nonempty open (upward closed) subsets.
pub fn opens(p: &Poset) -> Vec<Vec<usize>> {
    let n = p.len();
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&k| mask >> k & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.iter().all(|&x| p.points().all(|y| !p.leq(x, y) || s.contains(&y))))
        .collect()
}

fn size(orders: &[u64]) -> u128 {
    orders.iter().map(|&o| o as u128).product()
}

/// `C^i M` is flasque: `Γ(V)` has the expected size `∏_{chains in V} |M_{x_i}|`
/// and every restriction `Γ(V) -> Γ(W)` is onto.
pub fn standard_term_is_flasque(c: &Sheaf, m: &Sheaf, i: usize) -> bool {
    let p = m.space().poset();
    let os = opens(p);
    let secs: Vec<Sections> = os.iter().map(|v| Sections::new(c, v)).collect();
    for (v, s) in os.iter().zip(&secs) {
        let expect: u128 = strict_chains(p, i)
            .iter()
            .filter(|ch| v.contains(&ch[0]))
            .map(|ch| m.stalk(*ch.last().unwrap()).size())
            .product();
        if s.size() != expect {
            return false;
        }
    }
    for (v, sv) in os.iter().zip(&secs) {
        for (w, sw) in os.iter().zip(&secs) {
            if w.iter().all(|x| v.contains(x)) && !group::is_surjective(&sv.restriction_to(sw), &sw.orders) {
                return false;
            }
        }
    }
    true
}

/// Builds the map `∏_c Hom_{O_{x_i}}(N_{x_i}, M_{x_i}) -> Hom(N, C^i M)`,
/// `h ↦ (p ↦ (h_c ∘ r_{p, x_i})_{x_0 ≥ p})`, and returns `(|source|, |target|, injective)`.
pub fn standard_hom_map(n: &Sheaf, m: &Sheaf, c: &Arc<Sheaf>, i: usize) -> (u128, u128, bool) {
    let p = n.space().poset();
    let chains = strict_chains(p, i);
    let target = SheafHom::new(n, c).unwrap();
    let mut cols: Vec<Vec<i64>> = Vec::new();
    let mut src_orders = Vec::new();
    for (k, ch) in chains.iter().enumerate() {
        let last = *ch.last().unwrap();
        let hs = HomSpace::new(n.stalk(last), m.stalk(last)).unwrap();
        for s in 0..hs.dim() {
            let mut e = vec![0; hs.dim()];
            e[s] = 1;
            let h = hs.to_matrix(&e);
            let comps: Vec<Mat> = p
                .points()
                .map(|q| {
                    let mut mat = Mat::zeros(c.stalk(q).dim(), n.stalk(q).dim());
                    let mut off = 0;
                    for (j, other) in chains.iter().enumerate() {
                        if !p.leq(q, other[0]) {
                            continue;
                        }
                        let d = m.stalk(*other.last().unwrap()).dim();
                        if j == k {
                            mat.set_block(off, 0, &h.mul(n.res(q, last)));
                        }
                        off += d;
                    }
                    mat
                })
                .collect();
            match target.from_comps(&comps) {
                Some(v) => cols.push(v),
                None => return (0, target.size(), false),
            }
            src_orders.push(hs.module.orders()[s]);
        }
    }
    let mat = Mat::from_cols(target.dim(), &cols);
    (size(&src_orders), target.size(), group::is_injective(&mat, &src_orders, &target.orders))
}

/// `∏_{chains} |Hom(N|_{U_{x_i}}, M|_{U_{x_i}})|`, the size of `Γ(X, C^i Hom(N, M))`.
pub fn local_hom_product(n: &Sheaf, m: &Sheaf, i: usize) -> u128 {
    let p = n.space().poset();
    strict_chains(p, i)
        .iter()
        .map(|ch| {
            let u = p.up_set(*ch.last().unwrap());
            let (a, b) = (n.restrict_open(&u).unwrap(), m.restrict_open(&u).unwrap());
            SheafHom::new(&a, &b).unwrap().size()
        })
        .product()
}

/// Whether `Hom(B, I) -> Hom(A, I)` is onto for the inclusion `ι : A -> B`.
pub fn extends_along(incl: &SheafMorphism, i: &Arc<Sheaf>) -> bool {
    let hb = SheafHom::new(&incl.target, i).unwrap();
    let ha = SheafHom::new(&incl.source, i).unwrap();
    let mut cols = Vec::new();
    for s in 0..hb.dim() {
        let mut e = vec![0; hb.dim()];
        e[s] = 1;
        let comps: Vec<Mat> = hb.to_comps(&e).iter().zip(&incl.comps).map(|(f, j)| f.mul(j)).collect();
        cols.push(ha.from_comps(&comps).expect("composite is a morphism"));
    }
    let mat = Mat::from_cols(ha.dim(), &cols);
    group::is_surjective(&mat, &ha.orders)
}

/// Whether all terms of a complex have flat stalks.
pub fn flat_terms(c: &Complex) -> bool {
    c.terms().iter().all(|t| t.has_flat_stalks(DEFAULT_RING_CAP).unwrap())
}

/// Rank over `F_2` by elimination on bit rows.
pub fn f2_rank(mut rows: Vec<Vec<u8>>) -> usize {
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] & 1 == 1) else { continue };
        rows.swap(rank, piv);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] & 1 == 1 {
                let pivot = rows[rank].clone();
                for (a, b) in rows[r].iter_mut().zip(pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `F_2` Betti numbers of the order complex (simplices = nonempty chains).
pub fn order_complex_betti(p: &Poset) -> Vec<usize> {
    let mut simplices: Vec<Vec<Vec<usize>>> = Vec::new();
    for k in 0..p.len() {
        let s = strict_chains(p, k);
        if s.is_empty() {
            break;
        }
        simplices.push(s);
    }
    // boundary ∂_k : C_k -> C_{k-1}
    let rank_of = |k: usize| -> usize {
        if k == 0 || k >= simplices.len() {
            return 0;
        }
        let rows: Vec<Vec<u8>> = simplices[k]
            .iter()
            .map(|s| {
                simplices[k - 1]
                    .iter()
                    .map(|f| u8::from(f.len() + 1 == s.len() && f.iter().all(|x| s.contains(x))))
                    .collect()
            })
            .collect();
        f2_rank(rows)
    };
    (0..simplices.len()).map(|k| simplices[k].len() - rank_of(k) - rank_of(k + 1)).collect()
}
