use std::collections::HashMap;
use std::sync::Arc;

use crate::cxalg::{Bicomplex, Complex, ComplexMorphism};
use crate::error::Result;
use crate::finring::{direct_sum_over, Module, RingHom};
use crate::linalg::Mat;
use crate::poset::ChainIndex;
use crate::sheafmod::{RingedMap, Sections, Sheaf, SheafMorphism};

use super::chains::{face, sign};
use super::place_in_column_zero;
use super::standard::StandardData;
use super::{Resolution, ResolutionKind};

/// Sheaf on the target whose stalk at `y` is `⊕_c blocks[y][c]` with
/// block-diagonal restrictions.
pub(crate) fn block_sheaf(
    f: &RingedMap,
    blocks: Vec<Vec<Module>>,
    mut res: impl FnMut(usize, usize, usize) -> Mat,
) -> (Arc<Sheaf>, Vec<Vec<usize>>) {
    let y = &f.target;
    let offsets: Vec<Vec<usize>> = blocks
        .iter()
        .map(|bs| {
            let mut o = vec![0];
            for b in bs {
                o.push(o.last().unwrap() + b.dim());
            }
            o
        })
        .collect();
    let stalks: Vec<Module> =
        y.poset().points().map(|b| direct_sum_over(y.ring(b), &blocks[b].iter().collect::<Vec<_>>())).collect();
    let nblocks = blocks.first().map_or(0, |b| b.len());
    let sheaf = Sheaf::from_fn(y.clone(), stalks, |a, b| {
        let mut m = Mat::zeros(*offsets[b].last().unwrap(), *offsets[a].last().unwrap());
        for c in 0..nblocks {
            m.set_block(offsets[b][c], offsets[a][c], &res(a, b, c));
        }
        m
    });
    (Arc::new(sheaf), offsets)
}

/// One term `∏_c f_* (S_{x_p})|_{U_{x_p}}` with its block layout.
#[derive(Clone, Debug)]
pub(crate) struct SectionTerm {
    pub sheaf: Arc<Sheaf>,
    pub chains: Vec<ChainIndex>,
    pub offsets: Vec<Vec<usize>>,
}

/// Double complex whose `(p, q)` term at `y` is the product over chains
/// `x_0 < ⋯ < x_p` of `S^q_{x_p}(U_{x_p} ∩ f^{-1} U_y)`. With `S^q_x = M^q`
/// this is `f_* Č^• M`; with `S^q_x` the tilde of `N^q_x` it is `Qc(C^• N)`.
#[derive(Clone, Debug)]
pub(crate) struct SectionComplex {
    pub bicomplex: Option<Bicomplex>,
    pub terms: Vec<Vec<SectionTerm>>,
    /// `secs[q - lo][x][y]`
    pub secs: Vec<Vec<Vec<Sections>>>,
    pub total: Arc<Complex>,
    pub lo: i64,
    pub dim: usize,
}

/// Sections of `sheaf_at(x)` over `U_x ∩ f^{-1} U_y`, indexed `[x][y]`.
fn section_table(f: &RingedMap, sheaf_at: impl Fn(usize) -> Arc<Sheaf>) -> Vec<Vec<Sections>> {
    let (xs, ys) = (f.source.poset(), f.target.poset());
    xs.points()
        .map(|x| {
            let ux = xs.up_set(x);
            let s = sheaf_at(x);
            ys.points()
                .map(|y| {
                    let pre = f.map.preimage(&ys.up_set(y));
                    let v: Vec<usize> = ux.iter().copied().filter(|p| pre.contains(p)).collect();
                    Sections::new(&s, &v)
                })
                .collect()
        })
        .collect()
}

impl SectionComplex {
    /// `sheaf_at(q, x)` is `S^q_x` as a sheaf on the source (only `U_x` matters);
    /// `last_face(q, x, x', src, tgt)` maps `S^q_x(V) -> S^q_{x'}(V')` for `x < x'`;
    /// `vertical(q, x, src, tgt)` maps `S^q_x(V) -> S^{q+1}_x(V)`.
    pub fn build(
        f: &RingedMap,
        range: Option<(i64, i64)>,
        dim: usize,
        within: &[usize],
        sheaf_at: impl Fn(i64, usize) -> Arc<Sheaf>,
        last_face: impl Fn(i64, usize, usize, &Sections, &Sections) -> Mat,
        vertical: impl Fn(i64, usize, &Sections, &Sections) -> Mat,
    ) -> Self {
        let y = f.target.clone();
        let Some((lo, hi)) = range else {
            let total = Arc::new(Complex::zero(y));
            return SectionComplex { bicomplex: None, terms: Vec::new(), secs: Vec::new(), total, lo: 0, dim };
        };
        let xs = f.source.poset().clone();
        let sheaves: Vec<Vec<Arc<Sheaf>>> = (lo..=hi).map(|q| xs.points().map(|x| sheaf_at(q, x)).collect()).collect();
        let secs: Vec<Vec<Vec<Sections>>> =
            (lo..=hi).map(|q| section_table(f, |x| sheaves[(q - lo) as usize][x].clone())).collect();
        let ring_maps = |b: usize, s: &Sections| -> Vec<RingHom> {
            s.points
                .iter()
                .map(|&v| y.res(b, f.apply(v)).then(&f.comparison[v]).expect("composable ring maps"))
                .collect()
        };
        let mut terms = Vec::new();
        for q in lo..=hi {
            let k = (q - lo) as usize;
            let mut row = Vec::new();
            for p in 0..=dim {
                let chains = xs.chains(p, within);
                let blocks: Vec<Vec<Module>> = y
                    .poset()
                    .points()
                    .map(|b| {
                        chains
                            .iter()
                            .map(|c| {
                                let x = *c.last().unwrap();
                                let s = &secs[k][x][b];
                                s.module_over(&sheaves[k][x], y.ring(b), &ring_maps(b, s))
                            })
                            .collect()
                    })
                    .collect();
                let t = &secs[k];
                let (sheaf, offsets) = block_sheaf(f, blocks, |a, b, c| {
                    let x = *chains[c].last().unwrap();
                    t[x][a].restriction_to(&t[x][b])
                });
                row.push(SectionTerm { sheaf, chains, offsets });
            }
            terms.push(row);
        }
        let at = |p: i64, q: i64| &terms[(q - lo) as usize][p as usize];
        let bic = Bicomplex::build(
            y.clone(),
            (0, dim as i64),
            (lo, hi),
            |p, q| at(p, q).sheaf.clone(),
            |p, q, _, _| {
                let s = &secs[(q - lo) as usize];
                section_diff(at(p, q), at(p + 1, q), s, |x, x2, yb| last_face(q, x, x2, &s[x][yb], &s[x2][yb]))
            },
            |p, q, _, _| {
                let (s, t) = (at(p, q), at(p, q + 1));
                let (a, b) = (&secs[(q - lo) as usize], &secs[(q + 1 - lo) as usize]);
                let comps = y
                    .poset()
                    .points()
                    .map(|yb| {
                        let mut mat = Mat::zeros(t.sheaf.stalk(yb).dim(), s.sheaf.stalk(yb).dim());
                        for (c, chain) in s.chains.iter().enumerate() {
                            let x = *chain.last().unwrap();
                            mat.set_block(t.offsets[yb][c], s.offsets[yb][c], &vertical(q, x, &a[x][yb], &b[x][yb]));
                        }
                        mat
                    })
                    .collect();
                SheafMorphism::from_parts(s.sheaf.clone(), t.sheaf.clone(), comps)
            },
        );
        let total = Arc::new(bic.total());
        SectionComplex { bicomplex: Some(bic), terms, secs, total, lo, dim }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn term(&self, p: i64, q: i64) -> &SectionTerm {
        &self.terms[(q - self.lo) as usize][p as usize]
    }

    /// Parts of the total term in degree `n`, ordered by `p`.
    pub fn parts(&self, n: i64) -> Vec<Arc<Sheaf>> {
        (0..=self.dim as i64)
            .filter(|&p| n - p >= self.lo && n - p <= self.hi())
            .map(|p| self.term(p, n - p).sheaf.clone())
            .collect()
    }

    /// Map to `f_* C^• M` evaluating a section over `U_{x_p}` at `x_p`,
    /// followed by `at_last(q, x) : S^q_x|_x -> M^q_x`.
    pub fn to_standard(&self, std: &StandardData, at_last: impl Fn(i64, usize) -> Mat) -> ComplexMorphism {
        let (Some(a), Some(b)) = (&self.bicomplex, &std.bicomplex) else {
            return ComplexMorphism::zero(&self.total, &std.total);
        };
        a.total_morphism(b, &self.total, &std.total, |p, q| {
            let s = self.term(p, q);
            let t = std.cp(p, q);
            let secs = &self.secs[(q - self.lo) as usize];
            let comps = (0..s.offsets.len())
                .map(|yb| {
                    let mut mat = Mat::zeros(t.sheaf.stalk(yb).dim(), s.sheaf.stalk(yb).dim());
                    for (c, chain) in s.chains.iter().enumerate() {
                        if let Some(off) = t.local[yb][c] {
                            let x = *chain.last().unwrap();
                            mat.set_block(off, s.offsets[yb][c], &at_last(q, x).mul(&secs[x][yb].projection(x)));
                        }
                    }
                    mat
                })
                .collect();
            SheafMorphism::from_parts(s.sheaf.clone(), t.sheaf.clone(), comps)
        })
    }

    /// Blockwise morphism to another section complex over the same chains,
    /// given `block(q, x, src, tgt)`.
    pub fn morphism_to(
        &self,
        other: &SectionComplex,
        block: impl Fn(i64, usize, &Sections, &Sections) -> Mat,
    ) -> ComplexMorphism {
        let (Some(a), Some(b)) = (&self.bicomplex, &other.bicomplex) else {
            return ComplexMorphism::zero(&self.total, &other.total);
        };
        a.total_morphism(b, &self.total, &other.total, |p, q| {
            let (s, t) = (self.term(p, q), other.term(p, q));
            let (sa, sb) = (&self.secs[(q - self.lo) as usize], &other.secs[(q - other.lo) as usize]);
            let comps = (0..s.offsets.len())
                .map(|yb| {
                    let mut mat = Mat::zeros(t.sheaf.stalk(yb).dim(), s.sheaf.stalk(yb).dim());
                    for (c, chain) in s.chains.iter().enumerate() {
                        let x = *chain.last().unwrap();
                        mat.set_block(t.offsets[yb][c], s.offsets[yb][c], &block(q, x, &sa[x][yb], &sb[x][yb]));
                    }
                    mat
                })
                .collect();
            SheafMorphism::from_parts(s.sheaf.clone(), t.sheaf.clone(), comps)
        })
    }
}

impl SectionComplex {
    /// Projection onto a complex built from the same data over fewer chains
    /// (a face-closed subset, so this is a chain map).
    pub fn projection_to(&self, other: &SectionComplex) -> ComplexMorphism {
        let (Some(a), Some(b)) = (&self.bicomplex, &other.bicomplex) else {
            return ComplexMorphism::zero(&self.total, &other.total);
        };
        a.total_morphism(b, &self.total, &other.total, |p, q| {
            let (s, t) = (self.term(p, q), other.term(p, q));
            let index: HashMap<&[usize], usize> = s.chains.iter().enumerate().map(|(k, c)| (c.as_slice(), k)).collect();
            let comps = (0..s.offsets.len())
                .map(|yb| {
                    let mut mat = Mat::zeros(t.sheaf.stalk(yb).dim(), s.sheaf.stalk(yb).dim());
                    for (c, chain) in t.chains.iter().enumerate() {
                        let from = index[chain.as_slice()];
                        let d = t.offsets[yb][c + 1] - t.offsets[yb][c];
                        mat.set_block(t.offsets[yb][c], s.offsets[yb][from], &Mat::identity(d));
                    }
                    mat
                })
                .collect();
            SheafMorphism::from_parts(s.sheaf.clone(), t.sheaf.clone(), comps)
        })
    }
}

fn section_diff(
    src: &SectionTerm,
    tgt: &SectionTerm,
    secs: &[Vec<Sections>],
    last_face: impl Fn(usize, usize, usize) -> Mat,
) -> SheafMorphism {
    let index: HashMap<&[usize], usize> = src.chains.iter().enumerate().map(|(k, c)| (c.as_slice(), k)).collect();
    let comps = (0..src.offsets.len())
        .map(|yb| {
            let mut mat = Mat::zeros(tgt.sheaf.stalk(yb).dim(), src.sheaf.stalk(yb).dim());
            for (t, c) in tgt.chains.iter().enumerate() {
                let last = c.len() - 1;
                for k in 0..=last {
                    let s = index[face(c, k).as_slice()];
                    let block = if k < last {
                        Mat::identity(secs[c[last]][yb].dim())
                    } else {
                        last_face(c[last - 1], c[last], yb)
                    };
                    mat.add_block(tgt.offsets[yb][t], src.offsets[yb][s], &block, sign(k));
                }
            }
            mat.reduced_rows(tgt.sheaf.stalk(yb).orders())
        })
        .collect();
    SheafMorphism::from_parts(src.sheaf.clone(), tgt.sheaf.clone(), comps)
}

fn range(m: &Complex) -> Option<(i64, i64)> {
    (!m.is_empty()).then(|| (m.lo(), m.hi()))
}

/// `f_* Č^• M`.
pub(crate) fn cech_data(f: &RingedMap, m: &Complex) -> Result<SectionComplex> {
    let dim = f.source.poset().dimension()?;
    Ok(SectionComplex::build(
        f,
        range(m),
        dim,
        &f.source.poset().whole(),
        |q, _| m.term(q).clone(),
        |_, _, _, s, t| s.restriction_to(t),
        |q, _, s, t| s.map_to(t, &m.diff(q)),
    ))
}

/// Pseudo-Čech resolution `M -> Č^• M`.
pub fn pseudo_cech(m: &Arc<Complex>) -> Result<Resolution> {
    let id = RingedMap::identity(m.space().clone());
    let data = cech_data(&id, m)?;
    if m.is_empty() {
        let augmentation = ComplexMorphism::zero(m, &data.total);
        return Ok(Resolution { kind: ResolutionKind::PseudoCech, complex: data.total, augmentation });
    }
    let lo = m.lo();
    let comps: Vec<SheafMorphism> = (lo..=m.hi())
        .map(|n| {
            let t = data.term(0, n);
            let secs = &data.secs[(n - lo) as usize];
            let src = m.term(n);
            let comps = (0..t.offsets.len())
                .map(|x| {
                    let mut mat = Mat::zeros(t.sheaf.stalk(x).dim(), src.stalk(x).dim());
                    for (c, chain) in t.chains.iter().enumerate() {
                        mat.set_block(t.offsets[x][c], 0, &secs[chain[0]][x].from_stalk(src, x));
                    }
                    mat
                })
                .collect();
            SheafMorphism::from_parts(src.clone(), t.sheaf.clone(), comps)
        })
        .collect();
    let augmentation = place_in_column_zero(m, &data.total, |n| data.parts(n), |n| comps[(n - lo) as usize].clone());
    Ok(Resolution { kind: ResolutionKind::PseudoCech, complex: data.total.clone(), augmentation })
}

/// `f_* Č^• M`, the pseudo-Čech model of `R_qc f_*`.
pub fn push_cech(f: &RingedMap, m: &Complex) -> Result<Complex> {
    Ok((*cech_data(f, m)?.total).clone())
}
