use std::collections::HashMap;
use std::sync::Arc;

use crate::cxalg::{GroupCohom, GroupComplex};
use crate::finring::{FiniteRing, Module, RingHom};
use crate::linalg::Mat;
use crate::poset::ChainIndex;
use crate::sheafmod::Sheaf;

use super::chains::{face, sign};

/// `Γ(W, C^• M)` for an open `W`, as a complex of modules over a ring `R`
/// mapping to every `O_w`.
pub(crate) struct LocalComplex {
    chains: Vec<Vec<ChainIndex>>,
    offsets: Vec<Vec<usize>>,
    groups: GroupComplex,
    /// `acts[p][k]`: action of the `k`-th ring generator on degree `p`
    acts: Vec<Vec<Mat>>,
    ring: Arc<FiniteRing>,
}

impl LocalComplex {
    pub fn new(m: &Sheaf, w: &[usize], ring: &Arc<FiniteRing>, maps: impl Fn(usize) -> RingHom) -> Self {
        let poset = m.space().poset();
        let top = poset.height_within(w);
        let chains: Vec<Vec<ChainIndex>> = (0..=top + 1).map(|p| poset.chains(p, w)).collect();
        let mut offsets = Vec::new();
        let mut orders = Vec::new();
        for cs in &chains {
            let mut off = vec![0];
            let mut ord = Vec::new();
            for c in cs {
                ord.extend_from_slice(m.stalk(*c.last().unwrap()).orders());
                off.push(ord.len());
            }
            offsets.push(off);
            orders.push(ord);
        }
        let diffs = (0..top + 1)
            .map(|p| {
                let index: HashMap<&[usize], usize> =
                    chains[p].iter().enumerate().map(|(k, c)| (c.as_slice(), k)).collect();
                let mut d = Mat::zeros(orders[p + 1].len(), orders[p].len());
                for (t, c) in chains[p + 1].iter().enumerate() {
                    let last = c.len() - 1;
                    for k in 0..=last {
                        let s = index[face(c, k).as_slice()];
                        let block =
                            if k < last { m.stalk(c[last]).identity() } else { m.res(c[last - 1], c[last]).clone() };
                        d.add_block(offsets[p + 1][t], offsets[p][s], &block, sign(k));
                    }
                }
                d.reduced_rows(&orders[p + 1])
            })
            .collect();
        let acts = chains
            .iter()
            .map(|cs| {
                (0..ring.rank())
                    .map(|k| {
                        let blocks: Vec<Mat> = cs
                            .iter()
                            .map(|c| {
                                let x = *c.last().unwrap();
                                m.stalk(x).act(&maps(x).images()[k])
                            })
                            .collect();
                        Mat::block_diag(&blocks.iter().collect::<Vec<_>>())
                    })
                    .collect()
            })
            .collect();
        LocalComplex { chains, offsets, groups: GroupComplex::new(0, orders, diffs), acts, ring: ring.clone() }
    }

    fn degree(&self, i: usize) -> Option<usize> {
        (i < self.chains.len()).then_some(i)
    }

    /// `H^i(W, M)` as an `R`-module.
    pub fn cohomology(&self, i: usize) -> (GroupCohom, Module) {
        let h = self.groups.cohomology(i as i64);
        let action = match self.degree(i) {
            Some(p) => self.acts[p].iter().map(|a| h.induced(a, &h)).collect(),
            None => vec![Mat::zeros(0, 0); self.ring.rank()],
        };
        let module = Module::new(self.ring.clone(), h.orders.clone(), action).expect("cohomology is a module");
        (h, module)
    }

    /// Restriction `H^i(W) -> H^i(W')` for `W' ⊆ W`.
    pub fn restriction(&self, other: &LocalComplex, i: usize, src: &GroupCohom, tgt: &GroupCohom) -> Mat {
        let (Some(p), Some(_)) = (self.degree(i), other.degree(i)) else {
            return Mat::zeros(tgt.orders.len(), src.orders.len());
        };
        let index: HashMap<&[usize], usize> =
            self.chains[p].iter().enumerate().map(|(k, c)| (c.as_slice(), k)).collect();
        let rows = self.offsets[p].last().copied().unwrap_or(0);
        let cols_out = other.offsets[p].last().copied().unwrap_or(0);
        let mut proj = Mat::zeros(cols_out, rows);
        for (t, c) in other.chains[p].iter().enumerate() {
            let s = index[c.as_slice()];
            for r in 0..other.offsets[p][t + 1] - other.offsets[p][t] {
                proj.set(other.offsets[p][t] + r, self.offsets[p][s] + r, 1);
            }
        }
        src.induced(&proj, tgt)
    }
}
