use std::sync::Arc;

use crate::finring::{direct_sum_over, Module, RingHom};
use crate::linalg::Mat;
use crate::poset::ChainIndex;
use crate::sheafmod::{RingedSpace, Sheaf, SheafMorphism};

/// Sheaf whose stalk at `y` is the product of the blocks `A_c` present at `y`,
/// with projections as restrictions. Presence must shrink along `≤`.
#[derive(Clone, Debug)]
pub(crate) struct ChainProduct {
    pub sheaf: Arc<Sheaf>,
    pub chains: Vec<ChainIndex>,
    pub global_orders: Vec<u64>,
    pub offsets: Vec<usize>,
    /// per point, the global coordinates making up the stalk
    pub sel: Vec<Vec<usize>>,
    /// per point, for each block, its offset inside the stalk (if present)
    pub local: Vec<Vec<Option<usize>>>,
}

impl ChainProduct {
    pub fn new(
        space: &Arc<RingedSpace>,
        chains: Vec<ChainIndex>,
        mods: &[Module],
        present: impl Fn(usize, usize) -> bool,
        ring_map: impl Fn(usize, usize) -> RingHom,
    ) -> Self {
        let mut offsets = vec![0];
        let mut global_orders = Vec::new();
        for m in mods {
            global_orders.extend_from_slice(m.orders());
            offsets.push(global_orders.len());
        }
        let poset = space.poset().clone();
        let mut sel = Vec::with_capacity(poset.len());
        let mut local = Vec::with_capacity(poset.len());
        let mut stalks = Vec::with_capacity(poset.len());
        for y in poset.points() {
            let mut s = Vec::new();
            let mut l = vec![None; mods.len()];
            let mut parts = Vec::new();
            for (c, m) in mods.iter().enumerate() {
                if present(y, c) {
                    l[c] = Some(s.len());
                    s.extend(offsets[c]..offsets[c + 1]);
                    parts.push(m.restrict(&ring_map(y, c)).expect("ring map into the block ring"));
                }
            }
            stalks.push(direct_sum_over(space.ring(y), &parts.iter().collect::<Vec<_>>()));
            sel.push(s);
            local.push(l);
        }
        let sel2 = sel.clone();
        let sheaf = Sheaf::from_fn(space.clone(), stalks, |p, q| projection(&sel2[p], &sel2[q]));
        ChainProduct { sheaf: Arc::new(sheaf), chains, global_orders, offsets, sel, local }
    }

    pub fn block_dim(&self, c: usize) -> usize {
        self.offsets[c + 1] - self.offsets[c]
    }

    /// Stalkwise restriction of a map between global products.
    pub fn morphism(&self, target: &ChainProduct, global: &Mat) -> SheafMorphism {
        let comps = self
            .sel
            .iter()
            .zip(&target.sel)
            .map(|(s, t)| global.select_rows(t).select_cols(s))
            .collect();
        SheafMorphism::from_parts(self.sheaf.clone(), target.sheaf.clone(), comps)
    }
}

/// Matrix selecting the coordinates `to ⊆ from`.
pub(crate) fn projection(from: &[usize], to: &[usize]) -> Mat {
    let mut m = Mat::zeros(to.len(), from.len());
    for (i, g) in to.iter().enumerate() {
        let j = from.iter().position(|x| x == g).expect("projection onto a non-subset");
        m.set(i, j, 1);
    }
    m
}

/// `chain` with position `k` removed.
pub(crate) fn face(chain: &[usize], k: usize) -> ChainIndex {
    let mut f = chain.to_vec();
    f.remove(k);
    f
}

pub(crate) fn sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}
