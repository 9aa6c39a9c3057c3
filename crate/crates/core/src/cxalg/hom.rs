use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::sheafmod::{SheafHom, SheafMorphism};

use super::complex::Complex;
use super::groups::GroupComplex;

/// One summand `Hom(M^p, N^q)` of `Hom^n`.
#[derive(Clone, Debug)]
pub struct HomBlock {
    pub p: i64,
    pub q: i64,
    pub hom: SheafHom,
    pub offset: usize,
}

/// `Hom^n = ∏_{q-p=n} Hom(M^p, N^q)` with `δf = d∘f - (-1)^n f∘d`.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub source: Arc<Complex>,
    pub target: Arc<Complex>,
    pub groups: GroupComplex,
    pub blocks: Vec<Vec<HomBlock>>,
}

impl HomComplex {
    pub fn new(m: &Arc<Complex>, n: &Arc<Complex>) -> Result<Self> {
        if m.space() != n.space() {
            return Err(Error::SpaceMismatch);
        }
        if m.is_empty() || n.is_empty() {
            return Ok(HomComplex { source: m.clone(), target: n.clone(), groups: GroupComplex::default(), blocks: Vec::new() });
        }
        let lo = n.lo() - m.hi();
        let hi = n.hi() - m.lo();
        let mut blocks: Vec<Vec<HomBlock>> = Vec::new();
        let mut orders: Vec<Vec<u64>> = Vec::new();
        for deg in lo..=hi {
            let mut row = Vec::new();
            let mut ords = Vec::new();
            for p in m.lo()..=m.hi() {
                let q = p + deg;
                if q < n.lo() || q > n.hi() {
                    continue;
                }
                let hom = SheafHom::new(m.term(p), n.term(q))?;
                let offset = ords.len();
                ords.extend_from_slice(&hom.orders);
                row.push(HomBlock { p, q, hom, offset });
            }
            blocks.push(row);
            orders.push(ords);
        }
        let mut diffs = Vec::new();
        for deg in lo..hi {
            let k = (deg - lo) as usize;
            let rows = orders[k + 1].len();
            let cols = orders[k].len();
            let mut d = Mat::zeros(rows, cols);
            let sign = if deg.rem_euclid(2) == 0 { -1 } else { 1 };
            for b in &blocks[k] {
                for s in 0..b.hom.dim() {
                    let mut e = vec![0; b.hom.dim()];
                    e[s] = 1;
                    let f = b.hom.to_comps(&e);
                    let col = b.offset + s;
                    if let Some(t) = blocks[k + 1].iter().find(|t| t.p == b.p && t.q == b.q + 1) {
                        let dn = n.diff(b.q);
                        let g: Vec<Mat> = f.iter().zip(&dn.comps).map(|(fx, dx)| dx.mul(fx)).collect();
                        let c = t.hom.from_comps(&reduce(&g, &dn)).expect("d∘f is a morphism");
                        for (i, v) in c.into_iter().enumerate() {
                            d.set(t.offset + i, col, d.get(t.offset + i, col) + v);
                        }
                    }
                    if let Some(t) = blocks[k + 1].iter().find(|t| t.p == b.p - 1 && t.q == b.q) {
                        let dm = m.diff(b.p - 1);
                        let g: Vec<Mat> = f.iter().zip(&dm.comps).map(|(fx, dx)| fx.mul(dx).scale(sign)).collect();
                        let tgt = n.term(b.q);
                        let g: Vec<Mat> =
                            g.into_iter().enumerate().map(|(x, gx)| gx.reduced_rows(tgt.stalk(x).orders())).collect();
                        let c = t.hom.from_comps(&g).expect("f∘d is a morphism");
                        for (i, v) in c.into_iter().enumerate() {
                            d.set(t.offset + i, col, d.get(t.offset + i, col) + v);
                        }
                    }
                }
            }
            diffs.push(d.reduced_rows(&orders[k + 1]));
        }
        let groups = GroupComplex::new(lo, orders, diffs);
        Ok(HomComplex { source: m.clone(), target: n.clone(), groups, blocks })
    }

    fn blocks_at(&self, deg: i64) -> &[HomBlock] {
        let k = deg - self.groups.lo;
        if k < 0 || k as usize >= self.blocks.len() {
            return &[];
        }
        &self.blocks[k as usize]
    }

    /// Components `M^p -> N^{p+deg}` of a degree-`deg` cochain.
    pub fn to_maps(&self, deg: i64, c: &[i64]) -> Vec<(i64, SheafMorphism)> {
        self.blocks_at(deg)
            .iter()
            .map(|b| {
                let coords = &c[b.offset..b.offset + b.hom.dim()];
                (b.p, b.hom.morphism(self.source.term(b.p), self.target.term(b.q), coords))
            })
            .collect()
    }

    /// Cochain from components given per source degree `p` (missing ones are zero).
    pub fn from_maps(&self, deg: i64, maps: &dyn Fn(i64) -> Option<Vec<Mat>>) -> Option<Vec<i64>> {
        let mut out = vec![0; self.groups.orders_at(deg).len()];
        for b in self.blocks_at(deg) {
            if let Some(comps) = maps(b.p) {
                let c = b.hom.from_comps(&comps)?;
                out[b.offset..b.offset + c.len()].copy_from_slice(&c);
            }
        }
        Some(out)
    }
}

fn reduce(g: &[Mat], d: &SheafMorphism) -> Vec<Mat> {
    g.iter().enumerate().map(|(x, m)| m.clone().reduced_rows(d.target.stalk(x).orders())).collect()
}
