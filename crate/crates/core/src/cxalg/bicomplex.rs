use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sheafmod::{direct_sum, RingedSpace, Sheaf, SheafMorphism};

use super::complex::{block_morphism, Complex, ComplexMorphism};

/// Bounded double complex on the rectangle `p_lo..=p_hi` × `q_lo..=q_hi`
/// with commuting horizontal (`p`) and vertical (`q`) differentials.
#[derive(Clone, Debug)]
pub struct Bicomplex {
    space: Arc<RingedSpace>,
    p_lo: i64,
    q_lo: i64,
    terms: Vec<Vec<Arc<Sheaf>>>,
    dh: Vec<Vec<SheafMorphism>>,
    dv: Vec<Vec<SheafMorphism>>,
}

impl Bicomplex {
    /// Builds from term and differential functions; `dh(p, q)` is only asked
    /// for `p < p_hi`, `dv(p, q)` for `q < q_hi`.
    pub fn build(
        space: Arc<RingedSpace>,
        (p_lo, p_hi): (i64, i64),
        (q_lo, q_hi): (i64, i64),
        mut term: impl FnMut(i64, i64) -> Arc<Sheaf>,
        mut dh: impl FnMut(i64, i64, &Arc<Sheaf>, &Arc<Sheaf>) -> SheafMorphism,
        mut dv: impl FnMut(i64, i64, &Arc<Sheaf>, &Arc<Sheaf>) -> SheafMorphism,
    ) -> Self {
        let terms: Vec<Vec<Arc<Sheaf>>> = (p_lo..=p_hi).map(|p| (q_lo..=q_hi).map(|q| term(p, q)).collect()).collect();
        let at = |p: i64, q: i64| terms[(p - p_lo) as usize][(q - q_lo) as usize].clone();
        let dh = (p_lo..p_hi).map(|p| (q_lo..=q_hi).map(|q| dh(p, q, &at(p, q), &at(p + 1, q))).collect()).collect();
        let dv = (p_lo..=p_hi).map(|p| (q_lo..q_hi).map(|q| dv(p, q, &at(p, q), &at(p, q + 1))).collect()).collect();
        Bicomplex { space, p_lo, q_lo, terms, dh, dv }
    }

    pub fn q_lo(&self) -> i64 {
        self.q_lo
    }

    pub fn p_hi(&self) -> i64 {
        self.p_lo + self.terms.len() as i64 - 1
    }

    pub fn q_hi(&self) -> i64 {
        self.q_lo + self.terms.first().map_or(0, |r| r.len()) as i64 - 1
    }

    fn in_range(&self, p: i64, q: i64) -> bool {
        p >= self.p_lo && p <= self.p_hi() && q >= self.q_lo && q <= self.q_hi()
    }

    pub fn term(&self, p: i64, q: i64) -> &Arc<Sheaf> {
        &self.terms[(p - self.p_lo) as usize][(q - self.q_lo) as usize]
    }

    pub fn dh(&self, p: i64, q: i64) -> &SheafMorphism {
        &self.dh[(p - self.p_lo) as usize][(q - self.q_lo) as usize]
    }

    pub fn dv(&self, p: i64, q: i64) -> &SheafMorphism {
        &self.dv[(p - self.p_lo) as usize][(q - self.q_lo) as usize]
    }

    /// Checks `dh∘dh = 0`, `dv∘dv = 0` and commuting squares.
    pub fn validate(&self) -> Result<()> {
        for p in self.p_lo..=self.p_hi() {
            for q in self.q_lo..=self.q_hi() {
                if p + 2 <= self.p_hi() && !self.dh(p, q).then(self.dh(p + 1, q)).is_zero() {
                    return Err(Error::InvalidComplex(format!("horizontal d∘d ≠ 0 at ({p}, {q})")));
                }
                if q + 2 <= self.q_hi() && !self.dv(p, q).then(self.dv(p, q + 1)).is_zero() {
                    return Err(Error::InvalidComplex(format!("vertical d∘d ≠ 0 at ({p}, {q})")));
                }
                if p < self.p_hi() && q < self.q_hi() {
                    let a = self.dh(p, q).then(self.dv(p + 1, q));
                    let b = self.dv(p, q).then(self.dh(p, q + 1));
                    if a.comps != b.comps {
                        return Err(Error::InvalidComplex(format!("square at ({p}, {q}) does not commute")));
                    }
                }
            }
        }
        Ok(())
    }

    fn columns(&self, n: i64) -> Vec<i64> {
        (self.p_lo..=self.p_hi()).filter(|&p| self.in_range(p, n - p)).collect()
    }

    /// Total complex with `d = d_h + (-1)^p d_v`, summands ordered by `p`.
    pub fn total(&self) -> Complex {
        let lo = self.p_lo + self.q_lo;
        let hi = self.p_hi() + self.q_hi();
        if self.terms.is_empty() || hi < lo {
            return Complex::zero(self.space.clone());
        }
        let parts: Vec<Vec<&Sheaf>> =
            (lo..=hi).map(|n| self.columns(n).into_iter().map(|p| &**self.term(p, n - p)).collect()).collect();
        let terms: Vec<Arc<Sheaf>> = parts.iter().map(|ps| Arc::new(direct_sum(&self.space, ps))).collect();
        let mut diffs = Vec::new();
        for n in lo..hi {
            let k = (n - lo) as usize;
            let src_cols = self.columns(n);
            let tgt_cols = self.columns(n + 1);
            let mut blocks = Vec::new();
            for (j, &p) in src_cols.iter().enumerate() {
                let q = n - p;
                if let Some(i) = tgt_cols.iter().position(|&x| x == p + 1) {
                    blocks.push((i, j, self.dh(p, q).clone()));
                }
                if let Some(i) = tgt_cols.iter().position(|&x| x == p) {
                    let sign = if p.rem_euclid(2) == 0 { 1 } else { -1 };
                    blocks.push((i, j, self.dv(p, q).scale(sign)));
                }
            }
            diffs.push(block_morphism(&terms[k], &parts[k], &terms[k + 1], &parts[k + 1], &blocks));
        }
        Complex::from_parts(self.space.clone(), lo, terms, diffs)
    }

    /// Totalization of a bidegree-preserving map `comp(p, q) : B^{p,q} -> B'^{p,q}`.
    pub fn total_morphism(
        &self,
        other: &Bicomplex,
        src: &Arc<Complex>,
        tgt: &Arc<Complex>,
        comp: impl Fn(i64, i64) -> SheafMorphism,
    ) -> ComplexMorphism {
        let lo = src.lo().min(tgt.lo());
        let hi = src.hi().max(tgt.hi());
        let comps = (lo..=hi)
            .map(|n| {
                let sc = self.columns(n);
                let tc = other.columns(n);
                let sp: Vec<&Sheaf> = sc.iter().map(|&p| &**self.term(p, n - p)).collect();
                let tp: Vec<&Sheaf> = tc.iter().map(|&p| &**other.term(p, n - p)).collect();
                let mut blocks = Vec::new();
                for (j, &p) in sc.iter().enumerate() {
                    if let Some(i) = tc.iter().position(|&x| x == p) {
                        blocks.push((i, j, comp(p, n - p)));
                    }
                }
                block_morphism(src.term(n), &sp, tgt.term(n), &tp, &blocks)
            })
            .collect();
        ComplexMorphism::from_parts(src.clone(), tgt.clone(), lo, comps)
    }
}
