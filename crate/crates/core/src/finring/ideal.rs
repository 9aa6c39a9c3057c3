use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group;
use crate::linalg::Mat;

use super::module::{submodule, Module, TensorPres};
use super::ring::FiniteRing;

/// Default bound on `|R|` for ideal enumeration.
pub const DEFAULT_RING_CAP: u128 = 256;

/// An ideal as a submodule of the regular module.
#[derive(Clone, Debug)]
pub struct Ideal {
    pub module: Module,
    /// Columns are the ideal's additive generators inside `R`.
    pub incl: Mat,
}

fn index_of(v: &[i64], orders: &[u64]) -> usize {
    let mut idx = 0usize;
    for (x, &o) in v.iter().zip(orders).rev() {
        idx = idx * o as usize + x.rem_euclid(o as i64) as usize;
    }
    idx
}

fn element_key(reg: &Module, orders: &[u64], incl: &Mat) -> Vec<u64> {
    let size = reg.size() as usize;
    let mut bits = vec![0u64; size.div_ceil(64)];
    for c in group::elements(orders) {
        let e = incl.apply_reduce(&c, reg.orders());
        let i = index_of(&e, reg.orders());
        bits[i / 64] |= 1 << (i % 64);
    }
    bits
}

/// Every ideal of `R` exactly once, ordered by size and then by discovery.
pub fn ideals(ring: &Arc<FiniteRing>, cap: u128) -> Result<Vec<Ideal>> {
    let size = ring.size();
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    let reg = Module::regular(ring.clone());
    let elems = ring.elements(cap)?;
    let mut seen = HashSet::new();
    let mut principal: Vec<Vec<i64>> = Vec::new();
    for e in &elems {
        let (o, incl) = submodule(&reg, &Mat::from_cols(reg.dim(), std::slice::from_ref(e)));
        if seen.insert(element_key(&reg, o.orders(), &incl)) {
            principal.push(e.clone());
        }
    }
    // closure of {0} under adding principal ideals
    let mut seen = HashSet::new();
    let mut found: Vec<(Vec<Vec<i64>>, Ideal)> = Vec::new();
    let (z, zi) = submodule(&reg, &Mat::zeros(reg.dim(), 0));
    seen.insert(element_key(&reg, z.orders(), &zi));
    found.push((Vec::new(), Ideal { module: z, incl: zi }));
    let mut next = 0;
    while next < found.len() {
        let gens = found[next].0.clone();
        next += 1;
        for p in &principal {
            let mut g = gens.clone();
            g.push(p.clone());
            let (m, incl) = submodule(&reg, &Mat::from_cols(reg.dim(), &g));
            if seen.insert(element_key(&reg, m.orders(), &incl)) {
                found.push((g, Ideal { module: m, incl }));
            }
        }
    }
    let mut out: Vec<Ideal> = found.into_iter().map(|(_, i)| i).collect();
    out.sort_by_key(|i| i.module.size());
    Ok(out)
}

/// Multiplication map `I ⊗ M -> M` in canonical tensor coordinates.
pub fn multiplication_map(ideal: &Ideal, m: &Module) -> Result<(TensorPres, Mat)> {
    let pres = TensorPres::new(&ideal.module, m)?;
    let map = pres.map_from(m.orders(), |j, i| {
        let a = ideal.incl.column(j);
        m.act(&a).column(i)
    });
    Ok((pres, map))
}

/// Flatness by the ideal criterion: `I ⊗ M -> M` injective for every ideal `I`.
pub fn is_flat(m: &Module, cap: u128) -> Result<bool> {
    for ideal in ideals(m.ring(), cap)? {
        let (pres, map) = multiplication_map(&ideal, m)?;
        if !group::is_injective(&map, &pres.orders, m.orders()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> Arc<FiniteRing> {
        Arc::new(FiniteRing::cyclic(n))
    }

    fn sizes(r: &Arc<FiniteRing>) -> Vec<u128> {
        ideals(r, DEFAULT_RING_CAP).unwrap().iter().map(|i| i.module.size()).collect()
    }

    #[test]
    fn ideal_lists() {
        assert_eq!(sizes(&z(4)), vec![1, 2, 4]);
        assert_eq!(sizes(&z(2)), vec![1, 2]);
        assert_eq!(sizes(&z(6)), vec![1, 2, 3, 6]);
        assert_eq!(sizes(&Arc::new(FiniteRing::product(&FiniteRing::cyclic(2), &FiniteRing::cyclic(2)))).len(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(ideals(&z(300), 256), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn flatness_examples() {
        let z4 = z(4);
        let m = Module::cyclic_quotient(z4.clone(), &[vec![2]]).unwrap();
        assert!(!is_flat(&m, 256).unwrap());
        assert!(is_flat(&Module::regular(z4), 256).unwrap());
        let z6 = z(6);
        let m = Module::cyclic_quotient(z6.clone(), &[vec![2]]).unwrap();
        assert!(is_flat(&m, 256).unwrap());
        let m = Module::cyclic_quotient(z6, &[vec![3]]).unwrap();
        assert!(is_flat(&m, 256).unwrap());
    }
}
