//! Seeded generators for modules, sheaves and complexes, used by the
//! verification suites.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cxalg::Complex;
use crate::error::Result;
use crate::finring::{direct_sum, Elem, FiniteRing, Module};
use crate::linalg::Mat;
use crate::sheafmod::{
    co_skyscraper, direct_sum as sheaf_sum, ext_by_zero, germ_morphism, pushforward, quotient_sheaf, tilde, RingedMap, RingedSpace,
    Sheaf, SheafHom, SheafMorphism,
};

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coords(orders: &[u64], rng: &mut Rand) -> Vec<i64> {
    orders.iter().map(|&d| rng.gen_range(0..d as i64)).collect()
}

pub fn element(ring: &FiniteRing, rng: &mut Rand) -> Elem {
    coords(ring.orders(), rng)
}

/// A sum of one or two cyclic modules `R/(a)`.
pub fn module(ring: &Arc<FiniteRing>, rng: &mut Rand) -> Module {
    let k = rng.gen_range(1..=2);
    let parts: Vec<Module> = (0..k)
        .map(|_| {
            let a = if rng.gen_bool(0.4) { ring.zero_elem() } else { element(ring, rng) };
            Module::cyclic_quotient(ring.clone(), &[a]).expect("cyclic module")
        })
        .collect();
    direct_sum(&parts.iter().collect::<Vec<_>>())
}

/// `O -> M` for a global section with the given stalk components.
fn section_morphism(m: &Arc<Sheaf>, comps: &[Vec<i64>]) -> Result<SheafMorphism> {
    let space = m.space().clone();
    let src = Arc::new(Sheaf::structure(space.clone()));
    let mats = space
        .poset()
        .points()
        .map(|q| {
            let ring = space.ring(q);
            let cols: Vec<Vec<i64>> = (0..ring.rank())
                .map(|k| m.stalk(q).act(&ring.basis(k)).apply_reduce(&comps[q], m.stalk(q).orders()))
                .collect();
            Mat::from_cols(m.stalk(q).dim(), &cols)
        })
        .collect();
    SheafMorphism::new(src, m.clone(), mats)
}

/// `j_* Ã` for the inclusion of `U_x`.
pub fn pushed_tilde(space: &Arc<RingedSpace>, x: usize, a: &Module) -> Result<Sheaf> {
    let (_, sheaf) = tilde(space, x, a).map(|(_, _, s)| ((), s))?;
    let (_, j) = RingedMap::open_inclusion(space, &space.poset().up_set(x))?;
    let sheaf = Sheaf::new(j.source.clone(), sheaf.stalks().to_vec(), restrictions(&sheaf))?;
    Ok(pushforward(&j, &sheaf).0)
}

fn restrictions(s: &Sheaf) -> Vec<((usize, usize), Mat)> {
    let poset = s.space().poset();
    poset.hasse().into_iter().map(|(p, q)| ((p, q), s.res(p, q).clone())).collect()
}

/// A random sheaf: a quotient of a sum of extensions by zero, co-skyscrapers
/// and pushed-forward tildes by the image of a random germ.
pub fn sheaf(space: &Arc<RingedSpace>, rng: &mut Rand) -> Result<Arc<Sheaf>> {
    let points: Vec<usize> = space.poset().points().collect();
    let k = rng.gen_range(1..=2);
    let mut blocks = Vec::new();
    for _ in 0..k {
        let x = *points.choose(rng).unwrap();
        let b = match rng.gen_range(0..3) {
            0 => ext_by_zero(space, &space.poset().up_set(x))?,
            1 => co_skyscraper(space, x, &module(space.ring(x), rng))?,
            _ => pushed_tilde(space, x, &module(space.ring(x), rng))?,
        };
        blocks.push(b);
    }
    let sum = Arc::new(sheaf_sum(space, &blocks.iter().collect::<Vec<_>>()));
    if rng.gen_bool(0.5) {
        let p = *points.choose(rng).unwrap();
        let s = coords(sum.stalk(p).orders(), rng);
        let phi = germ_morphism(&sum, p, &s)?;
        return Ok(quotient_sheaf(&sum, &phi.comps).0);
    }
    Ok(sum)
}

/// A random quasi-coherent sheaf: a sum of copies of `O` and of those `j_* Ã`
/// that are quasi-coherent, modulo a random global section.
pub fn qcoh_sheaf(space: &Arc<RingedSpace>, rng: &mut Rand) -> Result<Arc<Sheaf>> {
    let points: Vec<usize> = space.poset().points().collect();
    let mut blocks = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let x = *points.choose(rng).unwrap();
        let t = pushed_tilde(space, x, &module(space.ring(x), rng))?;
        if t.is_quasicoherent()? {
            blocks.push(t);
        }
    }
    if blocks.is_empty() || rng.gen_bool(0.3) {
        blocks.push(Sheaf::structure(space.clone()));
    }
    let sum = Arc::new(sheaf_sum(space, &blocks.iter().collect::<Vec<_>>()));
    if rng.gen_bool(0.5) {
        let g = crate::sheafmod::global_sections(&sum);
        let c = coords(&g.orders, rng);
        let comps: Vec<Vec<i64>> = space.poset().points().map(|p| g.component(&c, p)).collect();
        let phi = section_morphism(&sum, &comps)?;
        return Ok(quotient_sheaf(&sum, &phi.comps).0);
    }
    Ok(sum)
}

/// A random morphism `M -> N`.
pub fn morphism(m: &Arc<Sheaf>, n: &Arc<Sheaf>, rng: &mut Rand) -> Result<SheafMorphism> {
    let h = SheafHom::new(m, n)?;
    let c = coords(&h.orders, rng);
    Ok(h.morphism(m, n, &c))
}

/// A two-term complex `M -> N` of quasi-coherent sheaves in degrees `n, n+1`.
pub fn qcoh_complex(space: &Arc<RingedSpace>, rng: &mut Rand) -> Result<Arc<Complex>> {
    let m = qcoh_sheaf(space, rng)?;
    if rng.gen_bool(0.3) {
        return Ok(Arc::new(Complex::single(m, rng.gen_range(-1..=1))));
    }
    let n = qcoh_sheaf(space, rng)?;
    let d = morphism(&m, &n, rng)?;
    Ok(Arc::new(Complex::two_term(d, rng.gen_range(-1..=0))))
}

/// A two-term complex of arbitrary sheaves.
pub fn complex(space: &Arc<RingedSpace>, rng: &mut Rand) -> Result<Arc<Complex>> {
    let m = sheaf(space, rng)?;
    let n = sheaf(space, rng)?;
    let d = morphism(&m, &n, rng)?;
    Ok(Arc::new(Complex::two_term(d, rng.gen_range(-1..=0))))
}
