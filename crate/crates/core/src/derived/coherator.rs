//! The `D_qc` coherator on a schematic space, glued from the semi-separated
//! opens `U_S = ∩_{m ∈ S} U_m` over sets `S` of minimal points.

use std::collections::HashMap;
use std::sync::Arc;

use crate::cxalg::{block_morphism, Bicomplex, Complex, ComplexMorphism};
use crate::error::Result;
use crate::sheafmod::{direct_sum, RingedMap, RingedSpace, Sheaf, SheafMorphism};

use super::qc::{qc_derived_unchecked, require_schematic, QcData};
use super::standard::StandardData;
use super::{place_in_column_zero, standard, Resolution, ResolutionKind};

/// `RQc_{D_qc}(N)` with its counit to a resolution `R` of `N`.
#[derive(Clone, Debug)]
pub struct Coherator {
    pub complex: Arc<Complex>,
    /// `complex -> R`
    pub counit: ComplexMorphism,
    /// `N -> R`, a quasi-isomorphism
    pub resolution: Resolution,
    /// The sets of minimal points used, ordered by size then lexicographically.
    pub cover: Vec<Vec<usize>>,
}

struct Piece {
    set: Vec<usize>,
    qc: QcData,
    /// `C^•_U` of the quasi-coherent part
    g: StandardData,
    /// `C^•_U N`
    std: StandardData,
    /// `C^•_U C^•_U N`
    r: StandardData,
}

/// Nonempty sets of minimal points with nonempty common up-set.
fn cover(x: &RingedSpace) -> Vec<(Vec<usize>, Vec<usize>)> {
    let poset = x.poset();
    let mins = poset.minimal_points(&poset.whole());
    let mut out = Vec::new();
    for mask in 1u64..(1 << mins.len()) {
        let set: Vec<usize> = mins.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &m)| m).collect();
        let u: Vec<usize> = poset.points().filter(|&p| set.iter().all(|&m| poset.leq(m, p))).collect();
        if !u.is_empty() {
            out.push((set, u));
        }
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(&b.0)));
    out
}

/// Čech totalization over the cover: column `s` is the sum over `|S| = s + 1`,
/// with `dh = Σ (-1)^k ρ` for the `k`-th added point.
fn cech_total(
    space: &Arc<RingedSpace>,
    sets: &[Vec<usize>],
    complexes: &[Arc<Complex>],
    rho: &HashMap<(usize, usize), (i64, ComplexMorphism)>,
) -> (Bicomplex, Arc<Complex>) {
    let smax = sets.iter().map(Vec::len).max().unwrap_or(1) as i64 - 1;
    let level = |s: i64| -> Vec<usize> { (0..sets.len()).filter(|&i| sets[i].len() as i64 == s + 1).collect() };
    let qlo = complexes.iter().filter(|c| !c.is_empty()).map(|c| c.lo()).min().unwrap_or(0);
    let qhi = complexes.iter().filter(|c| !c.is_empty()).map(|c| c.hi()).max().unwrap_or(-1);
    let parts = |s: i64, q: i64| -> Vec<&Sheaf> { level(s).iter().map(|&i| &**complexes[i].term(q)).collect() };
    let bic = Bicomplex::build(
        space.clone(),
        (0, smax),
        (qlo, qhi),
        |s, q| Arc::new(direct_sum(space, &parts(s, q))),
        |s, q, src, tgt| {
            let (a, b) = (level(s), level(s + 1));
            let mut blocks = Vec::new();
            for (jj, &j) in a.iter().enumerate() {
                for (ii, &i) in b.iter().enumerate() {
                    if let Some((sign, r)) = rho.get(&(j, i)) {
                        blocks.push((ii, jj, r.comp(q).scale(*sign)));
                    }
                }
            }
            block_morphism(src, &parts(s, q), tgt, &parts(s + 1, q), &blocks)
        },
        |s, q, src, tgt| {
            let blocks: Vec<_> = level(s).iter().enumerate().map(|(k, &i)| (k, k, complexes[i].diff(q))).collect();
            block_morphism(src, &parts(s, q), tgt, &parts(s, q + 1), &blocks)
        },
    );
    let total = Arc::new(bic.total());
    (bic, total)
}

/// `RQc(N)` for a complex on a schematic space: the object of `D(Qcoh)`
/// representing `Hom_D(-, N)` on quasi-coherent complexes.
pub fn dqc_coherator(n: &Arc<Complex>) -> Result<Coherator> {
    let space = n.space().clone();
    require_schematic(&space)?;
    let poset = space.poset().clone();
    let dim = poset.dimension()?;
    if let Some(m) = poset.minimum(&poset.whole()) {
        let (d, _, _) = qc_derived_unchecked(n, dim)?;
        return Ok(Coherator {
            complex: d.complex,
            counit: d.counit,
            resolution: d.standard,
            cover: vec![vec![m]],
        });
    }
    if n.is_empty() {
        let complex = Arc::new(Complex::zero(space));
        let counit = ComplexMorphism::identity(&complex);
        let augmentation = ComplexMorphism::zero(n, &complex);
        let resolution = Resolution { kind: ResolutionKind::Standard, complex: complex.clone(), augmentation };
        return Ok(Coherator { complex, counit, resolution, cover: Vec::new() });
    }
    let id = RingedMap::identity(space.clone());
    let mut pieces = Vec::new();
    for (set, u) in cover(&space) {
        let qc = QcData::within(n, dim, &u)?;
        let g = StandardData::within(&id, &qc.sections.total, dim, &u);
        let std = StandardData::within(&id, n, dim, &u);
        let r = StandardData::within(&id, &std.total, dim, &u);
        pieces.push(Piece { set, qc, g, std, r });
    }
    let sets: Vec<Vec<usize>> = pieces.iter().map(|p| p.set.clone()).collect();
    let mut rho_g = HashMap::new();
    let mut rho_r = HashMap::new();
    let identity = ComplexMorphism::identity(n);
    for (j, a) in pieces.iter().enumerate() {
        for (i, b) in pieces.iter().enumerate() {
            if b.set.len() != a.set.len() + 1 || !a.set.iter().all(|m| b.set.contains(m)) {
                continue;
            }
            let k = b.set.iter().position(|m| !a.set.contains(m)).expect("one added point");
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let rq = a.qc.sections.projection_to(&b.qc.sections);
            rho_g.insert((j, i), (sign, a.g.morphism_to(&b.g, &rq)));
            let rs = a.std.morphism_to(&b.std, &identity);
            rho_r.insert((j, i), (sign, a.r.morphism_to(&b.r, &rs)));
        }
    }
    let gs: Vec<Arc<Complex>> = pieces.iter().map(|p| p.g.total.clone()).collect();
    let rs: Vec<Arc<Complex>> = pieces.iter().map(|p| p.r.total.clone()).collect();
    let (bg, complex) = cech_total(&space, &sets, &gs, &rho_g);
    let (br, target) = cech_total(&space, &sets, &rs, &rho_r);
    let counits: Vec<ComplexMorphism> = pieces
        .iter()
        .map(|p| p.g.morphism_to(&p.r, &p.qc.counit(n, &p.std)))
        .collect();
    let level = |s: i64| -> Vec<usize> { (0..sets.len()).filter(|&i| sets[i].len() as i64 == s + 1).collect() };
    let counit = bg.total_morphism(&br, &complex, &target, |s, q| {
        let ids = level(s);
        let sp: Vec<&Sheaf> = ids.iter().map(|&i| &**gs[i].term(q)).collect();
        let tp: Vec<&Sheaf> = ids.iter().map(|&i| &**rs[i].term(q)).collect();
        let blocks: Vec<_> = ids.iter().enumerate().map(|(k, &i)| (k, k, counits[i].comp(q))).collect();
        block_morphism(bg.term(s, q), &sp, br.term(s, q), &tp, &blocks)
    });
    // N -> C^•_{U_m} N -> C^•_{U_m} C^•_{U_m} N, into column 0
    let augs: Vec<ComplexMorphism> = level(0)
        .iter()
        .map(|&i| {
            let p = &pieces[i];
            standard::resolution_from(n, &p.std).augmentation.then(&standard::resolution_from(&p.std.total, &p.r).augmentation)
        })
        .collect();
    let zeros = level(0);
    let column_zero = |q: i64| -> SheafMorphism {
        let tp: Vec<&Sheaf> = zeros.iter().map(|&i| &**rs[i].term(q)).collect();
        let blocks: Vec<_> = augs.iter().enumerate().map(|(k, a)| (k, 0, a.comp(q))).collect();
        block_morphism(n.term(q), &[n.term(q)], br.term(0, q), &tp, &blocks)
    };
    let smax = br.p_hi();
    let parts = |q: i64| -> Vec<Arc<Sheaf>> {
        (0..=smax).filter(|&s| q - s >= br.q_lo() && q - s <= br.q_hi()).map(|s| br.term(s, q - s).clone()).collect()
    };
    let augmentation = place_in_column_zero(n, &target, parts, column_zero);
    let resolution = Resolution { kind: ResolutionKind::Standard, complex: target, augmentation };
    Ok(Coherator { complex, counit, resolution, cover: sets })
}
