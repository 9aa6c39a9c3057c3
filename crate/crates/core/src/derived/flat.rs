//! Resolutions by flat quasi-coherent modules on a semi-separated space.

use std::sync::Arc;

use crate::cxalg::{block_morphism, Complex, ComplexMorphism};
use crate::error::{Error, Result};
use crate::finring::DEFAULT_RING_CAP;
use crate::group::{self, Solver};
use crate::linalg::Mat;
use crate::sheafmod::{direct_sum, germ_morphism, Sheaf, SheafMorphism};

use super::qc::{require_semi_separated, unit, QcData};
use super::{Resolution, ResolutionKind};

/// Surjection onto `n` from a sum of extensions by zero `O^{U_x}`, adding a
/// germ only when it is not already in the image.
pub(crate) fn free_cover(n: &Arc<Sheaf>) -> Result<(Arc<Sheaf>, SheafMorphism)> {
    let space = n.space().clone();
    let poset = space.poset().clone();
    let mut order: Vec<usize> = poset.points().collect();
    order.sort_by_key(|&x| poset.down_set(x).len());
    let mut germs: Vec<SheafMorphism> = Vec::new();
    for x in order {
        let nx = n.stalk(x);
        for i in 0..nx.dim() {
            let mut img = Mat::zeros(nx.dim(), 0);
            let mut orders = Vec::new();
            for g in &germs {
                img = img.hstack(&g.comps[x]);
                orders.extend_from_slice(g.source.stalk(x).orders());
            }
            let mut e = vec![0; nx.dim()];
            e[i] = 1;
            if group::is_zero_vec(&e, nx.orders()) || group::preimage(&img, &orders, nx.orders(), &e).is_some() {
                continue;
            }
            germs.push(germ_morphism(n, x, &e)?);
        }
    }
    let sources: Vec<&Sheaf> = germs.iter().map(|g| &*g.source).collect();
    let sum = Arc::new(direct_sum(&space, &sources));
    let blocks: Vec<_> = germs.iter().enumerate().map(|(j, g)| (0, j, g.clone())).collect();
    Ok((sum.clone(), block_morphism(&sum, &sources, n, &[n], &blocks)))
}

/// Left resolution `P^{-len} -> … -> P^0` of `n` by sums of `O^{U_x}`, with `P^0 -> n`.
fn ext_resolution(n: &Arc<Sheaf>, len: usize) -> Result<(Arc<Complex>, SheafMorphism)> {
    let space = n.space().clone();
    let (p0, eps) = free_cover(n)?;
    let mut terms = vec![p0];
    let mut diffs = Vec::new();
    let (mut k, mut incl) = eps.kernel();
    for _ in 0..len {
        let (p, e) = free_cover(&k)?;
        diffs.push(e.then(&incl));
        terms.push(p);
        (k, incl) = e.kernel();
    }
    terms.reverse();
    diffs.reverse();
    Ok((Arc::new(Complex::new(space, -(len as i64), terms, diffs)?), eps))
}

/// A flat quasi-coherent module `Z⁰` with a surjection onto a quasi-coherent `n`:
/// the degree-0 cycles of `Qc(C^• P)` for a resolution `P` of `n` with flat stalks.
pub(crate) fn flat_cover(n: &Arc<Sheaf>) -> Result<(Arc<Sheaf>, SheafMorphism)> {
    let space = n.space().clone();
    let dim = space.poset().dimension()?;
    let (p, eps) = ext_resolution(n, dim + 1)?;
    let qp = QcData::new(&p, dim)?;
    let single = Arc::new(Complex::single(n.clone(), 0));
    let qm = QcData::new(&single, dim)?;
    let fp = &qp.families[(-p.lo()) as usize];
    let fm = &qm.families[0];
    let to_m = qp.sections.morphism_to(&qm.sections, |_, x, s, t| {
        s.map_with(t, |v| fp.bc(x, v).map_to(fm.bc(x, v), &eps.comps[x], space.res(v, v)))
    });
    let (z, incl) = qp.sections.total.diff(0).kernel();
    let via = incl.then(&to_m.comp(0));
    let u = unit(&single, &qm)?.comp(0);
    let comps = space
        .poset()
        .points()
        .map(|x| {
            Solver::new(&u.comps[x], n.stalk(x).orders(), u.target.stalk(x).orders())
                .solve_cols(&via.comps[x])
                .ok_or_else(|| Error::NoSolution("cycles do not land in the image of the unit".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let e = SheafMorphism::new(z.clone(), n.clone(), comps)?;
    if !e.is_surjective() {
        return Err(Error::NoSolution("flat cover is not surjective".into()));
    }
    Ok((z, e))
}

/// A left resolution `F^{-len} -> … -> F^0 -> M` by flat quasi-coherent modules.
#[derive(Clone, Debug)]
pub struct FlatResolution {
    /// The augmentation goes `F -> M`.
    pub resolution: Resolution,
    /// Whether the last kernel was flat (or zero), so the resolution is exact.
    pub exact: bool,
    /// Kernel of the bottom differential when truncated; it is
    /// the only cohomology of `F -> M` then.
    pub syzygy: Arc<Sheaf>,
}

/// [`flat_qcoh_res_with`] allowing three covering steps.
pub fn flat_qcoh_res(m: &Arc<Sheaf>) -> Result<FlatResolution> {
    flat_qcoh_res_with(m, 3)
}

/// Flat quasi-coherent resolution of a quasi-coherent `m`, stopping once a
/// kernel is flat or after `steps` covers.
pub fn flat_qcoh_res_with(m: &Arc<Sheaf>, steps: usize) -> Result<FlatResolution> {
    let space = m.space().clone();
    require_semi_separated(&space)?;
    if let Some((p, q)) = m.quasicoherence_failure()? {
        let n = space.poset();
        return Err(Error::Precondition(format!("module is not quasi-coherent at {} -> {}", n.name(p), n.name(q))));
    }
    let mut terms: Vec<Arc<Sheaf>> = Vec::new();
    let mut diffs: Vec<SheafMorphism> = Vec::new();
    let mut aug: Option<SheafMorphism> = None;
    let mut cur = m.clone();
    let mut incl: Option<SheafMorphism> = None;
    let mut exact = true;
    for i in 0..=steps {
        if cur.is_zero() {
            break;
        }
        let (f, e) = if cur.has_flat_stalks(DEFAULT_RING_CAP)? {
            (cur.clone(), SheafMorphism::identity(&cur))
        } else if i == steps {
            exact = false;
            break;
        } else {
            flat_cover(&cur)?
        };
        let flat = Arc::ptr_eq(&f, &cur);
        match &incl {
            Some(inc) => diffs.push(e.then(inc)),
            None => aug = Some(e.clone()),
        }
        terms.push(f);
        if flat {
            cur = Arc::new(Sheaf::zero(space.clone()));
            break;
        }
        let (k, inc) = e.kernel();
        cur = k;
        incl = Some(inc);
    }
    let target = Arc::new(Complex::single(m.clone(), 0));
    let lo = 1 - terms.len() as i64;
    terms.reverse();
    diffs.reverse();
    let complex = Arc::new(if terms.is_empty() { Complex::zero(space.clone()) } else { Complex::new(space, lo, terms, diffs)? });
    let augmentation = match aug {
        Some(a) => ComplexMorphism::new(complex.clone(), target, 0, vec![a])?,
        None => ComplexMorphism::zero(&complex, &target),
    };
    Ok(FlatResolution {
        resolution: Resolution { kind: ResolutionKind::FlatQcoh, complex, augmentation },
        exact,
        syzygy: cur,
    })
}
