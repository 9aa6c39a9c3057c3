use std::sync::Arc;

use crate::cxalg::{in_dqc, Complex, ComplexMorphism};
use crate::error::{Error, Result};
use crate::finring::{self as fr, base_change, BaseChange, Module, DEFAULT_RING_CAP};
use crate::group::Solver;
use crate::linalg::Mat;
use crate::sheafmod::{RingedMap, RingedSpace, Sections, Sheaf, SheafMorphism};

use super::cech::{cech_data, SectionComplex};
use super::classify::{classify, is_schematic_morphism, SeparationFailure};
use super::standard::StandardData;
use super::{place_in_column_zero, quasi_iso_failure, Resolution};

/// `Ñ_x` on `U_x` for every point `x`, extended by zero to the whole space.
pub(crate) struct TildeFamily {
    pub sheaves: Vec<Arc<Sheaf>>,
    /// `bcs[x][v] : N_x ⊗ O_v` for `v ≥ x`
    pub bcs: Vec<Vec<Option<BaseChange>>>,
}

impl TildeFamily {
    pub fn new(n: &Sheaf) -> Result<Self> {
        let space = n.space().clone();
        let poset = space.poset().clone();
        let mut sheaves = Vec::with_capacity(poset.len());
        let mut all = Vec::with_capacity(poset.len());
        for x in poset.points() {
            let bcs = poset
                .points()
                .map(|v| poset.leq(x, v).then(|| base_change(n.stalk(x), space.res(x, v))).transpose())
                .collect::<Result<Vec<_>>>()?;
            let stalks = poset
                .points()
                .map(|v| bcs[v].as_ref().map_or_else(|| Module::zero(space.ring(v).clone()), |b| b.module.clone()))
                .collect::<Vec<_>>();
            let dims: Vec<usize> = stalks.iter().map(Module::dim).collect();
            let id = n.stalk(x).identity();
            let sheaf = Sheaf::from_fn(space.clone(), stalks, |v, w| match (&bcs[v], &bcs[w]) {
                (Some(a), Some(b)) => a.map_to(b, &id, space.res(v, w)),
                _ => Mat::zeros(dims[w], dims[v]),
            });
            sheaves.push(Arc::new(sheaf));
            all.push(bcs);
        }
        Ok(TildeFamily { sheaves, bcs: all })
    }

    pub fn bc(&self, x: usize, v: usize) -> &BaseChange {
        self.bcs[x][v].as_ref().expect("point outside U_x")
    }

    /// `r̃_{x,v} : N_x ⊗ O_v -> N_v`.
    pub fn comparison(&self, n: &Sheaf, x: usize, v: usize) -> Mat {
        self.bc(x, v).adjoint(n.stalk(v), n.res(x, v))
    }
}

pub(crate) fn not_schematic(x: &RingedSpace, f: &SeparationFailure, what: &str) -> Error {
    Error::Precondition(format!("space is not {what}: {}", f.describe(x.poset())))
}

pub(crate) fn require_schematic(x: &Arc<RingedSpace>) -> Result<()> {
    let c = classify(x)?;
    if let Some((p, q)) = c.flat_failure {
        let n = x.poset();
        return Err(Error::Precondition(format!(
            "not a finite space: restriction {} -> {} is not flat",
            n.name(p),
            n.name(q)
        )));
    }
    match c.schematic_failure {
        Some(f) => Err(not_schematic(x, &f, "schematic")),
        None => Ok(()),
    }
}

pub(crate) fn require_semi_separated(x: &Arc<RingedSpace>) -> Result<()> {
    require_schematic(x)?;
    match classify(x)?.separation_failure {
        Some(f) => Err(not_schematic(x, &f, "semi-separated")),
        None => Ok(()),
    }
}

/// `Qc(C^• N)` as a section complex, with the tilde families per degree.
pub(crate) struct QcData {
    pub sections: SectionComplex,
    pub families: Vec<TildeFamily>,
}

impl QcData {
    pub fn new(n: &Complex, dim: usize) -> Result<Self> {
        Self::within(n, dim, &n.space().poset().whole())
    }

    /// Same, using only chains inside the open set `within` (that is, `j_* Qc(C^•(N|_U))`).
    pub fn within(n: &Complex, dim: usize, within: &[usize]) -> Result<Self> {
        let id = RingedMap::identity(n.space().clone());
        let range = (!n.is_empty()).then(|| (n.lo(), n.hi()));
        let families = match range {
            Some((lo, hi)) => (lo..=hi).map(|q| TildeFamily::new(n.term(q))).collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let lo = range.map_or(0, |r| r.0);
        let fam = |q: i64| &families[(q - lo) as usize];
        let sections = SectionComplex::build(
            &id,
            range,
            dim,
            within,
            |q, x| fam(q).sheaves[x].clone(),
            |q, x, x2, s: &Sections, t: &Sections| {
                let r = n.term(q).res(x, x2);
                s.map_with(t, |v| fam(q).bc(x, v).map_to(fam(q).bc(x2, v), r, n.space().res(v, v)))
            },
            |q, x, s, t| {
                let d = n.diff(q);
                s.map_with(t, |v| fam(q).bc(x, v).map_to(fam(q + 1).bc(x, v), &d.comps[x], n.space().res(v, v)))
            },
        );
        Ok(QcData { sections, families })
    }

    /// Counit `Qc(C^• N) -> C^• N`.
    pub fn counit(&self, n: &Complex, std: &StandardData) -> ComplexMorphism {
        let lo = self.sections.lo;
        self.sections.to_standard(std, |q, x| {
            let nx = n.term(q).stalk(x);
            self.families[(q - lo) as usize].bc(x, x).adjoint(nx, &nx.identity())
        })
    }
}

/// `Qc(N)` with its counit `Qc(N) -> N`.
#[derive(Clone, Debug)]
pub struct Quasicoherator {
    pub sheaf: Arc<Sheaf>,
    pub counit: SheafMorphism,
}

/// The quasi-coherator of a module on a schematic space, as the kernel of
/// `Qc(C^0 N) -> Qc(C^1 N)`.
pub fn qc(n: &Arc<Sheaf>) -> Result<Quasicoherator> {
    let space = n.space().clone();
    require_schematic(&space)?;
    let dim = space.poset().dimension()?;
    let single = Complex::single(n.clone(), 0);
    let data = QcData::new(&single, dim)?;
    let bic = data.sections.bicomplex.as_ref().expect("nonempty complex");
    let c0 = data.sections.term(0, 0).sheaf.clone();
    let (sheaf, incl) = if dim > 0 { bic.dh(0, 0).kernel() } else { (c0.clone(), SheafMorphism::identity(&c0)) };
    let id = RingedMap::identity(space.clone());
    let std = StandardData::new(&id, &single)?;
    let counit0 = data.counit(&single, &std).comp(0);
    let via = incl.then(&counit0);
    let aug = super::standard::standard_augmentation(n, std.cp(0, 0));
    let comps = space
        .poset()
        .points()
        .map(|p| {
            if sheaf.stalk(p).dim() == 0 {
                return Ok(Mat::zeros(n.stalk(p).dim(), 0));
            }
            Solver::new(&aug.comps[p], n.stalk(p).orders(), aug.target.stalk(p).orders())
                .solve_cols(&via.comps[p])
                .ok_or_else(|| Error::NoSolution("counit does not factor through the augmentation".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let counit = SheafMorphism::from_parts(sheaf.clone(), n.clone(), comps);
    Ok(Quasicoherator { sheaf, counit })
}

/// `R Qc(M) = Qc(C^• M)` together with the counit to `C^• M`.
#[derive(Clone, Debug)]
pub struct DerivedQc {
    pub complex: Arc<Complex>,
    pub counit: ComplexMorphism,
    pub standard: Resolution,
}

pub(crate) fn qc_derived_unchecked(m: &Arc<Complex>, dim: usize) -> Result<(DerivedQc, QcData, StandardData)> {
    let id = RingedMap::identity(m.space().clone());
    let data = QcData::new(m, dim)?;
    let std = StandardData::with_dim(&id, m, dim);
    let counit = data.counit(m, &std);
    let standard = super::standard::resolution_from(m, &std);
    let out = DerivedQc { complex: data.sections.total.clone(), counit, standard };
    Ok((out, data, std))
}

pub fn qc_derived(m: &Arc<Complex>) -> Result<DerivedQc> {
    require_semi_separated(m.space())?;
    let dim = m.space().poset().dimension()?;
    Ok(qc_derived_unchecked(m, dim)?.0)
}

/// `M -> Qc(C^0 M)` for a degreewise quasi-coherent complex, through `M ≅ Qc(M)`.
pub(crate) fn unit(m: &Arc<Complex>, data: &QcData) -> Result<ComplexMorphism> {
    let sc = &data.sections;
    if m.is_empty() {
        return Ok(ComplexMorphism::zero(m, &sc.total));
    }
    let lo = m.lo();
    let mut comps = Vec::new();
    for q in lo..=m.hi() {
        let mq = m.term(q);
        let fam = &data.families[(q - lo) as usize];
        let t = sc.term(0, q);
        let secs = &sc.secs[(q - lo) as usize];
        let poset = m.space().poset();
        let mut stalk_maps = Vec::new();
        for p in poset.points() {
            let src = Sections::new(mq, &poset.up_set(p));
            let mut mat = Mat::zeros(t.sheaf.stalk(p).dim(), mq.stalk(p).dim());
            for (c, chain) in t.chains.iter().enumerate() {
                let x = chain[0];
                let mut err = None;
                let block = src.map_with(&secs[x][p], |v| {
                    let bc = fam.bc(x, v);
                    fr::inverse(&bc.module, mq.stalk(v), &fam.comparison(mq, x, v)).unwrap_or_else(|| {
                        err = Some(v);
                        Mat::zeros(bc.module.dim(), mq.stalk(v).dim())
                    })
                });
                if let Some(v) = err {
                    let n = poset.name(v);
                    return Err(Error::Precondition(format!("degree {q} is not quasi-coherent at {n}")));
                }
                mat.set_block(t.offsets[p][c], 0, &block);
            }
            stalk_maps.push(mat);
        }
        comps.push(SheafMorphism::from_parts(mq.clone(), t.sheaf.clone(), stalk_maps));
    }
    Ok(place_in_column_zero(m, &sc.total, |n| sc.parts(n), |n| comps[(n - lo) as usize].clone()))
}

/// Outcome of the equivalence check between `D Qcoh` and `D_qc`.
#[derive(Clone, Debug)]
pub struct BnReport {
    pub qc_complex: Arc<Complex>,
    pub counit_quasi_iso: bool,
    /// `None` when `M` is not degreewise quasi-coherent
    pub unit_quasi_iso: Option<bool>,
    /// `(which map, degree, point)` of the first failure
    pub failure: Option<(&'static str, i64, usize)>,
    pub pass: bool,
}

/// Checks that `Qc(C^• M) -> C^• M` is a quasi-isomorphism, and for
/// degreewise quasi-coherent `M` also `M -> Qc(C^• M)`.
pub fn bn_check(m: &Arc<Complex>) -> Result<BnReport> {
    require_semi_separated(m.space())?;
    if !in_dqc(m, DEFAULT_RING_CAP)? {
        return Err(Error::Precondition("complex does not have quasi-coherent cohomology".into()));
    }
    let dim = m.space().poset().dimension()?;
    let (d, data, _) = qc_derived_unchecked(m, dim)?;
    let mut failure = quasi_iso_failure(&d.counit, None).map(|(n, p)| ("counit", n, p));
    let qcoh = m.terms().iter().map(|t| t.is_quasicoherent()).collect::<Result<Vec<_>>>()?.into_iter().all(|b| b);
    let unit_quasi_iso = if qcoh {
        let u = unit(m, &data)?;
        let f = quasi_iso_failure(&u, None);
        if failure.is_none() {
            failure = f.map(|(n, p)| ("unit", n, p));
        }
        Some(f.is_none())
    } else {
        None
    };
    let counit_quasi_iso = failure.map_or(true, |f| f.0 != "counit");
    Ok(BnReport {
        qc_complex: d.complex,
        counit_quasi_iso,
        unit_quasi_iso,
        pass: failure.is_none(),
        failure,
    })
}

/// `R_qc f_* M = f_* Č^• M` compared with `R f_* M = f_* C^• M`.
#[derive(Clone, Debug)]
pub struct RqcPush {
    pub complex: Arc<Complex>,
    pub standard: Arc<Complex>,
    pub comparison: ComplexMorphism,
    pub quasi_iso: bool,
}

pub fn rqc_push(f: &RingedMap, m: &Arc<Complex>) -> Result<RqcPush> {
    if !is_schematic_morphism(f)? {
        return Err(Error::Precondition("morphism is not schematic".into()));
    }
    require_semi_separated(&f.source)?;
    require_semi_separated(&f.target)?;
    for (k, t) in m.terms().iter().enumerate() {
        if !t.is_quasicoherent()? {
            return Err(Error::Precondition(format!("degree {} is not quasi-coherent", m.lo() + k as i64)));
        }
    }
    let cech = cech_data(f, m)?;
    let std = StandardData::new(f, m)?;
    let comparison = cech.to_standard(&std, |q, x| m.term(q).stalk(x).identity());
    let quasi_iso = comparison.is_quasi_iso();
    Ok(RqcPush { complex: cech.total.clone(), standard: std.total.clone(), comparison, quasi_iso })
}

/// Degreewise comparison `Qc(C^• M) -> Č^• M` induced by `r̃_{x,v}`; an
/// isomorphism when `M` is quasi-coherent on a schematic space.
pub fn qc_to_cech(m: &Arc<Complex>) -> Result<ComplexMorphism> {
    require_schematic(m.space())?;
    let dim = m.space().poset().dimension()?;
    let data = QcData::new(m, dim)?;
    let id = RingedMap::identity(m.space().clone());
    let cech = cech_data(&id, m)?;
    let lo = data.sections.lo;
    Ok(data.sections.morphism_to(&cech, |q, x, s, t| {
        let fam = &data.families[(q - lo) as usize];
        s.map_with(t, |v| fam.comparison(m.term(q), x, v))
    }))
}
