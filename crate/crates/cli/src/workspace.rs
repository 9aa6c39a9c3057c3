//! Validation of a [`Document`] into library objects.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use finsheaf::cxalg::Complex;
use finsheaf::finring::same_ring;
use finsheaf::{fixtures, FiniteRing, Mat, Module, Poset, RingHom, RingedMap, RingedSpace, Sheaf, SheafMorphism};

use crate::document::{
    ComplexSpec, Document, MapSpec, Matrix, ModuleSpec, PosetSpace, RingRef, RingSpec, SheafSpec, SpaceSpec, TaskSpec,
};

/// An input problem, located by its record path (e.g. `sheaves.M.stalks.a`).
#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for InputError {}

pub fn input_error(path: impl Into<String>, message: impl fmt::Display) -> InputError {
    InputError { path: path.into(), message: message.to_string() }
}

type Res<T> = Result<T, InputError>;

/// A sheaf or a complex, as named in a task.
#[derive(Clone)]
pub enum Object {
    Sheaf(Arc<Sheaf>),
    Complex(Arc<Complex>),
}

impl Object {
    pub fn complex(&self) -> Arc<Complex> {
        match self {
            Object::Sheaf(s) => Arc::new(Complex::single(s.clone(), 0)),
            Object::Complex(c) => c.clone(),
        }
    }

    pub fn space(&self) -> &Arc<RingedSpace> {
        match self {
            Object::Sheaf(s) => s.space(),
            Object::Complex(c) => c.space(),
        }
    }
}

#[derive(Default)]
pub struct Workspace {
    pub rings: BTreeMap<String, Arc<FiniteRing>>,
    pub spaces: BTreeMap<String, Arc<RingedSpace>>,
    pub maps: BTreeMap<String, RingedMap>,
    pub sheaves: BTreeMap<String, Arc<Sheaf>>,
    pub complexes: BTreeMap<String, Arc<Complex>>,
    pub tasks: Vec<TaskSpec>,
}

pub fn fixture(name: &str) -> Option<Arc<RingedSpace>> {
    Some(match name {
        "point_z4" => fixtures::point_z4(),
        "arrow" => fixtures::arrow(),
        "flat" => fixtures::flat(),
        "flat_z4" => fixtures::flat_z4(),
        "wedge" => fixtures::wedge(),
        "pseudocircle" => fixtures::pseudocircle(),
        "sphere" => fixtures::sphere(),
        _ => return None,
    })
}

struct Loader<'a> {
    doc: &'a Document,
    max_ring: u128,
    ws: Workspace,
    resolving: Vec<String>,
}

pub fn load(doc: &Document, max_ring: u128) -> Res<Workspace> {
    let mut l = Loader { doc, max_ring, ws: Workspace::default(), resolving: Vec::new() };
    for name in doc.rings.keys() {
        l.named_ring(name, &format!("rings.{name}"))?;
    }
    for (name, spec) in &doc.spaces {
        let space = l.space(spec, &format!("spaces.{name}"))?;
        l.ws.spaces.insert(name.clone(), space);
    }
    for (name, spec) in &doc.maps {
        let f = l.map(spec, &format!("maps.{name}"))?;
        l.ws.maps.insert(name.clone(), f);
    }
    for (name, spec) in &doc.sheaves {
        let s = l.sheaf(spec, &format!("sheaves.{name}"))?;
        l.ws.sheaves.insert(name.clone(), Arc::new(s));
    }
    for (name, spec) in &doc.complexes {
        let path = format!("complexes.{name}");
        if doc.sheaves.contains_key(name) {
            return Err(input_error(path, "name is also used by a sheaf"));
        }
        let c = l.complex(spec, &path)?;
        l.ws.complexes.insert(name.clone(), Arc::new(c));
    }
    l.ws.tasks = doc.tasks.clone();
    Ok(l.ws)
}

fn matrix(rows: &Matrix, r: usize, c: usize, path: &str) -> Res<Mat> {
    if rows.is_empty() {
        return Ok(Mat::zeros(r, c));
    }
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(input_error(path, format!("expected a {r}×{c} matrix")));
    }
    Ok(Mat::from_rows(rows))
}

fn index(poset: &Poset, name: &str, path: &str) -> Res<usize> {
    poset.index(name).map_err(|e| input_error(path, e))
}

/// Identity between equal rings, otherwise the unique map out of a cyclic ring.
fn default_hom(source: &Arc<FiniteRing>, target: &Arc<FiniteRing>, path: &str) -> Res<RingHom> {
    if same_ring(source, target) {
        return Ok(RingHom::identity(source.clone()));
    }
    if source.rank() <= 1 {
        return RingHom::from_cyclic(source.clone(), target.clone()).map_err(|e| input_error(path, e));
    }
    Err(input_error(path, "no default ring map between these rings; give `images`"))
}

impl Loader<'_> {
    fn named_ring(&mut self, name: &str, path: &str) -> Res<Arc<FiniteRing>> {
        if let Some(r) = self.ws.rings.get(name) {
            return Ok(r.clone());
        }
        let spec = self.doc.rings.get(name).ok_or_else(|| input_error(path, format!("unknown ring `{name}`")))?;
        if self.resolving.iter().any(|n| n == name) {
            return Err(input_error(path, format!("ring `{name}` refers to itself")));
        }
        self.resolving.push(name.to_string());
        let r = self.ring_spec(spec, &format!("rings.{name}"));
        self.resolving.pop();
        let r = r?;
        self.ws.rings.insert(name.to_string(), r.clone());
        Ok(r)
    }

    fn ring(&mut self, r: &RingRef, path: &str) -> Res<Arc<FiniteRing>> {
        match r {
            RingRef::Named(name) => self.named_ring(name, path),
            RingRef::Inline(spec) => self.ring_spec(spec, path),
        }
    }

    fn ring_spec(&mut self, spec: &RingSpec, path: &str) -> Res<Arc<FiniteRing>> {
        let ring = match spec {
            RingSpec::Cyclic(n) if *n >= 1 => FiniteRing::cyclic(*n),
            RingSpec::Cyclic(_) => return Err(input_error(path, "modulus must be positive")),
            RingSpec::TruncatedPoly { modulus, degree } if *modulus >= 2 && *degree >= 1 => {
                FiniteRing::truncated_poly(*modulus, *degree)
            }
            RingSpec::TruncatedPoly { .. } => return Err(input_error(path, "need modulus ≥ 2 and degree ≥ 1")),
            RingSpec::Table { orders, products, one } => {
                FiniteRing::new(orders.clone(), products.clone(), one.clone()).map_err(|e| input_error(path, e))?
            }
            RingSpec::Product(a, b) => {
                let a = self.ring(a, &format!("{path}.0"))?;
                let b = self.ring(b, &format!("{path}.1"))?;
                FiniteRing::product(&a, &b)
            }
        };
        if ring.size() > self.max_ring {
            return Err(input_error(path, format!("ring has {} elements, above the cap {}", ring.size(), self.max_ring)));
        }
        Ok(Arc::new(ring))
    }

    fn space_named(&self, name: &str, path: &str) -> Res<Arc<RingedSpace>> {
        self.ws.spaces.get(name).cloned().ok_or_else(|| input_error(path, format!("unknown space `{name}`")))
    }

    fn space(&mut self, spec: &SpaceSpec, path: &str) -> Res<Arc<RingedSpace>> {
        match spec {
            SpaceSpec::Fixture(name) => {
                let x = fixture(name).ok_or_else(|| input_error(path, format!("unknown fixture `{name}`")))?;
                if x.rings().iter().any(|r| r.size() > self.max_ring) {
                    return Err(input_error(path, "a ring exceeds the size cap"));
                }
                Ok(x)
            }
            SpaceSpec::Poset(p) => self.poset_space(p, path),
        }
    }

    fn poset_space(&mut self, p: &PosetSpace, path: &str) -> Res<Arc<RingedSpace>> {
        let rel: Vec<(&str, &str)> = p.order.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let names: Vec<&str> = p.points.iter().map(String::as_str).collect();
        let poset = Arc::new(Poset::new(&names, &rel).map_err(|e| input_error(format!("{path}.order"), e))?);
        for name in p.rings.keys() {
            index(&poset, name, &format!("{path}.rings.{name}"))?;
        }
        let mut rings = Vec::new();
        for x in poset.points() {
            let name = poset.name(x);
            let r = match (p.rings.get(name), &p.ring) {
                (Some(r), _) => self.ring(r, &format!("{path}.rings.{name}"))?,
                (None, Some(r)) => self.ring(r, &format!("{path}.ring"))?,
                (None, None) => return Err(input_error(format!("{path}.rings"), format!("no ring for point `{name}`"))),
            };
            rings.push(r);
        }
        let mut maps = Vec::new();
        for (k, r) in p.restrictions.iter().enumerate() {
            let at = format!("{path}.restrictions[{k}]");
            let (a, b) = (index(&poset, &r.from, &at)?, index(&poset, &r.to, &at)?);
            let h = RingHom::new(rings[a].clone(), rings[b].clone(), r.images.clone()).map_err(|e| input_error(&at, e))?;
            maps.push(((a, b), h));
        }
        for (a, b) in poset.hasse() {
            if !maps.iter().any(|((x, y), _)| (*x, *y) == (a, b)) {
                let at = format!("{path}.restrictions[{} -> {}]", poset.name(a), poset.name(b));
                maps.push(((a, b), default_hom(&rings[a], &rings[b], &at)?));
            }
        }
        RingedSpace::new(poset, rings, maps).map(Arc::new).map_err(|e| input_error(path, e))
    }

    fn map(&mut self, spec: &MapSpec, path: &str) -> Res<RingedMap> {
        match spec {
            MapSpec::Identity(space) => Ok(RingedMap::identity(self.space_named(space, path)?)),
            MapSpec::ToPoint { space, ring } => {
                let x = self.space_named(space, path)?;
                let k = self.ring(ring, &format!("{path}.ring"))?;
                let structure = x
                    .rings()
                    .iter()
                    .map(|r| default_hom(&k, r, path))
                    .collect::<Res<Vec<_>>>()?;
                RingedMap::to_point(x, k, structure).map_err(|e| input_error(path, e))
            }
            MapSpec::Inclusion { space, open, subspace } => {
                let x = self.space_named(space, path)?;
                let u = open.iter().map(|n| index(x.poset(), n, &format!("{path}.open"))).collect::<Res<Vec<_>>>()?;
                if self.ws.spaces.contains_key(subspace) || self.doc.spaces.contains_key(subspace) {
                    return Err(input_error(format!("{path}.subspace"), format!("space `{subspace}` already exists")));
                }
                let (sub, f) = RingedMap::open_inclusion(&x, &u).map_err(|e| input_error(path, e))?;
                self.ws.spaces.insert(subspace.clone(), sub);
                Ok(f)
            }
            MapSpec::General { source, target, points, comparison } => {
                let x = self.space_named(source, path)?;
                let y = self.space_named(target, path)?;
                for name in points.keys().chain(comparison.keys()) {
                    index(x.poset(), name, &format!("{path}.points"))?;
                }
                let mut image = Vec::new();
                let mut comp = Vec::new();
                for p in x.poset().points() {
                    let name = x.poset().name(p);
                    let at = format!("{path}.points.{name}");
                    let t = points.get(name).ok_or_else(|| input_error(&at, "point has no image"))?;
                    let q = index(y.poset(), t, &at)?;
                    image.push(q);
                    let at = format!("{path}.comparison.{name}");
                    comp.push(match comparison.get(name) {
                        Some(imgs) => RingHom::new(y.ring(q).clone(), x.ring(p).clone(), imgs.clone())
                            .map_err(|e| input_error(&at, e))?,
                        None => default_hom(y.ring(q), x.ring(p), &at)?,
                    });
                }
                RingedMap::new(x, y, image, comp).map_err(|e| input_error(path, e))
            }
        }
    }

    fn module(&self, ring: &Arc<FiniteRing>, spec: &ModuleSpec, path: &str) -> Res<Module> {
        let m = match spec {
            ModuleSpec::Free(0) => Module::zero(ring.clone()),
            ModuleSpec::Free(n) => Module::free(ring.clone(), *n),
            ModuleSpec::Quotient(gens) => Module::cyclic_quotient(ring.clone(), gens).map_err(|e| input_error(path, e))?,
            ModuleSpec::Group { orders, action } => {
                let d = orders.len();
                let mats =
                    action.iter().map(|a| matrix(a, d, d, &format!("{path}.action"))).collect::<Res<Vec<_>>>()?;
                Module::new(ring.clone(), orders.clone(), mats).map_err(|e| input_error(path, e))?
            }
        };
        Ok(m)
    }

    fn sheaf(&self, spec: &SheafSpec, path: &str) -> Res<Sheaf> {
        match spec {
            SheafSpec::Structure(space) => Ok(Sheaf::structure(self.space_named(space, path)?)),
            SheafSpec::Explicit { space, stalks, restrictions } => {
                let x = self.space_named(space, &format!("{path}.space"))?;
                let poset = x.poset();
                for name in stalks.keys() {
                    index(poset, name, &format!("{path}.stalks.{name}"))?;
                }
                let mut mods = Vec::new();
                for p in poset.points() {
                    let name = poset.name(p);
                    mods.push(match stalks.get(name) {
                        Some(s) => self.module(x.ring(p), s, &format!("{path}.stalks.{name}"))?,
                        None => Module::zero(x.ring(p).clone()),
                    });
                }
                let mut maps = Vec::new();
                for (k, r) in restrictions.iter().enumerate() {
                    let at = format!("{path}.restrictions[{k}]");
                    let (a, b) = (index(poset, &r.from, &at)?, index(poset, &r.to, &at)?);
                    maps.push(((a, b), matrix(&r.matrix, mods[b].dim(), mods[a].dim(), &at)?));
                }
                for (a, b) in poset.hasse() {
                    let given = maps.iter().any(|((x, y), _)| (*x, *y) == (a, b));
                    if !given && (mods[a].dim() == 0 || mods[b].dim() == 0) {
                        maps.push(((a, b), Mat::zeros(mods[b].dim(), mods[a].dim())));
                    }
                }
                Sheaf::new(x.clone(), mods, maps).map_err(|e| input_error(path, e))
            }
        }
    }

    fn complex(&self, spec: &ComplexSpec, path: &str) -> Res<Complex> {
        let terms = spec
            .terms
            .iter()
            .enumerate()
            .map(|(k, n)| {
                self.ws.sheaves.get(n).cloned().ok_or_else(|| input_error(format!("{path}.terms[{k}]"), format!("unknown sheaf `{n}`")))
            })
            .collect::<Res<Vec<_>>>()?;
        let Some(first) = terms.first() else {
            return Err(input_error(format!("{path}.terms"), "a complex needs at least one term"));
        };
        let space = first.space().clone();
        if spec.differentials.len() + 1 != terms.len() {
            return Err(input_error(format!("{path}.differentials"), "need one differential between consecutive terms"));
        }
        let mut diffs = Vec::new();
        for (k, d) in spec.differentials.iter().enumerate() {
            let at = format!("{path}.differentials[{k}]");
            let (s, t) = (&terms[k], &terms[k + 1]);
            if s.space() != &space || t.space() != &space {
                return Err(input_error(&at, "terms live on different spaces"));
            }
            for name in d.keys() {
                index(space.poset(), name, &at)?;
            }
            let comps = space
                .poset()
                .points()
                .map(|p| {
                    let name = space.poset().name(p);
                    let (r, c) = (t.stalk(p).dim(), s.stalk(p).dim());
                    d.get(name).map_or(Ok(Mat::zeros(r, c)), |m| matrix(m, r, c, &format!("{at}.{name}")))
                })
                .collect::<Res<Vec<_>>>()?;
            diffs.push(SheafMorphism::new(s.clone(), t.clone(), comps).map_err(|e| input_error(&at, e))?);
        }
        Complex::new(space, spec.lo, terms, diffs).map_err(|e| input_error(path, e))
    }
}

impl Workspace {
    pub fn object(&self, name: &str, path: &str) -> Res<Object> {
        if let Some(c) = self.complexes.get(name) {
            return Ok(Object::Complex(c.clone()));
        }
        self.sheaves
            .get(name)
            .map(|s| Object::Sheaf(s.clone()))
            .ok_or_else(|| input_error(path, format!("unknown sheaf or complex `{name}`")))
    }

    pub fn space(&self, name: &str, path: &str) -> Res<Arc<RingedSpace>> {
        self.spaces.get(name).cloned().ok_or_else(|| input_error(path, format!("unknown space `{name}`")))
    }

    pub fn map(&self, name: &str, path: &str) -> Res<&RingedMap> {
        self.maps.get(name).ok_or_else(|| input_error(path, format!("unknown map `{name}`")))
    }
}
