//! Task execution and reports.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use finsheaf::cxalg::{in_dqc, Complex};
use finsheaf::derived::{
    bn_check, classify, dqc_coherator, duality_check, f_shriek, flat_qcoh_res_with, gamma_derived, hom_derived,
    min_depth, pseudo_cech, push_derived, qc, qc_derived, quasi_iso_failure, rqc_push, standard_sheaf,
};
use finsheaf::finring::DEFAULT_RING_CAP;
use finsheaf::poset::{covering_model, face_poset};
use finsheaf::{random, Error, FiniteRing, Poset, RingedMap, RingedSpace, Sheaf};

use crate::document::TaskSpec;
use crate::workspace::{input_error, InputError, Object, Workspace};

pub const TASKS: [&str; 12] = [
    "classify",
    "cohomology",
    "push",
    "qc",
    "rqc-push",
    "bn-check",
    "shriek",
    "duality-check",
    "dqc-coherator",
    "flat-res",
    "model",
    "verify-suite",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub index: usize,
    pub task: String,
    pub subject: String,
    pub status: Status,
    pub lines: Vec<String>,
    pub data: Value,
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub seed: u64,
    pub depth: Option<i64>,
}

struct Ctx<'a> {
    ws: &'a Workspace,
    task: &'a TaskSpec,
    path: String,
    opts: Options,
}

type Res<T> = Result<T, InputError>;

/// What a task produced: `Ok` for a report, `Err` for a computation failure
/// (reported as FAIL with its reason).
type Outcome = Result<(Status, Vec<String>, Value), Error>;

fn inv(v: &[u64]) -> String {
    format!("{v:?}")
}

fn names(p: &Poset, set: &[usize]) -> Vec<String> {
    set.iter().map(|&x| p.name(x).to_string()).collect()
}

fn verdict(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::Fail
    }
}

impl Ctx<'_> {
    fn need<'b>(&self, v: &'b Option<String>, field: &str) -> Res<&'b str> {
        v.as_deref().ok_or_else(|| input_error(&self.path, format!("task needs `{field}`")))
    }

    fn object(&self) -> Res<Object> {
        let name = self.need(&self.task.object, "object")?;
        self.ws.object(name, &format!("{}.object", self.path))
    }

    fn sheaf(&self) -> Res<Arc<Sheaf>> {
        match self.object()? {
            Object::Sheaf(s) => Ok(s),
            Object::Complex(_) => Err(input_error(format!("{}.object", self.path), "this task needs a sheaf")),
        }
    }

    fn map(&self) -> Res<&RingedMap> {
        let name = self.need(&self.task.map, "map")?;
        self.ws.map(name, &format!("{}.map", self.path))
    }

    fn space(&self) -> Res<Arc<RingedSpace>> {
        if let Some(name) = &self.task.space {
            return self.ws.space(name, &format!("{}.space", self.path));
        }
        Ok(self.object()?.space().clone())
    }

    fn on(&self, o: &Object, x: &Arc<RingedSpace>, field: &str) -> Res<()> {
        if o.space() != x {
            return Err(input_error(format!("{}.{field}", self.path), "object lives on the wrong space"));
        }
        Ok(())
    }

    fn seed(&self, salt: u64) -> u64 {
        self.opts.seed ^ (self.path.len() as u64) << 32 ^ salt
    }
}

/// Runs one task. Input problems are returned as errors; computation
/// failures become FAIL reports.
pub fn run(ws: &Workspace, task: &TaskSpec, index: usize, opts: Options) -> Res<Report> {
    let ctx = Ctx { ws, task, path: format!("tasks[{index}]"), opts };
    let subject = [&task.object, &task.map, &task.space, &task.source].into_iter().find_map(|v| v.clone()).unwrap_or_default();
    let outcome = match task.task.as_str() {
        "classify" => classify_task(&ctx)?,
        "cohomology" => cohomology_task(&ctx)?,
        "push" => push_task(&ctx)?,
        "qc" => qc_task(&ctx)?,
        "rqc-push" => rqc_push_task(&ctx)?,
        "bn-check" => bn_task(&ctx)?,
        "shriek" => shriek_task(&ctx)?,
        "duality-check" => duality_task(&ctx)?,
        "dqc-coherator" => coherator_task(&ctx)?,
        "flat-res" => flat_task(&ctx)?,
        "model" => model_task(&ctx)?,
        "verify-suite" => suite_task(&ctx)?,
        other => {
            return Err(input_error(
                format!("{}.task", ctx.path),
                format!("unknown task `{other}`; expected one of {}", TASKS.join(", ")),
            ))
        }
    };
    let (status, lines, data) = outcome.unwrap_or_else(|e| (Status::Fail, vec![format!("error: {e}")], json!({ "error": e.to_string() })));
    Ok(Report { index, task: task.task.clone(), subject, status, lines, data })
}

fn classify_task(c: &Ctx) -> Res<Outcome> {
    let x = c.space()?;
    Ok((|| {
        let k = classify(&x)?;
        let p = x.poset();
        let mut lines = vec![format!("finite_space = {}", k.finite_space)];
        if let Some((a, b)) = k.flat_failure {
            lines.push(format!("  O_{} -> O_{} is not flat", p.name(a), p.name(b)));
        }
        lines.push(format!("semi_separated = {}", k.semi_separated));
        if let Some(f) = &k.separation_failure {
            lines.push(format!("  {}", f.describe(p)));
        }
        lines.push(format!("schematic = {}", k.schematic));
        if let Some(f) = &k.schematic_failure {
            lines.push(format!("  {}", f.describe(p)));
        }
        let data = json!({
            "finite_space": k.finite_space,
            "semi_separated": k.semi_separated,
            "schematic": k.schematic,
            "flat_failure": k.flat_failure.map(|(a, b)| [p.name(a), p.name(b)]),
        });
        Ok((Status::Info, lines, data))
    })())
}

fn cohomology_lines(m: &Complex) -> Result<(Vec<String>, Value), Error> {
    let g = gamma_derived(m)?;
    let mut lines = Vec::new();
    let mut table = serde_json::Map::new();
    if !m.is_empty() {
        let top = m.hi() + m.space().poset().dimension()? as i64;
        for i in m.lo()..=top {
            let h = g.cohomology_invariants(i);
            lines.push(format!("H^{i} = {}", inv(&h)));
            table.insert(i.to_string(), json!(h));
        }
    }
    Ok((lines, Value::Object(table)))
}

fn cohomology_task(c: &Ctx) -> Res<Outcome> {
    let m = c.object()?.complex();
    Ok(cohomology_lines(&m).map(|(l, d)| (Status::Info, l, json!({ "cohomology": d }))))
}

fn stalk_table(m: &Complex) -> (Vec<String>, Value) {
    let p = m.space().poset();
    let mut lines = Vec::new();
    let mut data = serde_json::Map::new();
    for y in p.points() {
        let mut row = serde_json::Map::new();
        if !m.is_empty() {
            for i in m.lo()..=m.hi() {
                let h = m.stalk_cohomology(i, y).orders.clone();
                let h = finsheaf::group::invariant_factors(&h);
                if !h.is_empty() {
                    lines.push(format!("{}: H^{i} = {}", p.name(y), inv(&h)));
                    row.insert(i.to_string(), json!(h));
                }
            }
        }
        data.insert(p.name(y).to_string(), Value::Object(row));
    }
    (lines, Value::Object(data))
}

fn push_task(c: &Ctx) -> Res<Outcome> {
    let f = c.map()?;
    let m = c.object()?;
    c.on(&m, &f.source, "object")?;
    Ok(push_derived(f, &m.complex()).map(|p| {
        let (lines, data) = stalk_table(&p);
        (Status::Info, lines, json!({ "stalks": data }))
    }))
}

fn qc_task(c: &Ctx) -> Res<Outcome> {
    match c.object()? {
        Object::Sheaf(n) => Ok(qc(&n).map(|q| {
            let p = n.space().poset();
            let mut lines: Vec<String> = p
                .points()
                .map(|x| format!("Qc(N)_{} = {}", p.name(x), inv(&q.sheaf.stalk(x).abelian_invariants())))
                .collect();
            let iso = q.counit.is_iso();
            lines.push(format!("counit Qc(N) -> N is an isomorphism: {iso}"));
            (Status::Info, lines, json!({ "counit_iso": iso }))
        })),
        Object::Complex(m) => Ok(qc_derived(&m).map(|d| {
            let (mut lines, data) = stalk_table(&d.complex);
            let q = d.counit.is_quasi_iso();
            lines.push(format!("counit RQc(M) -> M is a quasi-isomorphism: {q}"));
            (Status::Info, lines, json!({ "stalks": data, "counit_quasi_iso": q }))
        })),
    }
}

fn rqc_push_task(c: &Ctx) -> Res<Outcome> {
    let f = c.map()?;
    let m = c.object()?;
    c.on(&m, &f.source, "object")?;
    Ok(rqc_push(f, &m.complex()).map(|r| {
        let (mut lines, data) = stalk_table(&r.complex);
        lines.push(format!("R_qc f_* M -> R f_* M is a quasi-isomorphism: {}", r.quasi_iso));
        (verdict(r.quasi_iso), lines, json!({ "stalks": data, "quasi_iso": r.quasi_iso }))
    }))
}

fn bn_task(c: &Ctx) -> Res<Outcome> {
    let m = c.object()?.complex();
    Ok(bn_check(&m).map(|r| {
        let p = m.space().poset();
        let mut lines = vec![format!("Qc(C M) -> C M quasi-isomorphism: {}", r.counit_quasi_iso)];
        match r.unit_quasi_iso {
            Some(u) => lines.push(format!("M -> Qc(C M) quasi-isomorphism: {u}")),
            None => lines.push("M is not degreewise quasi-coherent; unit not checked".into()),
        }
        if let Some((which, k, x)) = r.failure {
            lines.push(format!("first failure: {which} in degree {k} at {}", p.name(x)));
        }
        (verdict(r.pass), lines, json!({ "counit": r.counit_quasi_iso, "unit": r.unit_quasi_iso }))
    }))
}

fn shriek_task(c: &Ctx) -> Res<Outcome> {
    let f = c.map()?;
    let n = c.object()?;
    c.on(&n, &f.target, "object")?;
    let n = n.complex();
    Ok((|| {
        let depth = match c.task.depth.or(c.opts.depth) {
            Some(d) => d,
            None => min_depth(&n)? + 3,
        };
        let s = f_shriek(f, &n, depth)?;
        let p = f.source.poset();
        let mut lines = vec![format!("certified degrees [{}, {}] at depth {depth}", s.window.0, s.window.1)];
        let mut data = serde_json::Map::new();
        for k in s.window.0..=s.window.1 {
            for x in p.points() {
                let h = finsheaf::group::invariant_factors(&s.nabla.complex.stalk_cohomology(k, x).orders);
                if !h.is_empty() {
                    lines.push(format!("{}: H^{k} = {}", p.name(x), inv(&h)));
                }
                data.insert(format!("{}@{k}", p.name(x)), json!(h));
            }
        }
        Ok((Status::Info, lines, json!({ "window": s.window, "stalks": data })))
    })())
}

fn duality_task(c: &Ctx) -> Res<Outcome> {
    let f = c.map()?;
    let m = c.ws.object(c.need(&c.task.source, "source")?, &format!("{}.source", c.path))?;
    let n = c.ws.object(c.need(&c.task.target, "target")?, &format!("{}.target", c.path))?;
    c.on(&m, &f.source, "source")?;
    c.on(&n, &f.target, "target")?;
    let window = c.task.window.unwrap_or((-2, 2));
    if window.0 > window.1 {
        return Err(input_error(format!("{}.window", c.path), "empty window"));
    }
    let depth = c.task.depth.or(c.opts.depth);
    Ok(duality_check(f, &m.complex(), &n.complex(), window, depth).map(|r| {
        let mut lines: Vec<String> = r
            .degrees
            .iter()
            .map(|(i, y, x)| format!("i = {i}: Hom(Rf_* M, N[i]) = {}, Hom(M, f^! N[i]) = {}", inv(y), inv(x)))
            .collect();
        lines.push(format!("transported map: chain iso {}, cohomology iso {}", r.chain_iso, r.cohomology_iso));
        let degrees: Vec<Value> = r.degrees.iter().map(|(i, y, x)| json!({ "i": i, "y": y, "x": x })).collect();
        (verdict(r.pass), lines, json!({ "depth": r.depth, "degrees": degrees }))
    }))
}

fn coherator_task(c: &Ctx) -> Res<Outcome> {
    let n = c.object()?.complex();
    let samples = c.task.samples.unwrap_or(10);
    let seed = c.seed(7);
    Ok((|| {
        let co = dqc_coherator(&n)?;
        let p = n.space().poset();
        let dqc = in_dqc(&co.complex, DEFAULT_RING_CAP)?;
        let cover: Vec<Vec<String>> = co.cover.iter().map(|s| names(p, s)).collect();
        let mut lines = vec![format!("cover by minimal points: {cover:?}"), format!("coherator in D_qc: {dqc}")];
        let mut rng = random::rng(seed);
        let mut agree = 0;
        for _ in 0..samples {
            let m = Arc::new(Complex::single(random::qcoh_sheaf(n.space(), &mut rng)?, 0));
            let a = hom_derived(&m, &co.complex, (0, 1), None)?;
            let b = hom_derived(&m, &n, (0, 1), None)?;
            agree += usize::from((0..=1).all(|i| a.at(i) == b.at(i)));
        }
        lines.push(format!("Hom_D(M, -) agrees in degrees 0..1 for {agree}/{samples} quasi-coherent M"));
        let pass = dqc && agree == samples;
        Ok((verdict(pass), lines, json!({ "in_dqc": dqc, "agree": agree, "samples": samples })))
    })())
}

fn flat_task(c: &Ctx) -> Res<Outcome> {
    let m = c.sheaf()?;
    let steps = c.task.steps.unwrap_or(3);
    Ok((|| {
        let r = flat_qcoh_res_with(&m, steps)?;
        let cx = &r.resolution.complex;
        let p = m.space().poset();
        let mut lines = Vec::new();
        let mut terms_ok = true;
        for (k, t) in cx.terms().iter().enumerate() {
            let deg = cx.lo() + k as i64;
            terms_ok &= t.is_quasicoherent()? && t.has_flat_stalks(DEFAULT_RING_CAP)?;
            let stalks: Vec<String> =
                p.points().map(|x| format!("{}: {}", p.name(x), inv(&t.stalk(x).abelian_invariants()))).collect();
            lines.push(format!("F^{deg}: {}", stalks.join(", ")));
        }
        let fail = quasi_iso_failure(&r.resolution.augmentation, None);
        let aug_ok = match fail {
            None => true,
            Some((d, _)) => !r.exact && d == cx.lo(),
        };
        lines.push(format!("terms quasi-coherent and flat: {terms_ok}"));
        if r.exact {
            lines.push(format!("exact: augmentation is a quasi-isomorphism: {}", fail.is_none()));
        } else {
            lines.push(format!("truncated after {steps} covers: the kernel below is not flat"));
            lines.push(format!("augmentation is a quasi-isomorphism above the bottom degree: {aug_ok}"));
        }
        Ok((verdict(terms_ok && aug_ok), lines, json!({ "length": cx.len(), "exact": r.exact })))
    })())
}

fn model_task(c: &Ctx) -> Res<Outcome> {
    if let Some(simplices) = &c.task.simplices {
        let fp = face_poset(simplices).map_err(|e| input_error(format!("{}.simplices", c.path), e))?;
        return Ok(simplicial_report(fp));
    }
    let sets = c
        .task
        .covering
        .as_ref()
        .ok_or_else(|| input_error(&c.path, "task needs `simplices` or `covering`"))?;
    let x = c.space()?;
    let p = x.poset().clone();
    let covering = sets
        .iter()
        .enumerate()
        .map(|(k, s)| {
            s.iter().map(|n| p.index(n).map_err(|e| input_error(format!("{}.covering[{k}]", c.path), e))).collect()
        })
        .collect::<Res<Vec<Vec<usize>>>>()?;
    Ok(covering_model(&p, &covering).map(|(model, pi)| {
        let mut lines = vec![format!("{} points -> {} points", p.len(), model.len())];
        for t in model.points() {
            let fibre: Vec<usize> = p.points().filter(|&s| pi.apply(s) == t).collect();
            lines.push(format!("{} <- {:?}", model.name(t), names(&p, &fibre)));
        }
        let hasse: Vec<[&str; 2]> = model.hasse().iter().map(|&(a, b)| [model.name(a), model.name(b)]).collect();
        lines.push(format!("order: {hasse:?}"));
        (Status::Info, lines, json!({ "points": model.names(), "order": hasse }))
    }))
}

/// Face poset with constant `F_2` and its cohomology.
pub fn simplicial_report(fp: Poset) -> Outcome {
    let n = fp.len();
    let x = Arc::new(RingedSpace::constant(Arc::new(fp), Arc::new(FiniteRing::cyclic(2))));
    let o = Arc::new(Complex::single(Arc::new(Sheaf::structure(x.clone())), 0));
    let (coh, table) = cohomology_lines(&o)?;
    let mut lines = vec![format!("face poset: {n} points, dimension {}", x.poset().dimension()?)];
    lines.extend(coh.into_iter().map(|l| format!("{l} (constant F_2)")));
    Ok((Status::Info, lines, json!({ "points": x.poset().names(), "cohomology": table })))
}

fn suite_task(c: &Ctx) -> Res<Outcome> {
    let x = c.space()?;
    let samples = c.task.samples.unwrap_or(10);
    let seed = c.seed(11);
    Ok((|| {
        let k = classify(&x)?;
        let mut rng = random::rng(seed);
        let mut lines = Vec::new();
        let mut pass = true;
        let mut record = |name: &str, ok: usize, total: usize, lines: &mut Vec<String>| {
            pass &= ok == total;
            lines.push(format!("{name}: {ok}/{total}"));
        };
        let mut ok = 0;
        for _ in 0..samples {
            let m = random::sheaf(&x, &mut rng)?;
            ok += usize::from(standard_sheaf(&m)?.augmentation.is_quasi_iso());
        }
        record("M -> C M quasi-isomorphism", ok, samples, &mut lines);
        if k.semi_separated {
            let (mut cech, mut bn, mut rqc, mut flat) = (0, 0, 0, 0);
            for _ in 0..samples {
                let m = random::qcoh_sheaf(&x, &mut rng)?;
                let single = Arc::new(Complex::single(m.clone(), 0));
                cech += usize::from(pseudo_cech(&single)?.augmentation.is_quasi_iso());
                let cx = random::qcoh_complex(&x, &mut rng)?;
                bn += usize::from(bn_check(&cx)?.pass);
                rqc += usize::from(qc_derived(&cx)?.counit.is_quasi_iso());
                let r = flat_qcoh_res_with(&m, 2)?;
                let fail = quasi_iso_failure(&r.resolution.augmentation, None);
                let terms = r.resolution.complex.terms().iter().all(|t| t.has_flat_stalks(DEFAULT_RING_CAP).unwrap_or(false));
                flat += usize::from(terms && fail.map_or(true, |(d, _)| !r.exact && d == r.resolution.complex.lo()));
            }
            record("M -> Č M quasi-isomorphism (qcoh M)", cech, samples, &mut lines);
            record("bn-check on quasi-coherent complexes", bn, samples, &mut lines);
            record("RQc(M) -> M quasi-isomorphism", rqc, samples, &mut lines);
            record("flat resolutions", flat, samples, &mut lines);
        } else {
            lines.push("space is not semi-separated; quasi-coherent checks skipped".into());
        }
        Ok((verdict(pass), lines, json!({ "seed": seed, "samples": samples })))
    })())
}
