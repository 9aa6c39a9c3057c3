use std::sync::Arc;

use finsheaf::cxalg::Complex;
use finsheaf::derived::{duality_check, f_nabla, f_shriek, quasi_iso_failure};
use finsheaf::sheafmod::RingedMap;
use finsheaf::{fixtures, random, RingedSpace, Sheaf};

fn constant(x: &Arc<RingedSpace>) -> Arc<Complex> {
    Arc::new(Complex::single(Arc::new(Sheaf::structure(x.clone())), 0))
}

fn maps() -> Vec<(&'static str, RingedMap)> {
    let w = fixtures::wedge();
    let c = w.poset().points().last().unwrap();
    let (_, incl) = RingedMap::open_inclusion(&w, &w.poset().up_set(c)).unwrap();
    let (_, incl_a) = RingedMap::open_inclusion(&w, &w.poset().up_set(0)).unwrap();
    vec![
        ("id", RingedMap::identity(w.clone())),
        ("wedge->pt", fixtures::to_point(&w, fixtures::f2())),
        ("pc->pt", fixtures::to_point(&fixtures::pseudocircle(), fixtures::f2())),
        ("U_c", incl),
        ("U_a", incl_a),
    ]
}

#[test]
fn constant_coefficients() {
    for (name, f) in maps() {
        let (m, n) = (constant(&f.source), constant(&f.target));
        let r = duality_check(&f, &m, &n, (-2, 2), None).unwrap();
        println!("{name}: {:?}", r.degrees);
        assert!(r.pass, "{name}: {r:?}");
    }
}

#[test]
fn wedge_to_point_groups() {
    let f = &maps()[1].1;
    let r = duality_check(f, &constant(&f.source), &constant(&f.target), (-1, 1), None).unwrap();
    let got: Vec<Vec<u64>> = r.degrees.iter().map(|d| d.1.clone()).collect();
    assert_eq!(got, vec![vec![], vec![2], vec![]]);
}

#[test]
fn random_pairs() {
    let mut rng = random::rng(5);
    for (name, f) in maps() {
        for _ in 0..3 {
            let m = random::complex(&f.source, &mut rng).unwrap();
            let n = random::complex(&f.target, &mut rng).unwrap();
            let r = duality_check(&f, &m, &n, (-2, 2), None).unwrap();
            assert!(r.pass, "{name}: {r:?}");
        }
    }
}

#[test]
fn nabla_of_point_target() {
    let f = &maps()[1].1;
    let nb = f_nabla(f, &constant(&f.target)).unwrap();
    // f^{-0}: three co-skyscrapers, f^{-1}: two chains
    assert_eq!(nb.complex.lo(), -1);
    let top = f.source.poset().points().last().unwrap();
    assert_eq!(nb.complex.term(-1).stalk(top).size(), 4);
}

#[test]
fn shriek_of_identity_resolves() {
    let w = fixtures::wedge();
    let id = RingedMap::identity(w.clone());
    let n = constant(&w);
    let s = f_shriek(&id, &n, 4).unwrap();
    assert_eq!(s.window, (-1, 2));
    let inj = &s.resolution;
    assert_eq!(quasi_iso_failure(&inj.augmentation, Some(3)), None);
    for k in s.window.0..=s.window.1 {
        let (h, _) = s.nabla.complex.cohomology(k);
        let expect = if k == 0 { n.term(0).total_dim() } else { 0 };
        assert_eq!(h.total_dim(), expect, "degree {k}");
    }
}
