use std::sync::Arc;

use finsheaf::cxalg::Complex;
use finsheaf::derived::{bn_check, pseudo_cech, qc, qc_derived, qc_to_cech, rqc_push, standard_sheaf};
use finsheaf::finring::Module;
use finsheaf::sheafmod::SheafHom;
use finsheaf::{fixtures, random, FiniteRing, Sheaf};

fn skyscraper_top_flat() -> Arc<Sheaf> {
    let x = fixtures::flat();
    let stalks = vec![Module::zero(x.ring(0).clone()), Module::regular(x.ring(1).clone())];
    Arc::new(Sheaf::new(x, stalks, vec![((0, 1), finsheaf::Mat::zeros(1, 0))]).unwrap())
}

#[test]
fn qc_of_qcoh_is_identity() {
    let mut rng = random::rng(7);
    for x in [fixtures::wedge(), fixtures::flat(), fixtures::flat_z4()] {
        for _ in 0..5 {
            let n = random::qcoh_sheaf(&x, &mut rng).unwrap();
            let q = qc(&n).unwrap();
            assert!(q.counit.is_iso());
        }
    }
}

#[test]
fn qc_adjunction_counts() {
    let n = skyscraper_top_flat();
    assert!(!n.is_quasicoherent().unwrap());
    let q = qc(&n).unwrap();
    assert!(q.sheaf.is_quasicoherent().unwrap());
    let x = fixtures::flat();
    let mut rng = random::rng(11);
    for _ in 0..20 {
        let m = random::qcoh_sheaf(&x, &mut rng).unwrap();
        let a = SheafHom::new(&m, &q.sheaf).unwrap().size();
        let b = SheafHom::new(&m, &n).unwrap().size();
        assert_eq!(a, b);
    }
}

#[test]
fn derived_qc_and_bn() {
    let mut rng = random::rng(3);
    for x in [fixtures::wedge(), fixtures::flat()] {
        for _ in 0..4 {
            let m = random::qcoh_complex(&x, &mut rng).unwrap();
            let d = qc_derived(&m).unwrap();
            assert!(d.counit.is_quasi_iso());
            let r = bn_check(&m).unwrap();
            assert!(r.pass, "{:?}", r.failure);
            assert_eq!(r.unit_quasi_iso, Some(true));
        }
    }
    // a D_qc complex whose terms are not quasi-coherent
    let x = fixtures::flat();
    let o = Arc::new(Sheaf::structure(x.clone()));
    let c = standard_sheaf(&o).unwrap().complex;
    let r = bn_check(&c).unwrap();
    assert!(r.pass && r.unit_quasi_iso.is_none());
}

#[test]
fn qc_of_standard_is_cech() {
    let mut rng = random::rng(5);
    for x in [fixtures::wedge(), fixtures::flat()] {
        let m = Arc::new(Complex::single(random::qcoh_sheaf(&x, &mut rng).unwrap(), 0));
        let phi = qc_to_cech(&m).unwrap();
        for n in phi.source.lo()..=phi.source.hi() {
            assert!(phi.comp(n).is_iso());
        }
        assert!(pseudo_cech(&m).unwrap().augmentation.is_quasi_iso());
    }
}

#[test]
fn rqc_matches_push() {
    let o = Arc::new(Complex::single(Arc::new(Sheaf::structure(fixtures::wedge())), 0));
    let r = rqc_push(&fixtures::to_point(&fixtures::wedge(), fixtures::f2()), &o).unwrap();
    assert!(r.quasi_iso);
    let h: Vec<Vec<u64>> = (0..=1).map(|i| r.complex.stalk_groups(0).cohomology_invariants(i)).collect();
    assert_eq!(h, vec![vec![2], vec![]]);
    let flat = fixtures::flat();
    let o = Arc::new(Complex::single(Arc::new(Sheaf::structure(flat.clone())), 0));
    let z6 = Arc::new(FiniteRing::cyclic(6));
    assert!(rqc_push(&fixtures::to_point(&flat, z6), &o).unwrap().quasi_iso);
}
