use std::sync::Arc;

use finsheaf::cxalg::Complex;
use finsheaf::derived::{hom_derived, inj_res, quasi_iso_failure};
use finsheaf::finring::{character_module, Module};
use finsheaf::sheafmod::co_skyscraper;
use finsheaf::{fixtures, random, Error, FiniteRing, RingedSpace, Sheaf};

fn point_module(x: &Arc<RingedSpace>, m: Module) -> Arc<Complex> {
    let s = Arc::new(Sheaf::new(x.clone(), vec![m], vec![]).unwrap());
    Arc::new(Complex::single(s, 0))
}

fn z4_quotient(x: &Arc<RingedSpace>, a: i64) -> Arc<Complex> {
    point_module(x, Module::cyclic_quotient(x.ring(0).clone(), &[vec![a]]).unwrap())
}

#[test]
fn field_is_its_own_resolution() {
    let x = Arc::new(RingedSpace::point(Arc::new(FiniteRing::cyclic(2))));
    let m = point_module(&x, Module::regular(x.ring(0).clone()));
    let r = inj_res(&m, 1).unwrap();
    assert_eq!(r.complex.len(), 1);
    assert!(r.augmentation.comp(0).is_iso());
}

#[test]
fn injective_sheaf_has_length_zero() {
    let x = fixtures::wedge();
    let c = x.poset().points().last().unwrap();
    let e = character_module(&Module::regular(x.ring(c).clone()));
    let s = Arc::new(co_skyscraper(&x, c, &e).unwrap());
    let r = inj_res(&Arc::new(Complex::single(s, 0)), 2).unwrap();
    assert_eq!(r.complex.len(), 1);
    assert!(r.augmentation.comp(0).is_iso());
}

#[test]
fn depth_below_minimum_is_rejected() {
    let x = fixtures::flat();
    let o = Arc::new(Complex::single(Arc::new(Sheaf::structure(x)), 0));
    assert!(matches!(inj_res(&o, 1), Err(Error::DepthTooSmall { given: 1, min: 2 })));
}

#[test]
fn structure_sheaf_on_flat() {
    let x = fixtures::flat();
    let o = Arc::new(Complex::single(Arc::new(Sheaf::structure(x)), 0));
    let r = inj_res(&o, 4).unwrap();
    assert!(r.complex.hi() <= 4);
    assert_eq!(quasi_iso_failure(&r.augmentation, Some(3)), None);
}

#[test]
fn random_complexes_resolve() {
    let mut rng = random::rng(11);
    for x in [fixtures::wedge(), fixtures::pseudocircle(), fixtures::arrow()] {
        for _ in 0..4 {
            let m = random::complex(&x, &mut rng).unwrap();
            let d = m.hi() + 3;
            let r = inj_res(&m, d).unwrap();
            assert_eq!(quasi_iso_failure(&r.augmentation, Some(d - 1)), None);
        }
    }
}

#[test]
fn ext_over_z4() {
    let x = fixtures::point_z4();
    let (half, full) = (z4_quotient(&x, 2), z4_quotient(&x, 0));
    // 0 <- Z/2 <- Z/4 <-2- Z/4 <-2- ...: Ext^i(Z/2, N) = ker 2 / im 2 on N for i ≥ 1
    let h = hom_derived(&half, &half, (0, 3), None).unwrap();
    for i in 0..=3 {
        assert_eq!(h.at(i), &[2]);
    }
    let h = hom_derived(&half, &full, (0, 2), None).unwrap();
    assert_eq!(h.at(0), &[2]);
    assert!(h.at(1).is_empty() && h.at(2).is_empty());
    let h = hom_derived(&full, &half, (0, 2), None).unwrap();
    assert_eq!(h.at(0), &[2]);
    assert!(h.at(1).is_empty());
}

#[test]
fn window_beyond_depth_is_refused() {
    let x = fixtures::point_z4();
    let m = z4_quotient(&x, 2);
    assert!(matches!(hom_derived(&m, &m, (0, 3), Some(3)), Err(Error::WindowUnreliable { hi: 3, rhi: 2, .. })));
}

#[test]
fn far_apart_degrees_give_zero() {
    let x = fixtures::point_z4();
    let m = z4_quotient(&x, 2);
    let shifted = Arc::new(m.shift(5));
    let h = hom_derived(&shifted, &m, (-3, 0), None).unwrap();
    assert!(h.groups.iter().all(|(_, g)| g.is_empty()));
}
