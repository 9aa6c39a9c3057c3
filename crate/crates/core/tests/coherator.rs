use std::sync::Arc;

use finsheaf::cxalg::{in_dqc, Complex};
use finsheaf::derived::{dqc_coherator, hom_derived, quasi_iso_failure};
use finsheaf::finring::{Module, DEFAULT_RING_CAP};
use finsheaf::{fixtures, random, Sheaf};

fn skyscraper_top_wedge() -> Arc<Complex> {
    let x = fixtures::wedge();
    let c = x.poset().index("c").unwrap();
    let stalks = x.poset().points().map(|p| if p == c { Module::regular(x.ring(p).clone()) } else { Module::zero(x.ring(p).clone()) }).collect();
    let (a, b) = (x.poset().index("a").unwrap(), x.poset().index("b").unwrap());
    let z = finsheaf::Mat::zeros(1, 0);
    let s = Sheaf::new(x.clone(), stalks, vec![((a, c), z.clone()), ((b, c), z)]).unwrap();
    Arc::new(Complex::single(Arc::new(s), 0))
}

fn check(n: &Arc<Complex>, seed: u64) {
    let co = dqc_coherator(n).unwrap();
    let c = &co.complex;
    let diffs = (c.lo()..c.hi()).map(|k| c.diff(k)).collect();
    Complex::new(c.space().clone(), c.lo(), c.terms().to_vec(), diffs).expect("d∘d = 0");
    assert!(in_dqc(&co.complex, DEFAULT_RING_CAP).unwrap());
    assert!(quasi_iso_failure(&co.resolution.augmentation, None).is_none());
    let x = n.space();
    let mut rng = random::rng(seed);
    for _ in 0..6 {
        let m = Arc::new(Complex::single(random::qcoh_sheaf(x, &mut rng).unwrap(), 0));
        for i in 0..=1 {
            let a = hom_derived(&m, &co.complex, (i, i), None).unwrap();
            let b = hom_derived(&m, n, (i, i), None).unwrap();
            assert_eq!(a.at(i), b.at(i), "degree {i}");
        }
    }
}

#[test]
fn wedge_skyscraper_is_glued_from_both_minimal_points() {
    let n = skyscraper_top_wedge();
    let co = dqc_coherator(&n).unwrap();
    assert_eq!(co.cover.len(), 3);
    check(&n, 5);
}

#[test]
fn wedge_random_complexes() {
    let x = fixtures::wedge();
    let mut rng = random::rng(17);
    for k in 0..3 {
        let n = random::complex(&x, &mut rng).unwrap();
        check(&n, 100 + k);
    }
}

#[test]
fn pseudocircle_is_refused() {
    let x = fixtures::pseudocircle();
    let n = Arc::new(Complex::single(Arc::new(Sheaf::structure(x)), 0));
    assert!(dqc_coherator(&n).is_err());
}

#[test]
fn minimum_uses_the_direct_formula() {
    let x = fixtures::flat();
    let mut rng = random::rng(2);
    let n = random::complex(&x, &mut rng).unwrap();
    let co = dqc_coherator(&n).unwrap();
    assert_eq!(co.cover.len(), 1);
    assert!(co.counit.is_quasi_iso() || !n.has_qc_cohomology().unwrap());
    check(&n, 9);
}
