mod common;

use std::sync::Arc;

use proptest::prelude::*;

use finsheaf::cxalg::Complex;
use finsheaf::derived::{pseudo_cech, qc, qc_derived, qc_to_cech, sheaf_cohomology, standard_sheaf};
use finsheaf::sheafmod::SheafHom;
use finsheaf::{fixtures, random, RingedSpace, Sheaf};

fn all_fixtures() -> Vec<Arc<RingedSpace>> {
    vec![
        fixtures::point_z4(),
        fixtures::arrow(),
        fixtures::flat(),
        fixtures::flat_z4(),
        fixtures::wedge(),
        fixtures::pseudocircle(),
    ]
}

fn semi_separated() -> Vec<Arc<RingedSpace>> {
    vec![fixtures::point_z4(), fixtures::flat(), fixtures::flat_z4(), fixtures::wedge()]
}

#[test]
fn order_complex_oracle() {
    assert_eq!(common::order_complex_betti(&fixtures::pseudocircle_poset()), vec![1, 1]);
    assert_eq!(common::order_complex_betti(&fixtures::sphere_poset()), vec![1, 0, 1]);
    for (x, p) in [(fixtures::pseudocircle(), fixtures::pseudocircle_poset()), (fixtures::sphere(), fixtures::sphere_poset())] {
        let h = sheaf_cohomology(&Arc::new(Sheaf::structure(x))).unwrap();
        let dims: Vec<usize> = h.iter().map(Vec::len).collect();
        assert_eq!(dims, common::order_complex_betti(&p));
    }
}

#[test]
fn cech_stalk_on_wedge() {
    let x = fixtures::wedge();
    let o = Arc::new(Complex::single(Arc::new(Sheaf::structure(x.clone())), 0));
    let c = pseudo_cech(&o).unwrap();
    let top = x.poset().index("c").unwrap();
    assert_eq!(c.complex.term(0).stalk(top).orders(), &[2, 2, 2]);
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(24) })]

    #[test]
    fn standard_resolution_is_flasque(seed in any::<u64>(), which in 0usize..6) {
        let x = all_fixtures()[which].clone();
        let mut rng = random::rng(seed);
        let m = random::sheaf(&x, &mut rng).unwrap();
        let r = standard_sheaf(&m).unwrap();
        prop_assert!(r.augmentation.is_quasi_iso());
        let dim = x.poset().dimension().unwrap();
        for i in 0..=dim {
            prop_assert!(common::standard_term_is_flasque(r.complex.term(i as i64), &m, i));
        }
        prop_assert!(r.complex.term(dim as i64 + 1).is_zero());
    }

    #[test]
    fn cech_resolves_qcoh(seed in any::<u64>(), which in 0usize..4) {
        let x = semi_separated()[which].clone();
        let mut rng = random::rng(seed);
        let m = random::qcoh_sheaf(&x, &mut rng).unwrap();
        let r = pseudo_cech(&Arc::new(Complex::single(m, 0))).unwrap();
        prop_assert!(r.augmentation.is_quasi_iso());
        for t in r.complex.terms() {
            let h = sheaf_cohomology(t).unwrap();
            prop_assert!(h.iter().skip(1).all(Vec::is_empty));
        }
    }

    #[test]
    fn hom_into_cech_is_local(seed in any::<u64>(), which in 0usize..6) {
        let x = all_fixtures()[which].clone();
        let mut rng = random::rng(seed);
        let m = random::sheaf(&x, &mut rng).unwrap();
        let n = random::sheaf(&x, &mut rng).unwrap();
        let c = pseudo_cech(&Arc::new(Complex::single(m.clone(), 0))).unwrap();
        for i in 0..=x.poset().dimension().unwrap() {
            let lhs = SheafHom::new(&n, c.complex.term(i as i64)).unwrap().size();
            prop_assert_eq!(lhs, common::local_hom_product(&n, &m, i));
        }
    }

    #[test]
    fn hom_from_qcoh_into_standard(seed in any::<u64>(), which in 0usize..4) {
        let x = semi_separated()[which].clone();
        let mut rng = random::rng(seed);
        let m = random::sheaf(&x, &mut rng).unwrap();
        let n = random::qcoh_sheaf(&x, &mut rng).unwrap();
        let r = standard_sheaf(&m).unwrap();
        for i in 0..=x.poset().dimension().unwrap() {
            let (a, b, inj) = common::standard_hom_map(&n, &m, r.complex.term(i as i64), i);
            prop_assert!(inj);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn qc_of_standard_terms(seed in any::<u64>(), which in 0usize..4) {
        let x = semi_separated()[which].clone();
        let mut rng = random::rng(seed);
        let m = random::qcoh_sheaf(&x, &mut rng).unwrap();
        let single = Arc::new(Complex::single(m.clone(), 0));
        let d = qc_derived(&single).unwrap();
        let r = standard_sheaf(&m).unwrap();
        let to_cech = qc_to_cech(&single).unwrap();
        let t = random::qcoh_sheaf(&x, &mut rng).unwrap();
        for i in 0..=x.poset().dimension().unwrap() as i64 {
            // product formula against the kernel formula applied to C^i M
            let k = qc(r.complex.term(i)).unwrap().sheaf;
            let f = d.complex.term(i);
            for p in x.poset().points() {
                prop_assert_eq!(k.stalk(p).abelian_invariants(), f.stalk(p).abelian_invariants());
            }
            prop_assert_eq!(SheafHom::new(&t, &k).unwrap().size(), SheafHom::new(&t, f).unwrap().size());
            prop_assert!(to_cech.comp(i).is_iso());
        }
    }

    #[test]
    fn standard_of_pointwise_injective_is_injective(seed in any::<u64>(), which in 0usize..3) {
        let x = [fixtures::wedge(), fixtures::pseudocircle(), fixtures::sphere()][which].clone();
        let mut rng = random::rng(seed);
        // every F_2-module is injective
        let m = random::sheaf(&x, &mut rng).unwrap();
        let r = standard_sheaf(&m).unwrap();
        let b = random::sheaf(&x, &mut rng).unwrap();
        let a = random::sheaf(&x, &mut rng).unwrap();
        let g = random::morphism(&a, &b, &mut rng).unwrap();
        let (_, incl) = g.image();
        for t in r.complex.terms() {
            prop_assert!(common::extends_along(&incl, t));
        }
    }

    #[test]
    fn qc_of_flat_standard_is_flat(seed in any::<u64>(), which in 0usize..4) {
        let x = semi_separated()[which].clone();
        let mut rng = random::rng(seed);
        let m = random::qcoh_sheaf(&x, &mut rng).unwrap();
        prop_assume!(m.has_flat_stalks(finsheaf::finring::DEFAULT_RING_CAP).unwrap());
        let d = qc_derived(&Arc::new(Complex::single(m, 0))).unwrap();
        prop_assert!(common::flat_terms(&d.complex));
    }

    #[test]
    fn pushed_flat_tilde_is_flat(seed in any::<u64>(), which in 0usize..4) {
        let x = semi_separated()[which].clone();
        let mut rng = random::rng(seed);
        for p in x.poset().points() {
            let a = random::module(x.ring(p), &mut rng);
            if finsheaf::finring::is_flat(&a, finsheaf::finring::DEFAULT_RING_CAP).unwrap() {
                let t = random::pushed_tilde(&x, p, &a).unwrap();
                prop_assert!(t.has_flat_stalks(finsheaf::finring::DEFAULT_RING_CAP).unwrap());
            }
        }
    }
}
