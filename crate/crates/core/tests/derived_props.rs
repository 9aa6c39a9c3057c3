use std::sync::Arc;

use proptest::prelude::*;

use finsheaf::cxalg::{Complex, GroupComplex};
use finsheaf::derived::{hom_derived, push_derived, qc_derived};
use finsheaf::finring::{kernel, HomSpace};
use finsheaf::{fixtures, random, Mat, Module, RingedMap, RingedSpace, Sheaf};

/// `Ext^i_R(M, N)` for `i ≤ top` from a free resolution, by hand.
fn module_ext(m: &Module, n: &Module, top: usize) -> Vec<Vec<u64>> {
    let ring = m.ring().clone();
    let r = ring.rank();
    // covers F_k -> K_k with K_0 = M, and the differentials F_{k+1} -> F_k
    let mut frees = Vec::new();
    let mut diffs: Vec<Mat> = Vec::new();
    let mut target = m.clone();
    let mut incl: Option<Mat> = None;
    for _ in 0..=top + 1 {
        let g = target.dim();
        let f = if g == 0 { Module::zero(ring.clone()) } else { Module::free(ring.clone(), g) };
        let cols: Vec<Vec<i64>> = (0..g)
            .flat_map(|j| {
                let mut e = vec![0; g];
                e[j] = 1;
                let t = target.clone();
                let ring = ring.clone();
                (0..r).map(move |k| t.act(&ring.basis(k)).apply_reduce(&e, t.orders()))
            })
            .collect();
        let cover = Mat::from_cols(g, &cols);
        if let Some(i) = &incl {
            diffs.push(i.mul(&cover));
        }
        let (k, inc) = kernel(&f, &target, &cover);
        frees.push(f);
        target = k;
        incl = Some(inc);
    }
    let homs: Vec<HomSpace> = frees.iter().map(|f| HomSpace::new(f, n).unwrap()).collect();
    let hd: Vec<Mat> = (0..=top)
        .map(|i| {
            let cols: Vec<Vec<i64>> = (0..homs[i].dim())
                .map(|s| {
                    let mut e = vec![0; homs[i].dim()];
                    e[s] = 1;
                    homs[i + 1].from_matrix(&homs[i].to_matrix(&e).mul(&diffs[i])).unwrap()
                })
                .collect();
            Mat::from_cols(homs[i + 1].dim(), &cols)
        })
        .collect();
    let orders: Vec<Vec<u64>> = homs.iter().map(|h| h.module.orders().to_vec()).collect();
    let g = GroupComplex::new(0, orders, hd);
    (0..=top as i64).map(|i| g.cohomology_invariants(i)).collect()
}

#[test]
fn ext_oracle_over_z4() {
    let z4 = fixtures::point_z4();
    let m = Module::cyclic_quotient(z4.ring(0).clone(), &[vec![2]]).unwrap();
    assert_eq!(module_ext(&m, &m, 2), vec![vec![2], vec![2], vec![2]]);
}

fn semi_separated() -> Vec<Arc<RingedSpace>> {
    vec![fixtures::flat(), fixtures::flat_z4(), fixtures::wedge()]
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(12) })]

    #[test]
    fn rqc_vanishes_above_dimension(seed in any::<u64>(), which in 0usize..3) {
        let x = semi_separated()[which].clone();
        let mut rng = random::rng(seed);
        let m = random::sheaf(&x, &mut rng).unwrap();
        let d = qc_derived(&Arc::new(Complex::single(m, 0))).unwrap();
        let dim = x.poset().dimension().unwrap() as i64;
        for n in dim + 1..=d.complex.hi() {
            for p in x.poset().points() {
                prop_assert!(d.complex.stalk_cohomology(n, p).is_zero());
            }
        }
    }

    #[test]
    fn local_derived_hom_is_module_ext(seed in any::<u64>(), which in 0usize..3) {
        let x = semi_separated()[which].clone();
        let mut rng = random::rng(seed);
        let m = random::qcoh_sheaf(&x, &mut rng).unwrap();
        let n = random::qcoh_sheaf(&x, &mut rng).unwrap();
        for p in x.poset().points() {
            let u = x.poset().up_set(p);
            let (mu, nu) = (Arc::new(m.restrict_open(&u).unwrap()), Arc::new(n.restrict_open(&u).unwrap()));
            let a = hom_derived(&Arc::new(Complex::single(mu, 0)), &Arc::new(Complex::single(nu, 0)), (0, 2), None).unwrap();
            let oracle = module_ext(m.stalk(p), n.stalk(p), 2);
            for i in 0..=2 {
                prop_assert_eq!(a.at(i), oracle[i as usize].as_slice());
            }
        }
    }

    #[test]
    fn push_is_functorial(seed in any::<u64>(), pick in 0usize..2) {
        let x = fixtures::wedge();
        let name = ["a", "c"][pick];
        let u = x.poset().up_set_named(name).unwrap();
        let (sub, f) = RingedMap::open_inclusion(&x, &u).unwrap();
        let g = fixtures::to_point(&x, fixtures::f2());
        let mut rng = random::rng(seed);
        let m = random::sheaf(&sub, &mut rng).unwrap();
        let mc = Complex::single(m, 0);
        let direct = push_derived(&f.then(&g).unwrap(), &mc).unwrap();
        let two = push_derived(&g, &push_derived(&f, &mc).unwrap()).unwrap();
        for i in 0..=2 {
            prop_assert_eq!(direct.stalk_groups(0).cohomology_invariants(i), two.stalk_groups(0).cohomology_invariants(i));
        }
    }
}

#[test]
fn structure_sheaf_counit_is_quasi_iso() {
    let o = Arc::new(Sheaf::structure(fixtures::flat()));
    let d = qc_derived(&Arc::new(Complex::single(o, 0))).unwrap();
    assert!(d.counit.is_quasi_iso());
}
