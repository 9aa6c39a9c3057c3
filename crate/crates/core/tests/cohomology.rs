use std::sync::Arc;

use finsheaf::derived::{pseudo_cech, sheaf_cohomology, standard_sheaf};
use finsheaf::fixtures;
use finsheaf::cxalg::Complex;
use finsheaf::Sheaf;

#[test]
fn pseudocircle_and_sphere() {
    let o = Arc::new(Sheaf::structure(fixtures::pseudocircle()));
    assert_eq!(sheaf_cohomology(&o).unwrap(), vec![vec![2], vec![2]]);
    let o = Arc::new(Sheaf::structure(fixtures::sphere()));
    assert_eq!(sheaf_cohomology(&o).unwrap(), vec![vec![2], vec![], vec![2]]);
}

#[test]
fn resolutions_are_quasi_isos() {
    for x in [fixtures::pseudocircle(), fixtures::wedge(), fixtures::arrow(), fixtures::flat()] {
        let o = Arc::new(Sheaf::structure(x));
        let r = standard_sheaf(&o).unwrap();
        assert!(r.augmentation.is_quasi_iso());
        let c = pseudo_cech(&Arc::new(Complex::single(o.clone(), 0))).unwrap();
        assert!(c.augmentation.is_quasi_iso());
    }
}
