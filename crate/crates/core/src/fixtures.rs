//! Named example spaces used across tests, benches and the command line.

use std::sync::Arc;

use crate::finring::{FiniteRing, RingHom};
use crate::poset::{face_poset, PointSet, Poset};
use crate::sheafmod::{RingedMap, RingedSpace};

fn cyclic(n: u64) -> Arc<FiniteRing> {
    Arc::new(FiniteRing::cyclic(n))
}

fn two_points() -> Arc<Poset> {
    Arc::new(Poset::new(&["p", "q"], &[("p", "q")]).expect("valid poset"))
}

fn two_point_space(a: u64, b: u64) -> RingedSpace {
    let (ra, rb) = (cyclic(a), cyclic(b));
    let r = RingHom::from_cyclic(ra.clone(), rb.clone()).expect("quotient map");
    RingedSpace::new(two_points(), vec![ra, rb], vec![((0, 1), r)]).expect("valid space")
}

/// One point with ring `Z/4`.
pub fn point_z4() -> Arc<RingedSpace> {
    Arc::new(RingedSpace::point(cyclic(4)))
}

/// `p < q` with `Z/4 -> Z/2`; the restriction is not flat.
pub fn arrow() -> Arc<RingedSpace> {
    Arc::new(two_point_space(4, 2))
}

/// `p < q` with `Z/6 -> Z/2`; a semi-separated finite space.
pub fn flat() -> Arc<RingedSpace> {
    Arc::new(two_point_space(6, 2))
}

/// `p < q` with `Z/4 -> Z/4`.
pub fn flat_z4() -> Arc<RingedSpace> {
    Arc::new(two_point_space(4, 4))
}

pub fn wedge_poset() -> Poset {
    Poset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).expect("valid poset")
}

pub fn pseudocircle_poset() -> Poset {
    Poset::new(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")]).expect("valid poset")
}

/// Minimal six-point model of the 2-sphere: `a, b < c, d < e, f`.
pub fn sphere_poset() -> Poset {
    let low = ["a", "b"];
    let mid = ["c", "d"];
    let top = ["e", "f"];
    let mut rel = Vec::new();
    for l in low {
        for m in mid {
            rel.push((l, m));
        }
    }
    for m in mid {
        for t in top {
            rel.push((m, t));
        }
    }
    Poset::new(&["a", "b", "c", "d", "e", "f"], &rel).expect("valid poset")
}

pub fn f2() -> Arc<FiniteRing> {
    cyclic(2)
}

/// `{a, b} < c` with constant `F_2`.
pub fn wedge() -> Arc<RingedSpace> {
    Arc::new(RingedSpace::constant(Arc::new(wedge_poset()), f2()))
}

/// Pseudocircle `a, b < c, d` with constant `F_2`.
pub fn pseudocircle() -> Arc<RingedSpace> {
    Arc::new(RingedSpace::constant(Arc::new(pseudocircle_poset()), f2()))
}

/// Six-point sphere with constant `F_2`.
pub fn sphere() -> Arc<RingedSpace> {
    Arc::new(RingedSpace::constant(Arc::new(sphere_poset()), f2()))
}

/// Source data for the sphere: face poset of the octahedron boundary and
/// the covering whose finite model is [`sphere_poset`].
pub fn sphere_source() -> (Arc<Poset>, Vec<PointSet>) {
    let signs = |v: &str| -> Vec<String> { vec![format!("+{v}"), format!("-{v}")] };
    let (xs, ys, zs) = (signs("x"), signs("y"), signs("z"));
    let mut facets = Vec::new();
    for x in &xs {
        for y in &ys {
            for z in &zs {
                facets.push(vec![x.clone(), y.clone(), z.clone()]);
            }
        }
    }
    let s = Arc::new(face_poset(&facets).expect("octahedron"));
    // face ↦ e/f if it meets ±z, else c/d if it meets ±y, else a/b by ±x
    let level = |face: &str| -> usize {
        let has = |v: &str| face.split(',').any(|w| w == v);
        if has("+z") {
            4
        } else if has("-z") {
            5
        } else if has("+y") {
            2
        } else if has("-y") {
            3
        } else if has("+x") {
            0
        } else {
            1
        }
    };
    let model = sphere_poset();
    let covering = model
        .points()
        .map(|t| s.points().filter(|&f| model.leq(t, level(s.name(f)))).collect())
        .collect();
    (s, covering)
}

/// Map to the one-point space with ring `k`, using the unique maps `Z/n -> O_x`.
pub fn to_point(x: &Arc<RingedSpace>, k: Arc<FiniteRing>) -> RingedMap {
    let structure = x
        .rings()
        .iter()
        .map(|r| {
            if crate::finring::same_ring(r, &k) {
                RingHom::identity(r.clone())
            } else {
                RingHom::from_cyclic(k.clone(), r.clone()).expect("structure map")
            }
        })
        .collect();
    RingedMap::to_point(x.clone(), k, structure).expect("valid map to a point")
}
