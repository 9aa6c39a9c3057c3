use std::sync::Arc;

use crate::error::Result;
use crate::linalg::{lcm_all, Mat};

use super::module::{direct_sum_over, submodule, HomSpace, Module};
use super::ring::{FiniteRing, RingHom};

/// Value `d_i * χ(x)` of a character with coordinates `c` (so `χ(e_t) = c_t / d_t`),
/// reported with denominator `scale`: returns `scale * χ(x) mod scale`.
fn char_value(c: &[i64], orders: &[u64], x: &[i64], scale: u64) -> i64 {
    let l = lcm_all(orders).max(1);
    let mut num: i128 = 0;
    for t in 0..orders.len() {
        num += c[t] as i128 * x[t] as i128 * (l / orders[t]) as i128;
    }
    let num = num.rem_euclid(l as i128);
    // χ(x) = num / l, exact as a multiple of 1 / scale by construction
    let v = num * scale as i128;
    debug_assert_eq!(v % l as i128, 0);
    (v / l as i128).rem_euclid(scale as i128) as i64
}

/// Character module `Hom_Z(M, Q/Z)` with `(r χ)(x) = χ(r x)`.
///
/// Coordinates: `χ ↔ (c_j)` with `χ(e_j) = c_j / m_j`.
pub fn character_module(m: &Module) -> Module {
    let orders = m.orders().to_vec();
    let n = orders.len();
    let action = m
        .action()
        .iter()
        .map(|a| {
            let cols: Vec<Vec<i64>> = (0..n)
                .map(|t| {
                    let mut c = vec![0; n];
                    c[t] = 1;
                    (0..n).map(|j| char_value(&c, &orders, &a.column(j), orders[j])).collect()
                })
                .collect();
            Mat::from_cols(n, &cols)
        })
        .collect();
    Module::from_parts(m.ring().clone(), orders, action)
}

/// Injective envelope-style embedding `M ↪ (R^∨)^g`.
#[derive(Clone, Debug)]
pub struct InjectiveEmbedding {
    pub module: Module,
    pub iota: Mat,
    /// Characters of `M` (dual coordinates) used for each copy of `R^∨`.
    pub characters: Vec<Vec<i64>>,
}

/// Embeds `M` into a finite product of copies of the character module of `R`,
/// which is injective as the dual of a free module.
pub fn injective_embedding(m: &Module) -> InjectiveEmbedding {
    let ring = m.ring().clone();
    let dual = character_module(m);
    let target = m.size();
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    let mut span = 1u128;
    for j in 0..dual.dim() {
        if span == target {
            break;
        }
        let mut e = vec![0; dual.dim()];
        e[j] = 1;
        let mut trial = chosen.clone();
        trial.push(e);
        let (sub, _) = submodule(&dual, &Mat::from_cols(dual.dim(), &trial));
        if sub.size() > span {
            span = sub.size();
            chosen = trial;
        }
    }
    let rdual = character_module(&Module::regular(ring.clone()));
    let copies = vec![&rdual; chosen.len()];
    let module = direct_sum_over(&ring, &copies);
    let r_orders = ring.orders().to_vec();
    let k = ring.rank();
    let cols: Vec<Vec<i64>> = (0..m.dim())
        .map(|j| {
            let mut out = Vec::with_capacity(k * chosen.len());
            for g in &chosen {
                for i in 0..k {
                    let x = m.action()[i].column(j);
                    out.push(char_value(g, m.orders(), &x, r_orders[i]));
                }
            }
            out
        })
        .collect();
    let iota = Mat::from_cols(module.dim(), &cols);
    InjectiveEmbedding { module, iota, characters: chosen }
}

/// Coinduced module `Hom_R(S, A)` over `S` for `phi : R -> S`, with
/// `(s h)(t) = h(t s)`; also returns the evaluation-at-one map to `A`.
#[derive(Clone, Debug)]
pub struct Coinduced {
    pub module: Module,
    pub hom: HomSpace,
    /// `Hom_R(S, A) -> A`, `h ↦ h(1)` (R-linear through `phi`).
    pub eval: Mat,
}

pub fn coinduced(a: &Module, phi: &RingHom) -> Result<Coinduced> {
    let s: Arc<FiniteRing> = phi.target().clone();
    let s_reg = Module::regular(s.clone());
    let s_as_r = s_reg.restrict(phi)?;
    let hom = HomSpace::new(&s_as_r, a)?;
    let action = s_reg.action().iter().map(|mu| hom.precompose_action(mu)).collect();
    let module = Module::from_parts(s.clone(), hom.module.orders().to_vec(), action);
    let one = s.one().clone();
    let cols: Vec<Vec<i64>> = (0..module.dim())
        .map(|t| {
            let mut e = vec![0; module.dim()];
            e[t] = 1;
            hom.to_matrix(&e).apply_reduce(&one, a.orders())
        })
        .collect();
    let eval = Mat::from_cols(a.dim(), &cols);
    Ok(Coinduced { module, hom, eval })
}

impl Coinduced {
    /// For an `R`-linear `g : B -> A` out of an `S`-module `B`, the adjunct
    /// `S`-linear `B -> Hom_R(S, A)`, `b ↦ (s ↦ g(s b))`.
    pub fn adjoint(&self, b: &Module, g: &Mat) -> Mat {
        let s = self.module.ring().clone();
        let cols: Vec<Vec<i64>> = (0..b.dim())
            .map(|j| {
                let img_cols: Vec<Vec<i64>> = (0..s.rank()).map(|t| g.apply(&b.action()[t].column(j))).collect();
                let h = Mat::from_cols(g.rows(), &img_cols);
                self.hom.from_matrix(&h).expect("adjunct is R-linear")
            })
            .collect();
        Mat::from_cols(self.module.dim(), &cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finring::module::{is_injective, HomSpace};

    fn z(n: u64) -> Arc<FiniteRing> {
        Arc::new(FiniteRing::cyclic(n))
    }

    #[test]
    fn embedding_examples() {
        let z4 = z(4);
        let m = Module::cyclic_quotient(z4.clone(), &[vec![2]]).unwrap();
        let e = injective_embedding(&m);
        assert_eq!(e.module.orders(), &[4]);
        assert_eq!(e.iota.get(0, 0), 2);
        let f2 = z(2);
        let e = injective_embedding(&Module::regular(f2.clone()));
        assert_eq!(e.module.orders(), &[2]);
        assert_eq!(e.iota.get(0, 0), 1);
        assert!(injective_embedding(&Module::zero(f2)).module.is_zero());
    }

    #[test]
    fn embedding_is_linear_and_injective() {
        let r = Arc::new(FiniteRing::truncated_poly(2, 3));
        let m = Module::cyclic_quotient(r.clone(), &[r.basis(2)]).unwrap();
        let m2 = super::super::module::direct_sum(&[&m, &Module::regular(r)]);
        let e = injective_embedding(&m2);
        assert!(m2.is_linear_map(&e.module, &e.iota));
        assert!(is_injective(&m2, &e.module, &e.iota));
    }

    #[test]
    fn coinduction_along_identity() {
        let z4 = z(4);
        let a = Module::cyclic_quotient(z4.clone(), &[vec![2]]).unwrap();
        let c = coinduced(&a, &RingHom::identity(z4)).unwrap();
        assert_eq!(c.module.size(), 2);
        let h = HomSpace::new(&c.module, &a).unwrap();
        assert!(h.from_matrix(&c.eval).is_some());
    }
}
