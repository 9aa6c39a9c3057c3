//! Finite abelian groups `⊕ Z/d_i` and homomorphisms between them.
//!
//! A homomorphism `⊕ Z/m_j -> ⊕ Z/n_i` is an integer matrix `H` with
//! `m_j * H[i][j] = 0 (mod n_i)`; row `i` is always reduced modulo `n_i`.

use num_bigint::BigUint;

use crate::linalg::{lcm_all, Mat, SmithMod};

/// Cyclic orders of a finite abelian group; every order is at least 2.
pub type Orders = [u64];

/// Exponent (lcm of the orders); 1 for the trivial group.
pub fn exponent(orders: &Orders) -> u64 {
    lcm_all(orders)
}

pub fn cardinality(orders: &Orders) -> BigUint {
    orders.iter().fold(BigUint::from(1u32), |acc, &o| acc * BigUint::from(o))
}

pub fn reduce(v: &mut [i64], orders: &Orders) {
    for (x, &o) in v.iter_mut().zip(orders) {
        *x = x.rem_euclid(o as i64);
    }
}

pub fn is_zero_vec(v: &[i64], orders: &Orders) -> bool {
    v.iter().zip(orders).all(|(x, &o)| x.rem_euclid(o as i64) == 0)
}

/// Whether `h` is a well-defined homomorphism between the two groups.
pub fn is_well_defined(h: &Mat, src: &Orders, tgt: &Orders) -> bool {
    if h.rows() != tgt.len() || h.cols() != src.len() {
        return false;
    }
    for i in 0..tgt.len() {
        for j in 0..src.len() {
            if (h.get(i, j) as i128 * src[j] as i128).rem_euclid(tgt[i] as i128) != 0 {
                return false;
            }
        }
    }
    true
}

fn diag_orders(orders: &Orders) -> Mat {
    Mat::diagonal(&orders.iter().map(|&o| o as i64).collect::<Vec<_>>())
}

/// Subgroup of `⊕ Z/orders` generated by the columns of `gens`, as an
/// abstract group together with its inclusion.
pub fn subgroup(gens: &Mat, orders: &Orders) -> (Vec<u64>, Mat) {
    let n = orders.len();
    assert_eq!(gens.rows(), n);
    let t = gens.cols();
    if t == 0 || n == 0 {
        return (Vec::new(), Mat::zeros(n, 0));
    }
    let modulus = exponent(orders);
    let a = gens.hstack(&diag_orders(orders));
    let rel = SmithMod::new(&a, modulus).kernel_gens();
    let rel_top = rel.block(0, 0, t, rel.cols());
    let pres = SmithMod::new(&rel_top, modulus).cokernel();
    let incl = gens.mul(&pres.from_canon).reduced_rows(orders);
    (pres.orders, incl)
}

/// Kernel of `h : src -> tgt` with its inclusion into `src`.
pub fn kernel(h: &Mat, src: &Orders, tgt: &Orders) -> (Vec<u64>, Mat) {
    let m = src.len();
    if m == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    if tgt.is_empty() {
        return (src.to_vec(), Mat::identity(m));
    }
    let modulus = lcm_all(src.iter().chain(tgt));
    let a = h.hstack(&diag_orders(tgt));
    let k = SmithMod::new(&a, modulus).kernel_gens();
    let top = k.block(0, 0, m, k.cols()).reduced_rows(src);
    subgroup(&top, src)
}

/// Cokernel of `h : src -> tgt` with the projection from `tgt`.
pub fn cokernel(h: &Mat, tgt: &Orders) -> (Vec<u64>, Mat, Mat) {
    let n = tgt.len();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0), Mat::zeros(0, 0));
    }
    let modulus = exponent(tgt);
    let a = h.hstack(&diag_orders(tgt));
    let pres = SmithMod::new(&a, modulus).cokernel();
    (pres.orders, pres.to_canon, pres.from_canon)
}

/// Coordinates `x` (in `src`) with `h x = v` in `tgt`, if `v` is in the image.
pub fn preimage(h: &Mat, src: &Orders, tgt: &Orders, v: &[i64]) -> Option<Vec<i64>> {
    let m = src.len();
    if tgt.is_empty() || is_zero_vec(v, tgt) {
        return Some(vec![0; m]);
    }
    if m == 0 {
        return None;
    }
    let modulus = lcm_all(src.iter().chain(tgt));
    let a = h.hstack(&diag_orders(tgt));
    let x = SmithMod::new(&a, modulus).solve(v)?;
    let mut top = x[..m].to_vec();
    reduce(&mut top, src);
    Some(top)
}

/// Solver for repeated preimage queries against the same map.
#[derive(Clone, Debug)]
pub struct Solver {
    smith: Option<SmithMod>,
    src: Vec<u64>,
    tgt: Vec<u64>,
}

impl Solver {
    pub fn new(h: &Mat, src: &Orders, tgt: &Orders) -> Self {
        let smith = if src.is_empty() || tgt.is_empty() {
            None
        } else {
            let modulus = lcm_all(src.iter().chain(tgt));
            Some(SmithMod::new(&h.hstack(&diag_orders(tgt)), modulus))
        };
        Solver { smith, src: src.to_vec(), tgt: tgt.to_vec() }
    }

    pub fn src(&self) -> &[u64] {
        &self.src
    }

    pub fn solve(&self, v: &[i64]) -> Option<Vec<i64>> {
        if self.tgt.is_empty() || is_zero_vec(v, &self.tgt) {
            return Some(vec![0; self.src.len()]);
        }
        let s = self.smith.as_ref()?;
        let x = s.solve(v)?;
        let mut top = x[..self.src.len()].to_vec();
        reduce(&mut top, &self.src);
        Some(top)
    }

    /// Solves column by column; `None` if any column is not in the image.
    pub fn solve_cols(&self, b: &Mat) -> Option<Mat> {
        let cols: Option<Vec<Vec<i64>>> = (0..b.cols()).map(|j| self.solve(&b.column(j))).collect();
        Some(Mat::from_cols(self.src.len(), &cols?))
    }
}

/// Whether the map is injective.
pub fn is_injective(h: &Mat, src: &Orders, tgt: &Orders) -> bool {
    kernel(h, src, tgt).0.is_empty()
}

pub fn is_surjective(h: &Mat, tgt: &Orders) -> bool {
    cokernel(h, tgt).0.is_empty()
}

fn factor(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            out.push((p, q));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

/// Invariant factors `d_1 | d_2 | ...` (all > 1) of `⊕ Z/orders`.
pub fn invariant_factors(orders: &Orders) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &o in orders {
        for (p, q) in factor(o) {
            by_prime.entry(p).or_default().push(q);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for powers in by_prime.values_mut() {
        powers.sort_unstable_by(|a, b| b.cmp(a));
        // largest powers go to the last invariant factor
        for (k, q) in powers.iter().enumerate() {
            out[len - 1 - k] *= q;
        }
    }
    out
}

/// Iterator over all elements of `⊕ Z/orders` in mixed-radix order.
pub fn elements(orders: &Orders) -> impl Iterator<Item = Vec<i64>> + '_ {
    let total: u128 = orders.iter().map(|&o| o as u128).product();
    (0..total).map(move |mut idx| {
        orders
            .iter()
            .map(|&o| {
                let v = (idx % o as u128) as i64;
                idx /= o as u128;
                v
            })
            .collect()
    })
}

/// Element count as `u128`, saturating.
pub fn size(orders: &Orders) -> u128 {
    orders.iter().fold(1u128, |acc, &o| acc.saturating_mul(o as u128))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_factor_normalization() {
        assert_eq!(invariant_factors(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors(&[2, 2]), vec![2, 2]);
        assert_eq!(invariant_factors(&[4]), vec![4]);
        assert_eq!(invariant_factors(&[2, 4, 3]), vec![2, 12]);
        assert!(invariant_factors(&[]).is_empty());
    }

    #[test]
    fn kernel_and_cokernel_of_doubling_on_z4() {
        let h = Mat::from_rows(&[vec![2]]);
        let (k, incl) = kernel(&h, &[4], &[4]);
        assert_eq!(k, vec![2]);
        assert_eq!(incl.get(0, 0), 2);
        let (c, _, _) = cokernel(&h, &[4]);
        assert_eq!(c, vec![2]);
    }

    #[test]
    fn subgroup_of_klein_four() {
        let gens = Mat::from_cols(2, &[vec![1, 1], vec![1, 1]]);
        let (s, _) = subgroup(&gens, &[2, 2]);
        assert_eq!(s, vec![2]);
    }

    proptest::proptest! {
        #[test]
        fn kernel_image_counting(entries in proptest::collection::vec(0i64..12, 6)) {
            // h : Z/4 ⊕ Z/6 ⊕ Z/2 -> Z/12 ⊕ Z/2, made well defined by scaling
            let src = [4u64, 6, 2];
            let tgt = [12u64, 2];
            let mut h = Mat::zeros(2, 3);
            for i in 0..2 {
                for j in 0..3 {
                    let step = tgt[i] / crate::linalg::gcd(tgt[i], src[j]);
                    h.set(i, j, (entries[i * 3 + j] * step as i64).rem_euclid(tgt[i] as i64));
                }
            }
            proptest::prop_assert!(is_well_defined(&h, &src, &tgt));
            let (k, _) = kernel(&h, &src, &tgt);
            let (c, _, _) = cokernel(&h, &tgt);
            let (im, _) = subgroup(&h, &tgt);
            proptest::prop_assert_eq!(size(&src), size(&k) * size(&im));
            proptest::prop_assert_eq!(size(&tgt), size(&im) * size(&c));
            // brute force kernel size
            let brute = elements(&src).filter(|x| is_zero_vec(&h.apply(x), &tgt)).count() as u128;
            proptest::prop_assert_eq!(brute, size(&k));
        }
    }
}
