use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{self, elements};
use crate::linalg::{gcd, Mat};

/// Element of a finite ring in additive coordinates.
pub type Elem = Vec<i64>;

/// Finite commutative ring: additive group `⊕ Z/orders[i]` with a bilinear
/// multiplication table on the additive generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteRing {
    orders: Vec<u64>,
    /// `table[i][j]` = coordinates of `e_i * e_j`
    table: Vec<Vec<Elem>>,
    one: Elem,
}

impl FiniteRing {
    /// Builds and validates a ring from its multiplication table.
    pub fn new(orders: Vec<u64>, table: Vec<Vec<Elem>>, one: Elem) -> Result<Self> {
        let k = orders.len();
        if orders.iter().any(|&o| o < 2) {
            return Err(Error::InvalidRing("additive orders must be at least 2".into()));
        }
        if table.len() != k || table.iter().any(|r| r.len() != k) || one.len() != k {
            return Err(Error::InvalidRing("table shape does not match the generators".into()));
        }
        let mut ring = FiniteRing { orders, table, one };
        for row in ring.table.iter_mut() {
            for e in row.iter_mut() {
                if e.len() != k {
                    return Err(Error::InvalidRing("table entry has the wrong length".into()));
                }
                group::reduce(e, &ring.orders);
            }
        }
        group::reduce(&mut ring.one, &ring.orders);
        ring.validate()?;
        Ok(ring)
    }

    fn validate(&self) -> Result<()> {
        let k = self.orders.len();
        for i in 0..k {
            for j in 0..k {
                let e = &self.table[i][j];
                // d_i (e_i e_j) = 0 and d_j (e_i e_j) = 0
                let g = gcd(self.orders[i], self.orders[j]) as i64;
                let scaled: Vec<i64> = e.iter().map(|v| v * g).collect();
                if !group::is_zero_vec(&scaled, &self.orders) {
                    return Err(Error::InvalidRing(format!(
                        "product e{i}*e{j} is incompatible with the additive orders"
                    )));
                }
                if self.table[i][j] != self.table[j][i] {
                    return Err(Error::InvalidRing(format!("not commutative at e{i}*e{j}")));
                }
            }
        }
        for i in 0..k {
            let e = self.basis(i);
            if self.mul(&self.one, &e) != e {
                return Err(Error::InvalidRing(format!("`one` is not a unit for e{i}")));
            }
            for j in 0..k {
                for l in 0..k {
                    let left = self.mul(&self.table[i][j], &self.basis(l));
                    let right = self.mul(&self.basis(i), &self.table[j][l]);
                    if left != right {
                        return Err(Error::InvalidRing(format!("not associative at (e{i},e{j},e{l})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `Z/n`; `Z/1` is the zero ring.
    pub fn cyclic(n: u64) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return FiniteRing::zero();
        }
        FiniteRing { orders: vec![n], table: vec![vec![vec![1]]], one: vec![1] }
    }

    pub fn zero() -> Self {
        FiniteRing { orders: Vec::new(), table: Vec::new(), one: Vec::new() }
    }

    /// `Z/p[t]/(t^k)`-style truncated polynomial ring over `Z/n`, additive basis `1, t, ..., t^{k-1}`.
    pub fn truncated_poly(n: u64, k: usize) -> Self {
        let mut table = vec![vec![vec![0; k]; k]; k];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                if i + j < k {
                    e[i + j] = 1;
                }
            }
        }
        let mut one = vec![0; k];
        one[0] = 1;
        FiniteRing::new(vec![n; k], table, one).expect("truncated polynomial ring is valid")
    }

    /// Product ring `A × B`.
    pub fn product(a: &FiniteRing, b: &FiniteRing) -> Self {
        let (ka, kb) = (a.rank(), b.rank());
        let k = ka + kb;
        let mut orders = a.orders.clone();
        orders.extend_from_slice(&b.orders);
        let mut table = vec![vec![vec![0; k]; k]; k];
        for i in 0..ka {
            for j in 0..ka {
                table[i][j][..ka].copy_from_slice(&a.table[i][j]);
            }
        }
        for i in 0..kb {
            for j in 0..kb {
                table[ka + i][ka + j][ka..].copy_from_slice(&b.table[i][j]);
            }
        }
        let mut one = a.one.clone();
        one.extend_from_slice(&b.one);
        FiniteRing { orders, table, one }
    }

    /// Number of additive generators.
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn table(&self) -> &[Vec<Elem>] {
        &self.table
    }

    pub fn one(&self) -> &Elem {
        &self.one
    }

    pub fn zero_elem(&self) -> Elem {
        vec![0; self.rank()]
    }

    pub fn basis(&self, i: usize) -> Elem {
        let mut e = self.zero_elem();
        e[i] = 1;
        e
    }

    pub fn size(&self) -> u128 {
        group::size(&self.orders)
    }

    pub fn is_zero_ring(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Elem {
        let mut out: Elem = a.iter().zip(b).map(|(x, y)| x + y).collect();
        group::reduce(&mut out, &self.orders);
        out
    }

    pub fn neg(&self, a: &[i64]) -> Elem {
        let mut out: Elem = a.iter().map(|x| -x).collect();
        group::reduce(&mut out, &self.orders);
        out
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Elem {
        let k = self.rank();
        let mut out = vec![0i64; k];
        for i in 0..k {
            if a[i] == 0 {
                continue;
            }
            for j in 0..k {
                if b[j] == 0 {
                    continue;
                }
                let c = a[i] * b[j];
                for t in 0..k {
                    out[t] = (out[t] + c * self.table[i][j][t]).rem_euclid(self.orders[t] as i64);
                }
            }
        }
        out
    }

    /// Matrix of `x ↦ a x` on the additive coordinates.
    pub fn mult_matrix(&self, a: &[i64]) -> Mat {
        let k = self.rank();
        let cols: Vec<Elem> = (0..k).map(|j| self.mul(a, &self.basis(j))).collect();
        Mat::from_cols(k, &cols)
    }

    /// Elements in mixed-radix order (fails above `cap`).
    pub fn elements(&self, cap: u128) -> Result<Vec<Elem>> {
        let size = self.size();
        if size > cap {
            return Err(Error::CapExceeded { size, cap });
        }
        Ok(elements(&self.orders).collect())
    }
}

/// Ring homomorphism given by the images of the additive generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingHom {
    source: Arc<FiniteRing>,
    target: Arc<FiniteRing>,
    images: Vec<Elem>,
}

impl RingHom {
    pub fn new(source: Arc<FiniteRing>, target: Arc<FiniteRing>, images: Vec<Elem>) -> Result<Self> {
        if images.len() != source.rank() || images.iter().any(|e| e.len() != target.rank()) {
            return Err(Error::InvalidRingHom("image list has the wrong shape".into()));
        }
        let mut images = images;
        for e in images.iter_mut() {
            group::reduce(e, target.orders());
        }
        let h = RingHom { source, target, images };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<()> {
        let s = &self.source;
        let t = &self.target;
        for (i, img) in self.images.iter().enumerate() {
            let scaled: Vec<i64> = img.iter().map(|v| v * s.orders()[i] as i64).collect();
            if !group::is_zero_vec(&scaled, t.orders()) {
                return Err(Error::InvalidRingHom(format!("image of e{i} violates its additive order")));
            }
        }
        if self.apply(s.one()) != *t.one() {
            return Err(Error::InvalidRingHom("unit is not preserved".into()));
        }
        for i in 0..s.rank() {
            for j in 0..s.rank() {
                let lhs = self.apply(&s.table()[i][j]);
                let rhs = t.mul(&self.images[i], &self.images[j]);
                if lhs != rhs {
                    return Err(Error::InvalidRingHom(format!("not multiplicative on (e{i},e{j})")));
                }
            }
        }
        Ok(())
    }

    pub fn identity(r: Arc<FiniteRing>) -> Self {
        let images = (0..r.rank()).map(|i| r.basis(i)).collect();
        RingHom { source: r.clone(), target: r, images }
    }

    /// The unique map `Z/n -> R` when `n * 1 = 0` in `R`.
    pub fn from_cyclic(source: Arc<FiniteRing>, target: Arc<FiniteRing>) -> Result<Self> {
        let images = if source.rank() == 0 { Vec::new() } else { vec![target.one().clone()] };
        RingHom::new(source, target, images)
    }

    pub fn source(&self) -> &Arc<FiniteRing> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteRing> {
        &self.target
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    pub fn apply(&self, a: &[i64]) -> Elem {
        let mut out = self.target.zero_elem();
        for (i, &c) in a.iter().enumerate() {
            if c != 0 {
                for (o, v) in out.iter_mut().zip(&self.images[i]) {
                    *o += c * v;
                }
            }
        }
        group::reduce(&mut out, self.target.orders());
        out
    }

    /// `other ∘ self`
    pub fn then(&self, other: &RingHom) -> Result<RingHom> {
        if !same_ring(&self.target, &other.source) {
            return Err(Error::RingMismatch("composition of ring maps".into()));
        }
        let images = self.images.iter().map(|e| other.apply(e)).collect();
        Ok(RingHom { source: self.source.clone(), target: other.target.clone(), images })
    }

    pub fn matrix(&self) -> Mat {
        Mat::from_cols(self.target.rank(), &self.images)
    }
}

pub fn same_ring(a: &Arc<FiniteRing>, b: &Arc<FiniteRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_rings() {
        let r = FiniteRing::cyclic(4);
        assert_eq!(r.size(), 4);
        assert_eq!(r.mul(&[2], &[2]), vec![0]);
        assert_eq!(r.mul(&[3], &[3]), vec![1]);
        assert!(FiniteRing::cyclic(1).is_zero_ring());
    }

    #[test]
    fn dual_numbers_over_f2() {
        let r = FiniteRing::truncated_poly(2, 2);
        assert_eq!(r.size(), 4);
        let t = r.basis(1);
        assert_eq!(r.mul(&t, &t), vec![0, 0]);
    }

    #[test]
    fn rejects_bad_table() {
        // claims e0*e0 = 2e0 with e0 the unit
        let bad = FiniteRing::new(vec![4], vec![vec![vec![2]]], vec![1]);
        assert!(bad.is_err());
    }

    #[test]
    fn quotient_map_is_a_ring_hom() {
        let z4 = Arc::new(FiniteRing::cyclic(4));
        let z2 = Arc::new(FiniteRing::cyclic(2));
        let h = RingHom::from_cyclic(z4.clone(), z2.clone()).unwrap();
        assert_eq!(h.apply(&[3]), vec![1]);
        assert!(RingHom::from_cyclic(z2, z4).is_err());
    }

    #[test]
    fn z6_to_z2() {
        let z6 = Arc::new(FiniteRing::cyclic(6));
        let z2 = Arc::new(FiniteRing::cyclic(2));
        assert!(RingHom::from_cyclic(z6, z2).is_ok());
    }
}
