use crate::group::{self, Solver};
use crate::linalg::Mat;

/// `H = ker(next) / im(prev)` at the group level, with the data needed to
/// push maps through.
#[derive(Clone, Debug)]
pub struct GroupCohom {
    pub orders: Vec<u64>,
    /// `Z -> C`
    pub z_incl: Mat,
    pub z_orders: Vec<u64>,
    /// `Z -> H` and a section `H -> Z` on coordinates
    pub proj: Mat,
    pub lift: Mat,
    c_orders: Vec<u64>,
    z_solver: Solver,
}

impl GroupCohom {
    /// `prev : C^{n-1} -> C^n`, `next : C^n -> C^{n+1}`.
    pub fn new(prev: &Mat, c_orders: &[u64], next: &Mat, next_orders: &[u64]) -> Self {
        let (z_orders, z_incl) = group::kernel(next, c_orders, next_orders);
        let z_solver = Solver::new(&z_incl, &z_orders, c_orders);
        if z_orders.is_empty() {
            return GroupCohom {
                orders: Vec::new(),
                z_incl,
                z_orders,
                proj: Mat::zeros(0, 0),
                lift: Mat::zeros(0, 0),
                c_orders: c_orders.to_vec(),
                z_solver,
            };
        }
        let b = z_solver.solve_cols(&prev.clone().reduced_rows(c_orders)).expect("d∘d ≠ 0: boundary outside cycles");
        let (orders, proj, lift) = group::cokernel(&b, &z_orders);
        GroupCohom { orders, z_incl, z_orders, proj, lift, c_orders: c_orders.to_vec(), z_solver }
    }

    pub fn is_zero(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn size(&self) -> u128 {
        group::size(&self.orders)
    }

    /// Cycle coordinates of a cycle in `C`.
    pub fn cycle_coords(&self, v: &[i64]) -> Option<Vec<i64>> {
        self.z_solver.solve(v)
    }

    /// Class of a cycle of `C` in `H` coordinates.
    pub fn class_of(&self, v: &[i64]) -> Option<Vec<i64>> {
        let z = self.cycle_coords(v)?;
        Some(self.proj.apply_reduce(&z, &self.orders))
    }

    /// A representative cycle (in `C` coordinates) of a class.
    pub fn representative(&self, h: &[i64]) -> Vec<i64> {
        let z = self.lift.apply(h);
        self.z_incl.apply_reduce(&z, &self.c_orders)
    }

    /// Matrix `H -> C` of representatives.
    pub fn representatives(&self) -> Mat {
        self.z_incl.mul(&self.lift).reduced_rows(&self.c_orders)
    }

    /// `H(f) : H -> H'` for a chain-map component `f : C -> C'`.
    pub fn induced(&self, f: &Mat, other: &GroupCohom) -> Mat {
        if self.orders.is_empty() || other.orders.is_empty() {
            return Mat::zeros(other.orders.len(), self.orders.len());
        }
        let img = f.mul(&self.representatives()).reduced_rows(&other.c_orders);
        let z = other.z_solver.solve_cols(&img).expect("chain map does not preserve cycles");
        other.proj.mul(&z).reduced_rows(&other.orders)
    }
}

/// Bounded complex of finite abelian groups.
#[derive(Clone, Debug, Default)]
pub struct GroupComplex {
    pub lo: i64,
    pub orders: Vec<Vec<u64>>,
    /// `diffs[k] : C^{lo+k} -> C^{lo+k+1}`
    pub diffs: Vec<Mat>,
}

impl GroupComplex {
    pub fn new(lo: i64, orders: Vec<Vec<u64>>, diffs: Vec<Mat>) -> Self {
        assert_eq!(diffs.len() + 1, orders.len().max(1));
        GroupComplex { lo, orders, diffs }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.orders.len() as i64 - 1
    }

    pub fn orders_at(&self, n: i64) -> &[u64] {
        if n < self.lo || n > self.hi() {
            return &[];
        }
        &self.orders[(n - self.lo) as usize]
    }

    /// `d^n : C^n -> C^{n+1}` (zero outside the support).
    pub fn diff(&self, n: i64) -> Mat {
        let (a, b) = (self.orders_at(n).len(), self.orders_at(n + 1).len());
        if n < self.lo || n >= self.hi() {
            return Mat::zeros(b, a);
        }
        self.diffs[(n - self.lo) as usize].clone()
    }

    pub fn is_complex(&self) -> bool {
        (self.lo..self.hi()).all(|n| self.diff(n + 1).mul_reduce(&self.diff(n), self.orders_at(n + 2)).is_zero())
    }

    pub fn cohomology(&self, n: i64) -> GroupCohom {
        GroupCohom::new(&self.diff(n - 1), self.orders_at(n), &self.diff(n), self.orders_at(n + 1))
    }

    /// Invariant factors of `H^n`.
    pub fn cohomology_invariants(&self, n: i64) -> Vec<u64> {
        group::invariant_factors(&self.cohomology(n).orders)
    }

    pub fn is_acyclic(&self) -> bool {
        (self.lo..=self.hi()).all(|n| self.cohomology(n).is_zero())
    }
}

/// Whether the chain map with components `maps[n - lo]` (`n` from `lo`) is a quasi-isomorphism.
pub fn group_quasi_iso(a: &GroupComplex, b: &GroupComplex, lo: i64, maps: &[Mat]) -> bool {
    let from = a.lo.min(b.lo);
    let to = a.hi().max(b.hi());
    for n in from..=to {
        let ha = a.cohomology(n);
        let hb = b.cohomology(n);
        if ha.size() != hb.size() {
            return false;
        }
        if ha.is_zero() {
            continue;
        }
        let k = n - lo;
        let f = if k >= 0 && (k as usize) < maps.len() {
            maps[k as usize].clone()
        } else {
            Mat::zeros(b.orders_at(n).len(), a.orders_at(n).len())
        };
        let h = ha.induced(&f, &hb);
        if !group::is_injective(&h, &ha.orders, &hb.orders) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_on_z4() {
        let c = GroupComplex::new(0, vec![vec![4], vec![4]], vec![Mat::from_rows(&[vec![2]])]);
        assert_eq!(c.cohomology(0).orders, vec![2]);
        assert_eq!(c.cohomology(1).orders, vec![2]);
        assert!(c.cohomology(2).is_zero());
        assert!(c.is_complex());
    }

    #[test]
    fn identity_is_quasi_iso() {
        let c = GroupComplex::new(0, vec![vec![4], vec![4]], vec![Mat::from_rows(&[vec![2]])]);
        let id = vec![Mat::identity(1), Mat::identity(1)];
        assert!(group_quasi_iso(&c, &c, 0, &id));
        let zero = vec![Mat::zeros(1, 1), Mat::zeros(1, 1)];
        assert!(!group_quasi_iso(&c, &c, 0, &zero));
    }
}
