use crate::error::{Error, Result};
use crate::group;
use crate::linalg::Mat;

use super::module::{self as m, HomSpace, Module};

/// An `R`-linear map between two modules over the same ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleHom {
    pub source: Module,
    pub target: Module,
    pub matrix: Mat,
}

/// Output of [`ModuleHom::kernel_cokernel`].
#[derive(Clone, Debug)]
pub struct KerCoker {
    pub kernel: Module,
    pub inclusion: Mat,
    pub cokernel: Module,
    pub projection: Mat,
}

impl ModuleHom {
    pub fn new(source: Module, target: Module, matrix: Mat) -> Result<Self> {
        let mut matrix = matrix;
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::InvalidHom("matrix shape does not match the modules".into()));
        }
        matrix.reduce_rows(target.orders());
        if !source.is_linear_map(&target, &matrix) {
            return Err(Error::InvalidHom("map does not respect relations or the ring action".into()));
        }
        Ok(ModuleHom { source, target, matrix })
    }

    pub fn identity(m: &Module) -> Self {
        ModuleHom { source: m.clone(), target: m.clone(), matrix: m.identity() }
    }

    pub fn zero(source: &Module, target: &Module) -> Self {
        ModuleHom { source: source.clone(), target: target.clone(), matrix: Mat::zeros(target.dim(), source.dim()) }
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.matrix.apply_reduce(x, self.target.orders())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleHom) -> Result<ModuleHom> {
        if self.target != other.source {
            return Err(Error::InvalidHom("composition of non-composable maps".into()));
        }
        let matrix = other.matrix.mul_reduce(&self.matrix, other.target.orders());
        Ok(ModuleHom { source: self.source.clone(), target: other.target.clone(), matrix })
    }

    pub fn kernel_cokernel(&self) -> KerCoker {
        let (kernel, inclusion) = m::kernel(&self.source, &self.target, &self.matrix);
        let (cokernel, projection, _) = m::cokernel(&self.target, &self.matrix);
        KerCoker { kernel, inclusion, cokernel, projection }
    }

    pub fn image(&self) -> (Module, Mat) {
        m::image(&self.target, &self.matrix)
    }

    pub fn is_iso(&self) -> bool {
        m::is_iso(&self.source, &self.target, &self.matrix)
    }

    pub fn is_injective(&self) -> bool {
        m::is_injective(&self.source, &self.target, &self.matrix)
    }

    pub fn is_surjective(&self) -> bool {
        m::is_surjective(&self.target, &self.matrix)
    }
}

/// Mutually inverse `R`-linear maps, if the modules are isomorphic.
///
/// Invariant factors are compared first; then `Hom_R(M, N)` is searched
/// (at most `cap` elements) for a bijection.
pub fn find_isomorphism(a: &Module, b: &Module, cap: u128) -> Result<Option<(Mat, Mat)>> {
    if a.abelian_invariants() != b.abelian_invariants() {
        return Ok(None);
    }
    if a.is_zero() {
        return Ok(Some((Mat::zeros(0, 0), Mat::zeros(0, 0))));
    }
    let hom = HomSpace::new(a, b)?;
    let size = hom.module.size();
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    for c in group::elements(hom.module.orders()) {
        let f = hom.to_matrix(&c);
        if let Some(g) = m::inverse(a, b, &f) {
            return Ok(Some((f, g)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::finring::FiniteRing;

    #[test]
    fn kernel_cokernel_orders() {
        let r = Arc::new(FiniteRing::cyclic(4));
        let reg = Module::regular(r);
        let h = ModuleHom::new(reg.clone(), reg.clone(), Mat::from_rows(&[vec![2]])).unwrap();
        let kc = h.kernel_cokernel();
        assert_eq!(kc.kernel.orders(), &[2]);
        assert_eq!(kc.cokernel.orders(), &[2]);
        let bad = Module::cyclic_quotient(reg.ring().clone(), &[vec![2]]).unwrap();
        assert!(ModuleHom::new(bad, reg, Mat::from_rows(&[vec![1]])).is_err());
    }

    #[test]
    fn isomorphism_search_distinguishes_same_group() {
        // F2[t]/t^2 regular versus F2 ⊕ F2 with zero t-action
        let r = Arc::new(FiniteRing::truncated_poly(2, 2));
        let reg = Module::regular(r.clone());
        let triv = Module::cyclic_quotient(r.clone(), &[r.basis(1)]).unwrap();
        let sum = super::super::module::direct_sum(&[&triv, &triv]);
        assert_eq!(reg.abelian_invariants(), sum.abelian_invariants());
        assert!(find_isomorphism(&reg, &sum, 1 << 16).unwrap().is_none());
        let (f, g) = find_isomorphism(&reg, &reg, 1 << 16).unwrap().unwrap();
        assert_eq!(g.mul_reduce(&f, reg.orders()), reg.identity());
    }
}
