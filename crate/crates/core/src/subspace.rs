//! Closed subspaces of a finite-dimensional ambient space, represented by
//! orthonormal-basis matrices.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use ndarray::concatenate;
use ndarray::Axis;

/// An orthonormal-basis matrix representing a closed subspace: `basis` is
/// ambient_dim × r with B*B = I_r.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub basis: CMat,
}

impl Subspace {
    /// The zero subspace.
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: linalg::zeros(ambient_dim, 0) }
    }

    /// The full ambient space with the coordinate basis.
    pub fn full(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: linalg::eye(ambient_dim) }
    }

    /// Orthonormalize a spanning set (columns) into a subspace at the given
    /// relative rank tolerance.
    pub fn from_span(span: &CMat, rel_tol: f64) -> Self {
        Subspace {
            ambient_dim: span.nrows(),
            basis: linalg::orthonormal_range(span, rel_tol),
        }
    }

    /// Wrap an already orthonormal basis, verifying B*B = I.
    pub fn from_orthonormal(basis: CMat, tol: f64) -> Result<Self> {
        let gram = linalg::adj(&basis).dot(&basis);
        let res = linalg::fro_norm(&(&gram - &linalg::eye(basis.ncols())));
        if res > tol {
            return Err(Error::Shape(format!(
                "basis columns are not orthonormal: residual {res:.3e}"
            )));
        }
        Ok(Subspace { ambient_dim: basis.nrows(), basis })
    }

    /// The coordinate subspace spanned by the masked-on positions.
    pub fn from_mask(mask: &[bool]) -> Self {
        let n = mask.len();
        let r = mask.iter().filter(|&&b| b).count();
        let mut basis = linalg::zeros(n, r);
        let mut col = 0;
        for (i, &keep) in mask.iter().enumerate() {
            if keep {
                basis[[i, col]] = num_complex::Complex64::new(1.0, 0.0);
                col += 1;
            }
        }
        Subspace { ambient_dim: n, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The orthogonal projection P = B·B*.
    pub fn projector(&self) -> CMat {
        self.basis.dot(&linalg::adj(&self.basis))
    }

    /// Orthogonal complement within the ambient space.
    pub fn complement(&self, rel_tol: f64) -> Subspace {
        Subspace {
            ambient_dim: self.ambient_dim,
            basis: linalg::orthonormal_complement(&self.basis, rel_tol),
        }
    }

    /// Express ambient vectors (columns) in this subspace's own coordinates.
    pub fn coords_of(&self, vectors: &CMat) -> CMat {
        linalg::adj(&self.basis).dot(vectors)
    }

    /// How far `vectors` stick out of the subspace: ‖(I − P)·V‖.
    pub fn containment_residual(&self, vectors: &CMat) -> f64 {
        let proj = self.basis.dot(&self.coords_of(vectors));
        linalg::op_norm(&(vectors - &proj))
    }

    /// Internal direct sum; errors if the two pieces overlap beyond the
    /// tolerance.
    pub fn direct_sum(&self, other: &Subspace, tol: f64) -> Result<Subspace> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::Shape("direct sum of different ambients".into()));
        }
        let overlap = linalg::op_norm(&linalg::adj(&self.basis).dot(&other.basis));
        if overlap > tol {
            return Err(Error::Hypothesis(format!(
                "subspaces are not orthogonal: overlap {overlap:.3e}"
            )));
        }
        let joined = concatenate(Axis(1), &[self.basis.view(), other.basis.view()])
            .expect("same ambient");
        Ok(Subspace { ambient_dim: self.ambient_dim, basis: joined })
    }

    /// Orthogonal complement of `other` inside `self` (other ⊆ self assumed;
    /// the part of other outside self is ignored up to the tolerance).
    pub fn ominus(&self, other: &Subspace, rel_tol: f64) -> Subspace {
        // Coordinates of other's basis inside self, then complement there.
        let inner = self.coords_of(&other.basis);
        let comp_in_self = linalg::orthonormal_complement(&inner, rel_tol);
        Subspace {
            ambient_dim: self.ambient_dim,
            basis: self.basis.dot(&comp_in_self),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    #[test]
    fn span_and_complement_are_orthogonal() {
        let span = ndarray::array![
            [C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(1.0, 0.0), C64::new(1.0, 0.0)]
        ];
        let s = Subspace::from_span(&span, 1e-8);
        assert_eq!(s.dim(), 1);
        let c = s.complement(1e-8);
        assert_eq!(c.dim(), 2);
        assert!(linalg::fro_norm(&s.coords_of(&c.basis)) < 1e-12);
    }

    #[test]
    fn ominus_recovers_the_gap() {
        let full = Subspace::full(3);
        let line = Subspace::from_mask(&[true, false, false]);
        let rest = full.ominus(&line, 1e-10);
        assert_eq!(rest.dim(), 2);
        assert!(rest.containment_residual(&line.basis) > 0.99);
    }

    #[test]
    fn direct_sum_rejects_overlap() {
        let a = Subspace::from_mask(&[true, false]);
        let b = Subspace::from_mask(&[true, true]);
        assert!(a.direct_sum(&b, 1e-10).is_err());
    }
}
