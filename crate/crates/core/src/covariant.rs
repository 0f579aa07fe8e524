//! Covariant tuples of matrices: the commutation relation, isometry and
//! doubly commuting checks, ordered products Ṽ_n, purity, and the defect
//! operator Δ_*(V) with its Brehmer–Solel positivity test.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::subspace::Subspace;
use crate::tensor::{ampliate, MultiIndex, ProductSystemSpec};
use crate::Tolerances;

/// A covariant tuple: for each coordinate i a row operator
/// Ṽ^{(i)}: E_i ⊗ H → H as a dense h_dim × (d_i·h_dim) matrix. The
/// coefficient algebra is scalar, so no representation data is stored.
#[derive(Clone, Debug)]
pub struct CovariantTuple {
    pub spec: ProductSystemSpec,
    pub h_dim: usize,
    pub ops: Vec<CMat>,
}

impl CovariantTuple {
    pub fn new(spec: ProductSystemSpec, h_dim: usize, ops: Vec<CMat>) -> Result<Self> {
        if ops.len() != spec.k() {
            return Err(Error::Shape(format!(
                "expected {} operators, got {}",
                spec.k(),
                ops.len()
            )));
        }
        for (i, op) in ops.iter().enumerate() {
            let want = (h_dim, spec.dim(i) * h_dim);
            if op.dim() != want {
                return Err(Error::Shape(format!(
                    "operator {i} has shape {:?}, expected {want:?}",
                    op.dim()
                )));
            }
        }
        Ok(CovariantTuple { spec, h_dim, ops })
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    /// Zero tuple on a space of the given dimension.
    pub fn zero(spec: ProductSystemSpec, h_dim: usize) -> Self {
        let ops = (0..spec.k())
            .map(|i| linalg::zeros(h_dim, spec.dim(i) * h_dim))
            .collect();
        CovariantTuple { spec, h_dim, ops }
    }
}

/// Frobenius residuals of the commutation relation, one per ordered pair.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub pair_residuals: Vec<((usize, usize), f64)>,
    pub max_residual: f64,
    pub accepted: bool,
}

/// Residual of Ṽ^{(i)}(I⊗Ṽ^{(j)}) − Ṽ^{(j)}(I⊗Ṽ^{(i)})(t_{i,j}⊗I) for every
/// ordered pair i ≠ j; the tuple is accepted iff the max is ≤ τ_exact.
pub fn validate(tuple: &CovariantTuple, tol: &Tolerances) -> Result<ValidationReport> {
    // Re-check shapes so tuples built by hand fail loudly here.
    CovariantTuple::new(tuple.spec.clone(), tuple.h_dim, tuple.ops.clone())?;
    let k = tuple.k();
    let h = tuple.h_dim;
    let mut pair_residuals = Vec::new();
    let mut max_residual: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let d_i = tuple.spec.dim(i);
            let d_j = tuple.spec.dim(j);
            // LHS: E_i⊗E_j⊗H → H.
            let lhs = tuple.ops[i].dot(&ampliate(&tuple.ops[j], d_i));
            let flip = linalg::kron(&tuple.spec.flip(i, j), &linalg::eye(h));
            let rhs = tuple.ops[j].dot(&ampliate(&tuple.ops[i], d_j)).dot(&flip);
            let res = linalg::fro_norm(&(&lhs - &rhs));
            max_residual = max_residual.max(res);
            pair_residuals.push(((i, j), res));
        }
    }
    Ok(ValidationReport { pair_residuals, max_residual, accepted: max_residual <= tol.exact })
}

#[derive(Clone, Debug)]
pub struct IsometryReport {
    /// Operator-norm residual ‖Ṽ^{(i)*}Ṽ^{(i)} − I‖ per coordinate.
    pub residuals: Vec<f64>,
    pub isometric: Vec<bool>,
}

pub fn is_isometric(tuple: &CovariantTuple, tol: &Tolerances) -> IsometryReport {
    let residuals: Vec<f64> = tuple
        .ops
        .iter()
        .map(|v| {
            let g = linalg::adj(v).dot(v);
            linalg::op_norm(&(&g - &linalg::eye(g.nrows())))
        })
        .collect();
    let isometric = residuals.iter().map(|&r| r <= tol.exact).collect();
    IsometryReport { residuals, isometric }
}

#[derive(Clone, Debug)]
pub struct DoublyCommutingReport {
    /// Frobenius residual of the doubly commuting identity per unordered
    /// pair i < j.
    pub pair_residuals: Vec<((usize, usize), f64)>,
    pub max_residual: f64,
    pub doubly_commuting: bool,
}

/// Residuals of Ṽ^{(j)*}Ṽ^{(i)} − (I_{E_j}⊗Ṽ^{(i)})(t_{i,j}⊗I)(I_{E_i}⊗Ṽ^{(j)*}).
/// For k = 1 the report is empty and vacuously true.
pub fn is_doubly_commuting(tuple: &CovariantTuple, tol: &Tolerances) -> DoublyCommutingReport {
    let k = tuple.k();
    let mut pair_residuals = Vec::new();
    let mut max_residual: f64 = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            let res = dc_residual(tuple, i, j);
            max_residual = max_residual.max(res);
            pair_residuals.push(((i, j), res));
        }
    }
    DoublyCommutingReport {
        pair_residuals,
        doubly_commuting: max_residual <= tol.exact,
        max_residual,
    }
}

pub(crate) fn dc_residual(tuple: &CovariantTuple, i: usize, j: usize) -> f64 {
    let d_i = tuple.spec.dim(i);
    let d_j = tuple.spec.dim(j);
    let lhs = linalg::adj(&tuple.ops[j]).dot(&tuple.ops[i]);
    let rhs = linalg::flip_sandwich(
        &tuple.ops[i],
        d_i,
        &tuple.spec.flip(i, j),
        &linalg::eye(tuple.h_dim),
        &linalg::adj(&tuple.ops[j]),
        d_j,
        d_j,
        d_i,
    );
    linalg::fro_norm(&(&lhs - &rhs))
}

/// Ṽ^{(i)}_l : E_i^{⊗l} ⊗ H → H, the iterated product of one coordinate.
pub fn v_tilde_pow(tuple: &CovariantTuple, i: usize, l: usize) -> CMat {
    let d_i = tuple.spec.dim(i);
    let mut acc = linalg::eye(tuple.h_dim);
    for _ in 0..l {
        acc = tuple.ops[i].dot(&ampliate(&acc, d_i));
    }
    acc
}

/// The ordered product Ṽ_m = Ṽ^{(1)}_{m_1}(I ⊗ Ṽ^{(2)}_{m_2}) ⋯ as a map
/// 𝔼(m) ⊗ H → H; Ṽ_0 = I_H.
pub fn v_tilde_of(tuple: &CovariantTuple, m: &MultiIndex) -> Result<CMat> {
    if m.len() != tuple.k() {
        return Err(Error::Shape(format!(
            "multi-index length {} does not match k = {}",
            m.len(),
            tuple.k()
        )));
    }
    // Compose right-to-left; after processing coordinate i the accumulator
    // maps E_i^{⊗m_i} ⊗ ⋯ ⊗ E_k^{⊗m_k} ⊗ H → H.
    let mut acc = linalg::eye(tuple.h_dim);
    for i in (0..tuple.k()).rev() {
        let pow = v_tilde_pow(tuple, i, m.0[i]);
        let left = tuple.spec.dim(i).pow(m.0[i] as u32);
        acc = pow.dot(&ampliate(&acc, left));
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct PurityCoordinate {
    /// Operator norm ‖Ṽ^{(j)}_p‖ for p = 1..=p_max.
    pub norms: Vec<f64>,
    /// First p with norm ≤ τ_pure, if any.
    pub degree: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct PurityReport {
    pub coordinates: Vec<PurityCoordinate>,
    /// True iff every coordinate crossed the purity threshold by p_max.
    pub pure: bool,
}

/// Since H is finite-dimensional, SOT and norm convergence coincide; report
/// ‖Ṽ^{(j)}_p‖ at each p and the first p under τ_pure.
pub fn purity_degree(tuple: &CovariantTuple, p_max: usize, tol: &Tolerances) -> PurityReport {
    let mut coordinates = Vec::with_capacity(tuple.k());
    for i in 0..tuple.k() {
        let d_i = tuple.spec.dim(i);
        let mut norms = Vec::with_capacity(p_max);
        let mut degree = None;
        let mut acc = linalg::eye(tuple.h_dim);
        for p in 1..=p_max {
            acc = tuple.ops[i].dot(&ampliate(&acc, d_i));
            let nrm = linalg::op_norm(&acc);
            norms.push(nrm);
            if degree.is_none() && nrm <= tol.pure {
                degree = Some(p);
            }
        }
        coordinates.push(PurityCoordinate { norms, degree });
    }
    let pure = coordinates.iter().all(|c| c.degree.is_some());
    PurityReport { coordinates, pure }
}

/// The defect Δ_*(V)² = Σ_{u⊆I_k} (−1)^{|u|} Ṽ_{e(u)} Ṽ_{e(u)}^*, its PSD
/// square root (absent when Brehmer–Solel fails), and the defect space.
#[derive(Clone, Debug)]
pub struct DefectReport {
    pub delta_star_sq: CMat,
    pub delta_star: Option<CMat>,
    pub min_eigenvalue: f64,
    /// 𝒟_{*,V} = closure of the range of Δ_*, via eigenvectors above the
    /// clamp.
    pub d_star: Subspace,
    pub brehmer: bool,
    pub hermiticity_residual: f64,
}

pub fn defect(tuple: &CovariantTuple, tol: &Tolerances) -> Result<DefectReport> {
    let k = tuple.k();
    let h = tuple.h_dim;
    let mut acc = linalg::zeros(h, h);
    for mask in 0u32..(1 << k) {
        let subset: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        let e_u = MultiIndex::from_subset(k, &subset);
        let v = v_tilde_of(tuple, &e_u)?;
        let term = v.dot(&linalg::adj(&v));
        let sign = if subset.len() % 2 == 0 { 1.0 } else { -1.0 };
        acc.zip_mut_with(&term, |a, &t| *a += t * sign);
    }
    let (vals, vecs, skew) = linalg::eigh_hermitize(&acc);
    if skew > tol.exact {
        return Err(Error::Numerical(format!(
            "defect assembly is not Hermitian: residual {skew:.3e}"
        )));
    }
    let min_eigenvalue = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let brehmer = min_eigenvalue >= -tol.psd;
    let max_eig = vals.iter().cloned().fold(0.0, f64::max).max(0.0);
    // Defect space: eigenvectors with eigenvalue above the clamp.
    let keep: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > tol.psd * max_eig.max(1.0)).collect();
    let mut basis = linalg::zeros(h, keep.len());
    for (col, &j) in keep.iter().enumerate() {
        basis.column_mut(col).assign(&vecs.column(j));
    }
    let d_star = Subspace { ambient_dim: h, basis };
    let delta_star = if brehmer {
        let (root, _) = linalg::psd_sqrt(&acc, tol.psd);
        root
    } else {
        None
    };
    Ok(DefectReport {
        delta_star_sq: acc,
        delta_star,
        min_eigenvalue,
        d_star,
        brehmer,
        hermiticity_residual: skew,
    })
}

/// True iff the minimum eigenvalue of Δ_*² is ≥ −τ_psd.
pub fn brehmer_check(tuple: &CovariantTuple, tol: &Tolerances) -> Result<(bool, f64)> {
    let report = defect(tuple, tol)?;
    Ok((report.brehmer, report.min_eigenvalue))
}

/// The compressed tuple T̃^{(i)} = P_K Ṽ^{(i)} (I_{E_i} ⊗ P_K), expressed in
/// K's own orthonormal basis.
pub fn compress(tuple: &CovariantTuple, k_sub: &Subspace) -> Result<CovariantTuple> {
    if k_sub.ambient_dim != tuple.h_dim {
        return Err(Error::Shape(format!(
            "subspace ambient {} does not match h_dim {}",
            k_sub.ambient_dim, tuple.h_dim
        )));
    }
    let b = &k_sub.basis;
    let bh = linalg::adj(b);
    let ops = (0..tuple.k())
        .map(|i| bh.dot(&tuple.ops[i]).dot(&ampliate(b, tuple.spec.dim(i))))
        .collect();
    CovariantTuple::new(tuple.spec.clone(), k_sub.dim(), ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::Subspace;
    use num_complex::Complex64 as C64;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn scalar_pair(v1: CMat, v2: CMat) -> CovariantTuple {
        let spec = ProductSystemSpec::with_swap_flips(&[1, 1]);
        let h = v1.nrows();
        CovariantTuple::new(spec, h, vec![v1, v2]).unwrap()
    }

    fn nilpotent(a: f64) -> CMat {
        ndarray::array![[c(0.0), c(a)], [c(0.0), c(0.0)]]
    }

    #[test]
    fn validate_zero_and_commuting_tuples() {
        let tol = Tolerances::default();
        let t = scalar_pair(linalg::zeros(2, 2), linalg::zeros(2, 2));
        let rep = validate(&t, &tol).unwrap();
        assert!(rep.accepted);
        assert_eq!(rep.max_residual, 0.0);

        let t = scalar_pair(nilpotent(0.3), nilpotent(0.7));
        let rep = validate(&t, &tol).unwrap();
        assert!(rep.accepted, "commuting nilpotents satisfy the relation");
    }

    #[test]
    fn validate_noncommuting_pair_has_sqrt_two_residual() {
        let tol = Tolerances::default();
        let v1 = ndarray::array![[c(0.0), c(1.0)], [c(0.0), c(0.0)]];
        let v2 = ndarray::array![[c(0.0), c(0.0)], [c(1.0), c(0.0)]];
        let rep = validate(&scalar_pair(v1, v2), &tol).unwrap();
        assert!(!rep.accepted);
        assert!((rep.max_residual - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn isometry_detects_zero_and_contraction() {
        let tol = Tolerances::default();
        let t = scalar_pair(linalg::zeros(2, 2), nilpotent(1.0 / 2f64.sqrt()));
        let rep = is_isometric(&t, &tol);
        assert!((rep.residuals[0] - 1.0).abs() < 1e-12, "zero operator has residual 1");
        assert!(!rep.isometric[1]);
    }

    #[test]
    fn doubly_commuting_residual_for_nonnormal_equals_sqrt_two() {
        let tol = Tolerances::default();
        let v = nilpotent(1.0);
        let rep = is_doubly_commuting(&scalar_pair(v.clone(), v), &tol);
        assert_eq!(rep.pair_residuals.len(), 1);
        assert!((rep.max_residual - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn doubly_commuting_vacuous_for_k_one() {
        let tol = Tolerances::default();
        let spec = ProductSystemSpec::with_swap_flips(&[1]);
        let t = CovariantTuple::new(spec, 2, vec![nilpotent(0.5)]).unwrap();
        let rep = is_doubly_commuting(&t, &tol);
        assert!(rep.pair_residuals.is_empty());
        assert!(rep.doubly_commuting);
    }

    #[test]
    fn v_tilde_ordered_product_matches_commuted_order() {
        // Generic commuting 3×3 pair: polynomials in one nilpotent.
        let n = ndarray::array![
            [c(0.0), c(1.0), c(0.3)],
            [c(0.0), c(0.0), c(1.0)],
            [c(0.0), c(0.0), c(0.0)]
        ];
        let v1 = n.mapv(|z| z * 0.8) + n.dot(&n).mapv(|z| z * 0.1);
        let v2 = n.mapv(|z| z * 0.5) + n.dot(&n).mapv(|z| z * 0.9);
        let t = scalar_pair(v1.clone(), v2.clone());
        let m = MultiIndex(vec![2, 1]);
        let got = v_tilde_of(&t, &m).unwrap();
        let direct = v1.dot(&v1).dot(&v2);
        let other_order = v2.dot(&v1).dot(&v1);
        assert!(linalg::fro_norm(&(&got - &direct)) < 1e-13);
        assert!(linalg::fro_norm(&(&got - &other_order)) < 1e-13);
    }

    #[test]
    fn v_tilde_trivial_cases() {
        let t = scalar_pair(nilpotent(0.4), nilpotent(0.6));
        let id = v_tilde_of(&t, &MultiIndex::zero(2)).unwrap();
        assert!(linalg::fro_norm(&(&id - &linalg::eye(2))) < 1e-15);
        let e1 = v_tilde_of(&t, &MultiIndex::unit(2, 0)).unwrap();
        assert!(linalg::fro_norm(&(&e1 - &t.ops[0])) < 1e-15);
    }

    #[test]
    fn purity_of_nilpotent_and_unitary() {
        let tol = Tolerances::default();
        let t = scalar_pair(nilpotent(0.5), nilpotent(0.5));
        let rep = purity_degree(&t, 4, &tol);
        assert_eq!(rep.coordinates[0].degree, Some(2));
        assert!((rep.coordinates[0].norms[0] - 0.5).abs() < 1e-12);

        let u = ndarray::array![[c(0.0), c(1.0)], [c(-1.0), c(0.0)]];
        let spec = ProductSystemSpec::with_swap_flips(&[1]);
        let tu = CovariantTuple::new(spec, 2, vec![u]).unwrap();
        let rep = purity_degree(&tu, 6, &tol);
        assert_eq!(rep.coordinates[0].degree, None);
        assert!(rep.coordinates[0].norms.iter().all(|&n| (n - 1.0).abs() < 1e-12));
    }

    #[test]
    fn defect_closed_form_nilpotent_pair() {
        let tol = Tolerances::default();
        let a = 1.0 / 2f64.sqrt();
        let t = scalar_pair(nilpotent(a), nilpotent(a));
        let rep = defect(&t, &tol).unwrap();
        // Δ_*² = I − 2NN* = diag(0,1); Δ_* the same; defect space = span e₂.
        let expected = ndarray::array![[c(0.0), c(0.0)], [c(0.0), c(1.0)]];
        assert!(linalg::fro_norm(&(&rep.delta_star_sq - &expected)) < 1e-12);
        let ds = rep.delta_star.as_ref().unwrap();
        assert!(linalg::fro_norm(&(ds - &expected)) < 1e-12);
        assert_eq!(rep.d_star.dim(), 1);
        assert!(rep.d_star.basis[[1, 0]].norm() > 0.999);
        assert!(rep.brehmer);
    }

    #[test]
    fn defect_brehmer_violation_at_point_nine() {
        let tol = Tolerances::default();
        let t = scalar_pair(nilpotent(0.9), nilpotent(0.9));
        let rep = defect(&t, &tol).unwrap();
        assert!(!rep.brehmer);
        assert!((rep.min_eigenvalue + 0.62).abs() < 1e-12);
        assert!(rep.delta_star.is_none());
    }

    #[test]
    fn brehmer_for_k_one_contractions() {
        let tol = Tolerances::default();
        let spec = ProductSystemSpec::with_swap_flips(&[1]);
        let t = CovariantTuple::new(spec, 2, vec![nilpotent(0.99)]).unwrap();
        let (ok, min_eig) = brehmer_check(&t, &tol).unwrap();
        assert!(ok, "I − ṼṼ* ≥ 0 for any contraction, min eig {min_eig}");
    }

    #[test]
    fn compress_full_space_is_identity_and_zero_is_empty() {
        let t = scalar_pair(nilpotent(0.4), nilpotent(0.2));
        let full = Subspace::full(2);
        let same = compress(&t, &full).unwrap();
        for i in 0..2 {
            assert!(linalg::fro_norm(&(&same.ops[i] - &t.ops[i])) < 1e-14);
        }
        let zero = Subspace::zero(2);
        let empty = compress(&t, &zero).unwrap();
        assert_eq!(empty.h_dim, 0);
    }

    #[test]
    fn compress_is_idempotent_at_matrix_level() {
        let t = scalar_pair(nilpotent(0.4), nilpotent(0.2));
        let k = Subspace::from_span(
            &ndarray::array![[c(1.0)], [c(1.0)]],
            1e-10,
        );
        let once = compress(&t, &k).unwrap();
        let again = compress(&once, &Subspace::full(1)).unwrap();
        for i in 0..2 {
            assert!(linalg::fro_norm(&(&once.ops[i] - &again.ops[i])) < 1e-14);
        }
    }
}
