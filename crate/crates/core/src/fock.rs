//! Induced (creation-operator) representations on truncated Fock modules,
//! wandering subspaces, Wold/GWS checks, and subspace classification.

use ndarray::concatenate;
use ndarray::Axis;

use crate::covariant::{self, CovariantTuple};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::subspace::Subspace;
use crate::tensor::{ampliate, MultiIndex, ProductSystemSpec, TruncatedFockModule};
use crate::Tolerances;

/// The induced representation S̃^{(i)} = V_{ξ_i} ⊗ I_H on a truncated Fock
/// module, with the top-level output truncated to zero.
#[derive(Clone, Debug)]
pub struct InducedRep {
    pub module: TruncatedFockModule,
    pub tuple: CovariantTuple,
}

/// Build the induced representation. Creation operators are assembled
/// through the insertion flips, so the commutation relation and the doubly
/// commuting identity hold exactly on interior vectors; the adjoints lower
/// levels and are truncation-exact everywhere.
pub fn induced_rep(
    spec: ProductSystemSpec,
    h_dim: usize,
    p: usize,
    guard: usize,
) -> Result<InducedRep> {
    if p < 1 {
        return Err(Error::Shape("level cap must be at least 1".into()));
    }
    let module = TruncatedFockModule::new(spec.clone(), h_dim, p, guard)?;
    let ops: Result<Vec<CMat>> = (0..spec.k()).map(|i| module.creation(i)).collect();
    let tuple = CovariantTuple::new(spec, module.dim, ops?)?;
    Ok(InducedRep { module, tuple })
}

impl InducedRep {
    /// Interior mask at the module's guard band.
    pub fn interior_mask(&self) -> Vec<bool> {
        self.module.interior_mask()
    }

    /// Interior mask widened per-coordinate (for degree-raising symbols).
    pub fn interior_mask_with(&self, extra: &MultiIndex) -> Vec<bool> {
        self.module.interior_mask_with(extra)
    }

    pub fn interior_subspace(&self) -> Subspace {
        Subspace::from_mask(&self.interior_mask())
    }

    /// The coordinate subspace of one level block.
    pub fn level_subspace(&self, n: &MultiIndex) -> Option<Subspace> {
        let idx = self.module.level_index(n)?;
        let mut mask = vec![false; self.module.dim];
        let off = self.module.level_offset(idx);
        let len = self.module.spec.edim(n) * self.module.h_dim;
        for m in mask.iter_mut().skip(off).take(len) {
            *m = true;
        }
        Some(Subspace::from_mask(&mask))
    }

    /// Classification plus a guard-band warning when the subspace carries
    /// weight on the top truncation levels.
    pub fn classify_subspace(&self, k_sub: &Subspace, tol: &Tolerances) -> SubspaceClass {
        let mut class = classify_subspace(&self.tuple, k_sub, tol);
        let interior = self.interior_mask();
        let masked = linalg::mask_rows(&k_sub.basis, &interior);
        let top_mass = linalg::op_norm(&(&k_sub.basis - &masked));
        class.guard_warning = top_mass > tol.exact;
        class
    }
}

/// W = H ⊖ Σ_i range(Ṽ^{(i)}), the orthogonal complement of the joint range.
pub fn wandering_subspace(tuple: &CovariantTuple, tol: &Tolerances) -> Subspace {
    let views: Vec<_> = tuple.ops.iter().map(|m| m.view()).collect();
    if views.is_empty() {
        return Subspace::full(tuple.h_dim);
    }
    let stacked = concatenate(Axis(1), &views).expect("consistent row counts");
    Subspace {
        ambient_dim: tuple.h_dim,
        basis: linalg::orthonormal_complement(&stacked, tol.rank),
    }
}

/// Report of the generating-wandering-subspace check.
#[derive(Clone, Debug)]
pub struct GwsReport {
    pub orthogonal: bool,
    pub spanning: bool,
    /// Largest overlap between distinct blocks Ṽ_n(𝔼(n)⊗W).
    pub max_overlap: f64,
    /// ‖(I − P_span)‖ restricted to the ambient (or 0 if the blocks span).
    pub spanning_residual: f64,
}

/// Checks pairwise orthogonality of the blocks Ṽ_n(𝔼(n)⊗W) over distinct n
/// with max nⱼ ≤ p, and whether their union spans H.
pub fn gws_check(
    tuple: &CovariantTuple,
    w: &Subspace,
    p: usize,
    tol: &Tolerances,
) -> Result<GwsReport> {
    let levels = crate::tensor::enumerate_levels(p, tuple.k());
    let mut blocks: Vec<CMat> = Vec::new();
    for n in &levels {
        if w.dim() == 0 {
            continue;
        }
        let v_n = covariant::v_tilde_of(tuple, n)?;
        let span = v_n.dot(&ampliate(&w.basis, tuple.spec.edim(n)));
        let q = linalg::orthonormal_range(&span, tol.rank);
        blocks.push(q);
    }
    let mut max_overlap = 0.0f64;
    for a in 0..blocks.len() {
        for b in (a + 1)..blocks.len() {
            if blocks[a].ncols() == 0 || blocks[b].ncols() == 0 {
                continue;
            }
            let ov = linalg::op_norm(&linalg::adj(&blocks[a]).dot(&blocks[b]));
            max_overlap = max_overlap.max(ov);
        }
    }
    let spanning_residual = if blocks.is_empty() {
        if tuple.h_dim == 0 {
            0.0
        } else {
            1.0
        }
    } else {
        let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
        let all = concatenate(Axis(1), &views).expect("consistent rows");
        let q = linalg::orthonormal_range(&all, tol.rank);
        let proj = q.dot(&linalg::adj(&q));
        linalg::op_norm(&(&proj - &linalg::eye(tuple.h_dim)))
    };
    Ok(GwsReport {
        orthogonal: max_overlap <= tol.thm,
        spanning: spanning_residual <= tol.thm,
        max_overlap,
        spanning_residual,
    })
}

/// Classification of a subspace: invariant / coinvariant / reducing /
/// quotient, each with its residual.
#[derive(Clone, Debug)]
pub struct SubspaceClass {
    pub invariant: bool,
    pub coinvariant: bool,
    pub reducing: bool,
    pub quotient: bool,
    pub invariant_residual: f64,
    pub coinvariant_residual: f64,
    pub quotient_residual: f64,
    pub guard_warning: bool,
}

/// Quotient iff ‖(I − I⊗P_K)Ṽ^{(i)*}P_K‖ ≤ τ for all i; invariant iff
/// ‖(I−P_K)Ṽ^{(i)}(I⊗P_K)‖ ≤ τ; reducing iff K and K⊥ are both invariant.
pub fn classify_subspace(tuple: &CovariantTuple, k_sub: &Subspace, tol: &Tolerances) -> SubspaceClass {
    let n = tuple.h_dim;
    let p_k = k_sub.projector();
    let p_k_perp = &linalg::eye(n) - &p_k;
    let mut inv_res = 0.0f64;
    let mut coinv_res = 0.0f64;
    let mut quot_res = 0.0f64;
    for i in 0..tuple.k() {
        let d_i = tuple.spec.dim(i);
        let v = &tuple.ops[i];
        // Invariance: leaving K under the action.
        let leave = p_k_perp.dot(v).dot(&ampliate(&p_k, d_i));
        inv_res = inv_res.max(linalg::op_norm(&leave));
        // Co-invariance of K ⟺ invariance of K⊥.
        let leave_perp = p_k.dot(v).dot(&ampliate(&p_k_perp, d_i));
        coinv_res = coinv_res.max(linalg::op_norm(&leave_perp));
        // Quotient: Ṽ^{(i)*}K ⊆ E_i ⊗ K.
        let vstar_k = linalg::adj(v).dot(&k_sub.basis);
        let outside = &vstar_k - &ampliate(&p_k, d_i).dot(&vstar_k);
        quot_res = quot_res.max(linalg::op_norm(&outside));
    }
    SubspaceClass {
        invariant: inv_res <= tol.exact,
        coinvariant: coinv_res <= tol.exact,
        reducing: inv_res <= tol.exact && coinv_res <= tol.exact,
        quotient: quot_res <= tol.exact,
        invariant_residual: inv_res,
        coinvariant_residual: coinv_res,
        quotient_residual: quot_res,
        guard_warning: false,
    }
}

/// Restriction of the tuple to an invariant subspace, expressed in S's own
/// basis. Errors when S is not invariant beyond τ_exact.
pub fn restrict(tuple: &CovariantTuple, s: &Subspace, tol: &Tolerances) -> Result<CovariantTuple> {
    let class = classify_subspace(tuple, s, tol);
    if !class.invariant {
        return Err(Error::Hypothesis(format!(
            "subspace is not invariant: residual {:.3e}",
            class.invariant_residual
        )));
    }
    covariant::compress(tuple, s)
}
