//! Dense complex linear algebra underneath the operator models.
//!
//! Everything in this crate is a dense `Array2<Complex64>`; this module wraps
//! the BLAS/LAPACK calls (products, Hermitian eigendecompositions, SVD) and
//! adds the few derived operations the operator checks need: PSD square roots
//! with eigenvalue clamping, orthonormal ranges and complements at a relative
//! rank tolerance, operator norms, and minimal-norm solves against a PSD
//! factor.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use ndarray_linalg::{Eigh, SVD, UPLO};
use num_complex::Complex64 as C64;

pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

/// Size under which operator norms go through full LAPACK SVD; above it a
/// power iteration on A*A is used instead.
const OP_NORM_SVD_LIMIT: usize = 384;

pub fn eye(n: usize) -> CMat {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

pub fn zeros(r: usize, c: usize) -> CMat {
    Array2::zeros((r, c))
}

/// Conjugate transpose.
pub fn adj(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

pub fn scale(a: &CMat, s: f64) -> CMat {
    a.mapv(|z| z * s)
}

pub fn fro_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value. Exact (LAPACK) for small matrices, power iteration
/// on A*A for large ones; the iteration is deterministic.
pub fn op_norm(a: &CMat) -> f64 {
    let (r, c) = a.dim();
    if r == 0 || c == 0 {
        return 0.0;
    }
    if r.min(c) <= OP_NORM_SVD_LIMIT {
        let (_, sv, _) = a.svd(false, false).expect("svd failed");
        return sv.iter().cloned().fold(0.0, f64::max);
    }
    op_norm_power(a)
}

fn op_norm_power(a: &CMat) -> f64 {
    let (r, c) = a.dim();
    // Fixed deterministic start vector with energy in every coordinate.
    let mut v: CVec = Array1::from_shape_fn(c, |i| {
        C64::new(1.0 + (i as f64 * 0.7391).sin(), (i as f64 * 0.3571).cos())
    });
    let mut norm = vec_norm(&v);
    if norm == 0.0 {
        return 0.0;
    }
    v.mapv_inplace(|z| z / norm);
    let ah = adj(a);
    let mut sigma2 = 0.0f64;
    for _ in 0..120 {
        let w = a.dot(&v);
        let u = ah.dot(&w);
        let new_sigma2 = u.iter().zip(v.iter()).map(|(x, y)| (x * y.conj()).re).sum::<f64>();
        norm = vec_norm(&u);
        if norm == 0.0 {
            return 0.0;
        }
        v = u.mapv(|z| z / norm);
        if (new_sigma2 - sigma2).abs() <= 1e-14 * new_sigma2.abs().max(1e-300) {
            sigma2 = new_sigma2;
            break;
        }
        sigma2 = new_sigma2;
    }
    let _ = r;
    sigma2.max(0.0).sqrt()
}

/// Singular values, descending.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let (_, sv, _) = a.svd(false, false).expect("svd failed");
    let mut out: Vec<f64> = sv.to_vec();
    out.sort_by(|x, y| y.partial_cmp(x).unwrap());
    out
}

/// Kronecker product A ⊗ B under the rightmost-fastest (row-major) convention.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            let mut block = out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            block.zip_mut_with(b, |o, &bb| *o += aij * bb);
        }
    }
    out
}

/// Block-diagonal ampliation I_left ⊗ A.
pub fn ampliate(a: &CMat, left_dim: usize) -> CMat {
    let (r, c) = a.dim();
    let mut out = zeros(left_dim * r, left_dim * c);
    for b in 0..left_dim {
        out.slice_mut(s![b * r..(b + 1) * r, b * c..(b + 1) * c]).assign(a);
    }
    out
}

/// Hermitian eigendecomposition of (A + A*)/2, eigenvalues ascending.
/// Returns the residual ‖A − A*‖/2 alongside so callers can reject
/// assemblies that were not actually Hermitian.
pub fn eigh_hermitize(a: &CMat) -> (Array1<f64>, CMat, f64) {
    let h = scale(&(a + &adj(a)), 0.5);
    let skew = fro_norm(&(a - &adj(a))) * 0.5;
    let (vals, vecs) = h.eigh(UPLO::Lower).expect("eigh failed");
    (vals, vecs, skew)
}

/// PSD square root by eigenvalue clamping: eigenvalues in [−clamp, 0) are set
/// to zero. Returns (sqrt, min eigenvalue before clamping).
pub fn psd_sqrt(a: &CMat, clamp: f64) -> (Option<CMat>, f64) {
    let (vals, vecs, _) = eigh_hermitize(a);
    let min_eig = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < -clamp {
        return (None, min_eig);
    }
    let root = rebuild_hermitian(&vals, &vecs, |l| l.max(0.0).sqrt());
    (Some(root), min_eig)
}

/// Moore–Penrose-style inverse of a PSD matrix with relative eigenvalue
/// cutoff.
pub fn psd_pinv(a: &CMat, rel_cut: f64) -> CMat {
    let (vals, vecs, _) = eigh_hermitize(a);
    let max = vals.iter().cloned().fold(0.0, f64::max);
    let cut = rel_cut * max.max(f64::MIN_POSITIVE);
    rebuild_hermitian(&vals, &vecs, |l| if l > cut { 1.0 / l } else { 0.0 })
}

fn rebuild_hermitian(vals: &Array1<f64>, vecs: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let n = vecs.nrows();
    let mut scaled = vecs.clone();
    for (j, mut col) in scaled.axis_iter_mut(Axis(1)).enumerate() {
        let fl = C64::new(f(vals[j]), 0.0);
        col.mapv_inplace(|z| z * fl);
    }
    let mut out = scaled.dot(&adj(vecs));
    debug_assert_eq!(out.nrows(), n);
    // Symmetrize away roundoff.
    out = scale(&(&out + &adj(&out)), 0.5);
    out
}

/// Orthonormal basis of the column span of `a`, at relative singular-value
/// tolerance `rel_tol`.
pub fn orthonormal_range(a: &CMat, rel_tol: f64) -> CMat {
    let (r, _) = a.dim();
    if a.ncols() == 0 || fro_norm(a) == 0.0 {
        return zeros(r, 0);
    }
    let (u, sv, _) = a.svd(true, false).expect("svd failed");
    let u = u.expect("left singular vectors");
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&x| x > rel_tol * smax).count();
    u.slice(s![.., ..rank]).to_owned()
}

/// Orthonormal basis of the orthogonal complement of the column span of `a`.
pub fn orthonormal_complement(a: &CMat, rel_tol: f64) -> CMat {
    let (r, c) = a.dim();
    if c == 0 || fro_norm(a) == 0.0 {
        return eye(r);
    }
    let (u, sv, _) = a.svd(true, false).expect("svd failed");
    let u = u.expect("left singular vectors");
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&x| x > rel_tol * smax).count();
    // Left singular vectors beyond the rank span the complement; LAPACK's
    // full U is unitary, so the tail columns are exactly what we need.
    u.slice(s![.., rank..]).to_owned()
}

/// Numerical rank at relative singular-value tolerance.
pub fn rank(a: &CMat, rel_tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 || fro_norm(a) == 0.0 {
        return 0;
    }
    let (_, sv, _) = a.svd(false, false).expect("svd failed");
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&x| x > rel_tol * smax).count()
}

/// Minimal-norm solve of X · S = C for PSD `S`: X = C · S⁺, zero on ker S.
pub fn solve_against_psd(c: &CMat, s_psd: &CMat, rel_cut: f64) -> CMat {
    c.dot(&psd_pinv(s_psd, rel_cut))
}

/// sin of the largest principal angle between two subspaces given by
/// orthonormal-column matrices; equals ‖P_A − P_B‖₂ for equal dimensions.
pub fn principal_angle_sin(qa: &CMat, qb: &CMat) -> f64 {
    if qa.ncols() != qb.ncols() {
        return 1.0;
    }
    if qa.ncols() == 0 {
        return 0.0;
    }
    let pa = qa.dot(&adj(qa));
    let pb = qb.dot(&adj(qb));
    op_norm(&(&pa - &pb))
}

/// View-free helper: A · B with BLAS.
pub fn mul(a: &CMat, b: &CMat) -> CMat {
    a.dot(b)
}

pub fn mulv(a: &CMat, v: &CVec) -> CVec {
    a.dot(v)
}

/// (I_{d_out} ⊗ A) · (t ⊗ M) · (I_{d_in} ⊗ B) assembled blockwise.
///
/// Shapes: A: p × (d_a·m), t: (d_out·d_a) × (d_in·d_b), M: m × m',
/// B: (d_b·m') × q. Result: (d_out·p) × (d_in·q). This realizes every
/// "flip sandwiched by ampliations" expression without materializing the
/// ampliated factors.
pub fn flip_sandwich(
    a: &CMat,
    d_a: usize,
    t: &CMat,
    m: &CMat,
    b: &CMat,
    d_b: usize,
    d_out: usize,
    d_in: usize,
) -> CMat {
    let p = a.nrows();
    let ma = a.ncols() / d_a;
    let mb = m.ncols();
    let q = b.ncols();
    assert_eq!(a.ncols(), d_a * ma);
    assert_eq!(m.nrows(), ma);
    assert_eq!(b.nrows(), d_b * mb);
    assert_eq!(t.dim(), (d_out * d_a, d_in * d_b));
    // Precompute A_slot · M for each E-slot of A's domain.
    let am: Vec<CMat> = (0..d_a)
        .map(|ap| a.slice(s![.., ap * ma..(ap + 1) * ma]).dot(m))
        .collect();
    let bblk: Vec<ArrayView2<C64>> = (0..d_b)
        .map(|bp| b.slice(s![bp * mb..(bp + 1) * mb, ..]))
        .collect();
    let mut out = zeros(d_out * p, d_in * q);
    for bo in 0..d_out {
        for ai in 0..d_in {
            let mut acc = zeros(p, q);
            for ap in 0..d_a {
                for bp in 0..d_b {
                    let w = t[[bo * d_a + ap, ai * d_b + bp]];
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let term = am[ap].dot(&bblk[bp]);
                    acc.zip_mut_with(&term, |o, &x| *o += w * x);
                }
            }
            out.slice_mut(s![bo * p..(bo + 1) * p, ai * q..(ai + 1) * q]).assign(&acc);
        }
    }
    out
}

/// Zero out the rows of `a` whose H-slot (position mod mask length within
/// each E-block) is masked off. The matrix is a map into (E-slots) ⊗ H with
/// H varying fastest.
pub fn mask_rows(a: &CMat, mask: &[bool]) -> CMat {
    let n = mask.len();
    assert_eq!(a.nrows() % n, 0);
    let mut out = a.clone();
    for (i, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
        if !mask[i % n] {
            row.fill(C64::new(0.0, 0.0));
        }
    }
    out
}

/// Column analogue of [`mask_rows`].
pub fn mask_cols(a: &CMat, mask: &[bool]) -> CMat {
    let n = mask.len();
    assert_eq!(a.ncols() % n, 0);
    let mut out = a.clone();
    for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
        if !mask[j % n] {
            col.fill(C64::new(0.0, 0.0));
        }
    }
    out
}
