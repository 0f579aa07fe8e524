//! Multi-index arithmetic, flip unitaries, and the basis/index algebra of
//! truncated Fock modules.
//!
//! A product system over ℕ₀^k with scalar coefficients is the data of fibre
//! dimensions d_1..d_k together with unitary flips t_{i,j}: E_i⊗E_j → E_j⊗E_i.
//! The graded pieces 𝔼(n) = E_1^{⊗n_1} ⊗ ⋯ ⊗ E_k^{⊗n_k} carry a fixed normal
//! ordering; every identification between differently-ordered tensor products
//! is a composite of elementary flips and is materialized here as a concrete
//! unitary matrix.
//!
//! Basis conventions (all file formats depend on these):
//! * levels are enumerated lexicographically over {n : max nⱼ ≤ p};
//! * within 𝔼(n) tensor coordinates vary rightmost-fastest (row-major);
//! * the coefficient slot H is appended last and varies fastest of all;
//! * E_i ⊗ X uses the E-slot as the slow index.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use num_complex::Complex64 as C64;

/// Exponent tuple n ∈ ℕ₀^k.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zero(k: usize) -> Self {
        MultiIndex(vec![0; k])
    }

    /// e_i: 1 at the i-th place (0-based) and 0 otherwise.
    pub fn unit(k: usize, i: usize) -> Self {
        let mut v = vec![0; k];
        v[i] = 1;
        MultiIndex(v)
    }

    /// e(u) = Σ_{i ∈ u} e_i for a subset of coordinates.
    pub fn from_subset(k: usize, subset: &[usize]) -> Self {
        let mut v = vec![0; k];
        for &i in subset {
            v[i] = 1;
        }
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree |n| = Σ nⱼ.
    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// supp(n) = { j : nⱼ > 0 }.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.0[j] > 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn max_entry(&self) -> usize {
        self.0.iter().cloned().max().unwrap_or(0)
    }

    pub fn plus_unit(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v[i] += 1;
        MultiIndex(v)
    }

    pub fn scaled(&self, c: usize) -> Self {
        MultiIndex(self.0.iter().map(|&x| x * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// The factor-type list of 𝔼(n): n_1 copies of coordinate 0, then n_2 of
    /// coordinate 1, and so on.
    pub fn factor_types(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.total_degree());
        for (j, &nj) in self.0.iter().enumerate() {
            out.extend(std::iter::repeat(j).take(nj));
        }
        out
    }
}

/// All n with max nⱼ ≤ p, in lexicographic order. This is the canonical
/// basis-block order used everywhere.
pub fn enumerate_levels(p: usize, k: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    loop {
        out.push(MultiIndex(cur.clone()));
        // Odometer increment, most significant digit leftmost.
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if cur[pos] < p {
                cur[pos] += 1;
                for x in cur.iter_mut().skip(pos + 1) {
                    *x = 0;
                }
                break;
            }
            if pos == 0 {
                return out;
            }
        }
        if k == 0 {
            return out;
        }
    }
}

/// The coordinate-swap flip P(e_a ⊗ e_b) = e_b ⊗ e_a.
pub fn default_swap_flip(d_i: usize, d_j: usize) -> CMat {
    let mut p = linalg::zeros(d_j * d_i, d_i * d_j);
    for a in 0..d_i {
        for b in 0..d_j {
            p[[b * d_i + a, a * d_j + b]] = C64::new(1.0, 0.0);
        }
    }
    p
}

/// The data (k, d_1..d_k, flips t_{i,j}) defining a product system 𝔼 with
/// scalar coefficients.
#[derive(Clone, Debug)]
pub struct ProductSystemSpec {
    dims: Vec<usize>,
    /// flips[i][j] for i ≠ j: E_i⊗E_j → E_j⊗E_i, shape (d_j·d_i) × (d_i·d_j).
    flips: Vec<Vec<Option<CMat>>>,
}

impl ProductSystemSpec {
    /// Product system with all flips the coordinate swap.
    pub fn with_swap_flips(dims: &[usize]) -> Self {
        let k = dims.len();
        let mut flips = vec![vec![None; k]; k];
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    flips[i][j] = Some(default_swap_flip(dims[i], dims[j]));
                }
            }
        }
        ProductSystemSpec { dims: dims.to_vec(), flips }
    }

    /// Build from explicit upper-triangular flips; t_{j,i} is filled in as
    /// t_{i,j}^{-1} = t_{i,j}^*. Missing pairs default to the swap.
    pub fn new(dims: &[usize], upper_flips: &[(usize, usize, CMat)]) -> Result<Self> {
        let k = dims.len();
        if k == 0 || dims.iter().any(|&d| d == 0) {
            return Err(Error::Shape("fibre dimensions must be positive".into()));
        }
        let mut spec = Self::with_swap_flips(dims);
        for (i, j, t) in upper_flips {
            let (i, j) = (*i, *j);
            if i >= k || j >= k || i == j {
                return Err(Error::Shape(format!("flip pair ({i},{j}) out of range")));
            }
            if t.dim() != (dims[j] * dims[i], dims[i] * dims[j]) {
                return Err(Error::Shape(format!(
                    "flip ({i},{j}) has shape {:?}, expected ({},{})",
                    t.dim(),
                    dims[j] * dims[i],
                    dims[i] * dims[j]
                )));
            }
            spec.flips[i][j] = Some(t.clone());
            spec.flips[j][i] = Some(linalg::adj(t));
        }
        Ok(spec)
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    /// t_{i,j}; t_{i,i} is the identity on E_i⊗E_i.
    pub fn flip(&self, i: usize, j: usize) -> CMat {
        if i == j {
            linalg::eye(self.dims[i] * self.dims[i])
        } else {
            self.flips[i][j].as_ref().expect("flip table complete").clone()
        }
    }

    /// dim 𝔼(n) = Π dᵢ^{nᵢ}.
    pub fn edim(&self, n: &MultiIndex) -> usize {
        n.0.iter()
            .zip(&self.dims)
            .map(|(&nj, &dj)| dj.pow(nj as u32))
            .product()
    }

    /// Unitarity of every flip and the inverse pairing t_{j,i}·t_{i,j} = I,
    /// both to the given tolerance.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let k = self.k();
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let t = self.flip(i, j);
                let u = linalg::adj(&t).dot(&t);
                let res = linalg::fro_norm(&(&u - &linalg::eye(u.nrows())));
                if res > tol {
                    return Err(Error::Numerical(format!(
                        "flip ({i},{j}) is not unitary: residual {res:.3e}"
                    )));
                }
                let pair = self.flip(j, i).dot(&t);
                let res = linalg::fro_norm(&(&pair - &linalg::eye(pair.nrows())));
                if res > tol {
                    return Err(Error::Numerical(format!(
                        "flip pair ({i},{j}) does not invert: residual {res:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Move one E_i factor from the front of E_i ⊗ (factor list) rightward
    /// past the first `count` factors, as a unitary matrix.
    fn move_past(&self, i: usize, factors: &[usize], count: usize) -> CMat {
        let d_i = self.dims[i];
        let total: usize = factors.iter().map(|&f| self.dims[f]).product();
        let dim = d_i * total;
        let mut acc = linalg::eye(dim);
        let mut pre: usize = 1;
        for (r, &f) in factors.iter().take(count).enumerate() {
            let d_f = self.dims[f];
            let suf: usize = factors[r + 1..].iter().map(|&g| self.dims[g]).product();
            // Step unitary I_pre ⊗ t_{i,f} ⊗ I_suf applied to the accumulator.
            let t = self.flip(i, f);
            acc = apply_middle(&t, pre, d_i * d_f, suf, &acc);
            pre *= d_f;
        }
        acc
    }

    /// The unitary E_i ⊗ 𝔼(n) → 𝔼(n) ⊗ E_i obtained by composing elementary
    /// flips, moving the E_i factor right past each tensor factor of 𝔼(n).
    pub fn extended_flip(&self, i: usize, n: &MultiIndex) -> Result<CMat> {
        if n.len() != self.k() {
            return Err(Error::Shape(format!(
                "multi-index length {} does not match k = {}",
                n.len(),
                self.k()
            )));
        }
        let factors = n.factor_types();
        Ok(self.move_past(i, &factors, factors.len()))
    }

    /// The identification E_i ⊗ 𝔼(n) → 𝔼(n + e_i): move E_i past the factors
    /// of type < i; it then sits at the head of the E_i block, which is the
    /// normal ordering of 𝔼(n + e_i). (Moving within the E_i block would be
    /// the identity since t_{i,i} = id.)
    pub fn insertion_flip(&self, i: usize, n: &MultiIndex) -> Result<CMat> {
        if n.len() != self.k() {
            return Err(Error::Shape(format!(
                "multi-index length {} does not match k = {}",
                n.len(),
                self.k()
            )));
        }
        let factors = n.factor_types();
        let count: usize = n.0[..i].iter().sum();
        Ok(self.move_past(i, &factors, count))
    }
}

/// Apply (I_pre ⊗ T ⊗ I_suf) · A for T of square size `mid`.
fn apply_middle(t: &CMat, pre: usize, mid: usize, suf: usize, a: &CMat) -> CMat {
    let cols = a.ncols();
    let mut out = linalg::zeros(pre * mid * suf, cols);
    // Row index decomposes as ((p * mid) + m) * suf + s.
    for pblk in 0..pre {
        for mo in 0..mid {
            for mi in 0..mid {
                let w = t[[mo, mi]];
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                for s in 0..suf {
                    let ro = (pblk * mid + mo) * suf + s;
                    let ri = (pblk * mid + mi) * suf + s;
                    for c in 0..cols {
                        let v = a[[ri, c]];
                        if v != C64::new(0.0, 0.0) {
                            out[[ro, c]] += w * v;
                        }
                    }
                }
            }
        }
    }
    out
}

/// I_left ⊗ A, the ampliation used by every `I_{𝔼(n)} ⊗ ·` expression.
pub fn ampliate(a: &CMat, left_dim: usize) -> CMat {
    linalg::ampliate(a, left_dim)
}

/// Indexed orthonormal basis of ⊕_{n : max nⱼ ≤ p} 𝔼(n) ⊗ H with level
/// bookkeeping and a guard band.
#[derive(Clone, Debug)]
pub struct TruncatedFockModule {
    pub spec: ProductSystemSpec,
    pub h_dim: usize,
    pub p: usize,
    pub guard: usize,
    levels: Vec<MultiIndex>,
    offsets: Vec<usize>,
    level_lookup: HashMap<MultiIndex, usize>,
    pub dim: usize,
}

impl TruncatedFockModule {
    pub fn new(spec: ProductSystemSpec, h_dim: usize, p: usize, guard: usize) -> Result<Self> {
        if h_dim == 0 {
            return Err(Error::Shape("h_dim must be positive".into()));
        }
        if p == 0 {
            return Err(Error::Shape("level cap must be at least 1".into()));
        }
        if guard >= p {
            return Err(Error::Shape(format!("guard {guard} must be < level cap {p}")));
        }
        let levels = enumerate_levels(p, spec.k());
        let mut offsets = Vec::with_capacity(levels.len());
        let mut dim = 0usize;
        let mut level_lookup = HashMap::new();
        for (idx, n) in levels.iter().enumerate() {
            offsets.push(dim);
            dim += spec.edim(n) * h_dim;
            level_lookup.insert(n.clone(), idx);
        }
        Ok(TruncatedFockModule { spec, h_dim, p, guard, levels, offsets, level_lookup, dim })
    }

    pub fn levels(&self) -> &[MultiIndex] {
        &self.levels
    }

    pub fn level_offset(&self, idx: usize) -> usize {
        self.offsets[idx]
    }

    pub fn level_index(&self, n: &MultiIndex) -> Option<usize> {
        self.level_lookup.get(n).copied()
    }

    /// Flat basis position of (level, tensor coordinate, H coordinate).
    pub fn flat(&self, level_idx: usize, tensor: usize, h: usize) -> usize {
        self.offsets[level_idx] + tensor * self.h_dim + h
    }

    /// Inverse of [`flat`].
    pub fn unflat(&self, pos: usize) -> (usize, usize, usize) {
        // Levels are few; linear scan from the back.
        let mut idx = self.levels.len() - 1;
        while self.offsets[idx] > pos {
            idx -= 1;
        }
        let rem = pos - self.offsets[idx];
        (idx, rem / self.h_dim, rem % self.h_dim)
    }

    /// Interior mask at the module's own guard: keeps positions in levels
    /// with max nⱼ ≤ p − g.
    pub fn interior_mask(&self) -> Vec<bool> {
        self.interior_mask_with(&MultiIndex::zero(self.spec.k()))
    }

    /// Interior mask with a per-coordinate widening: keeps levels n with
    /// nⱼ ≤ p − max(g, extraⱼ) for every j.
    pub fn interior_mask_with(&self, extra: &MultiIndex) -> Vec<bool> {
        let mut mask = vec![false; self.dim];
        for (idx, n) in self.levels.iter().enumerate() {
            let keep = n
                .0
                .iter()
                .enumerate()
                .all(|(j, &nj)| nj + self.guard.max(extra.0[j]) <= self.p);
            if keep {
                let len = self.spec.edim(n) * self.h_dim;
                let off = self.offsets[idx];
                for m in mask.iter_mut().skip(off).take(len) {
                    *m = true;
                }
            }
        }
        mask
    }

    /// The creation operator S̃^{(i)}: E_i ⊗ (ℱ_p⊗H) → ℱ_p⊗H. Levels with
    /// nᵢ = p are mapped to zero; this is the central finite-model
    /// convention.
    pub fn creation(&self, i: usize) -> Result<CMat> {
        let d_i = self.spec.dim(i);
        let h = self.h_dim;
        let mut out = linalg::zeros(self.dim, d_i * self.dim);
        for (idx, n) in self.levels.iter().enumerate() {
            if n.0[i] >= self.p {
                continue;
            }
            let target = n.plus_unit(i);
            let tgt_idx = self.level_index(&target).expect("target level in range");
            let ins = self.spec.insertion_flip(i, n)?;
            let en = self.spec.edim(n);
            let off_n = self.offsets[idx];
            let off_m = self.offsets[tgt_idx];
            for a in 0..d_i {
                for t in 0..en {
                    let col_in = a * self.dim + off_n + t * h;
                    for (s, row) in ins.column(a * en + t).iter().enumerate() {
                        if *row == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for hh in 0..h {
                            out[[off_m + s * h + hh, col_in + hh]] += *row;
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{adj, eye, fro_norm};
    use proptest::prelude::*;

    #[test]
    fn swap_flip_trivial_cases() {
        // Scalars commute.
        let t = default_swap_flip(1, 1);
        assert_eq!(t.dim(), (1, 1));
        assert_eq!(t[[0, 0]], C64::new(1.0, 0.0));
        // Swap with a scalar slot is the identity permutation.
        let t = default_swap_flip(2, 1);
        assert!(fro_norm(&(&t - &eye(2))) < 1e-15);
    }

    #[test]
    fn swap_flip_two_by_two() {
        // Sends flat index 2a+b to 2b+a: ones at (0,0),(2,1),(1,2),(3,3).
        let t = default_swap_flip(2, 2);
        let expected = [(0usize, 0usize), (2, 1), (1, 2), (3, 3)];
        for (r, c) in expected {
            assert_eq!(t[[r, c]], C64::new(1.0, 0.0), "({r},{c})");
        }
        let total: f64 = t.iter().map(|z| z.norm()).sum();
        assert!((total - 4.0).abs() < 1e-15);
    }

    #[test]
    fn enumerate_levels_examples() {
        let lv = enumerate_levels(1, 2);
        let got: Vec<Vec<usize>> = lv.into_iter().map(|m| m.0).collect();
        assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(enumerate_levels(0, 3), vec![MultiIndex(vec![0, 0, 0])]);
        let got: Vec<Vec<usize>> = enumerate_levels(2, 1).into_iter().map(|m| m.0).collect();
        assert_eq!(got, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn ampliate_examples() {
        let a = ndarray::array![[C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
                                [C64::new(3.0, 0.0), C64::new(4.0, 0.0)]];
        assert!(fro_norm(&(&ampliate(&a, 1) - &a)) < 1e-15);
        let z = linalg::zeros(1, 1);
        assert!(fro_norm(&ampliate(&z, 3)) < 1e-15);
        let big = ampliate(&a, 2);
        assert_eq!(big.dim(), (4, 4));
        assert_eq!(big[[0, 1]], C64::new(2.0, 0.0));
        assert_eq!(big[[2, 3]], C64::new(4.0, 0.0));
        assert_eq!(big[[0, 2]], C64::new(0.0, 0.0));
    }

    #[test]
    fn extended_flip_trivial_cases() {
        let spec = ProductSystemSpec::with_swap_flips(&[1, 1]);
        let t = spec.extended_flip(0, &MultiIndex(vec![0, 3])).unwrap();
        assert!(fro_norm(&(&t - &eye(1))) < 1e-15);
        let spec = ProductSystemSpec::with_swap_flips(&[2, 2]);
        let t = spec.extended_flip(0, &MultiIndex::zero(2)).unwrap();
        assert!(fro_norm(&(&t - &eye(2))) < 1e-15);
    }

    #[test]
    fn extended_flip_matches_elementary_composition() {
        // k=2, d=(2,2), i=1 (0-based 0), n=(0,2): the 8×8 permutation equals
        // (t ⊗ I)(I ⊗ t) and is unitary; composing with the reverse move of
        // the other coordinate gives the identity.
        let spec = ProductSystemSpec::with_swap_flips(&[2, 2]);
        let n = MultiIndex(vec![0, 2]);
        let u = spec.extended_flip(0, &n).unwrap();
        assert_eq!(u.dim(), (8, 8));
        let t = spec.flip(0, 1);
        let expected = linalg::kron(&t, &eye(2)).dot(&linalg::kron(&eye(2), &t));
        assert!(fro_norm(&(&u - &expected)) < 1e-13);
        // Unitarity.
        let res = fro_norm(&(&adj(&u).dot(&u) - &eye(8)));
        assert!(res < 1e-13);
        // Direct permutation of flat indices: e_a ⊗ (e_b ⊗ e_c) → (e_b⊗e_c) ⊗ e_a.
        for a in 0..2usize {
            for b in 0..2usize {
                for c in 0..2usize {
                    let col = ((a * 2) + b) * 2 + c;
                    let row = ((b * 2) + c) * 2 + a;
                    assert_eq!(u[[row, col]], C64::new(1.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn fock_module_dimension_closed_form() {
        // dim = Π_i Σ_{n=0..p} d_i^n · h for the per-coordinate cap.
        let cases = [
            (vec![1usize, 1], 2usize, 3usize, 1usize),
            (vec![2, 1], 1, 2, 1),
            (vec![2, 2], 3, 2, 1),
            (vec![1, 2, 2], 2, 3, 2),
        ];
        for (dims, h, p, g) in cases {
            let spec = ProductSystemSpec::with_swap_flips(&dims);
            let module = TruncatedFockModule::new(spec.clone(), h, p, g).unwrap();
            let expected: usize = dims
                .iter()
                .map(|&d| (0..=p).map(|n| d.pow(n as u32)).sum::<usize>())
                .product::<usize>()
                * h;
            assert_eq!(module.dim, expected);
        }
    }

    #[test]
    fn flat_roundtrip_every_position() {
        let spec = ProductSystemSpec::with_swap_flips(&[2, 1]);
        let module = TruncatedFockModule::new(spec, 3, 2, 1).unwrap();
        for pos in 0..module.dim {
            let (l, t, h) = module.unflat(pos);
            assert_eq!(module.flat(l, t, h), pos);
        }
    }

    #[test]
    fn guard_must_be_smaller_than_cap() {
        let spec = ProductSystemSpec::with_swap_flips(&[1, 1]);
        assert!(TruncatedFockModule::new(spec, 1, 2, 2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// extended_flip through n ⊕ m equals the composition through n then m.
        #[test]
        fn extended_flip_composes(
            d1 in 1usize..3, d2 in 1usize..3,
            n1 in 0usize..3, n2 in 0usize..2,
            m1 in 0usize..2, m2 in 0usize..2,
            i in 0usize..2
        ) {
            let spec = ProductSystemSpec::with_swap_flips(&[d1, d2]);
            let n = MultiIndex(vec![n1, n2]);
            let m = MultiIndex(vec![m1, m2]);
            let nm = n.add(&m);
            // Only meaningful when 𝔼(n⊕m) really factors as 𝔼(n)⊗𝔼(m) in
            // normal order, i.e. the n-part fills the lower coordinates.
            prop_assume!(n2 == 0 || m1 == 0);
            let full = spec.extended_flip(i, &nm).unwrap();
            let through_n = spec.extended_flip(i, &n).unwrap();
            let through_m = spec.extended_flip(i, &m).unwrap();
            let en = spec.edim(&n);
            let em = spec.edim(&m);
            // First move past 𝔼(n) (ampliated by I_{𝔼(m)} on the right),
            // then past 𝔼(m).
            let step1 = linalg::kron(&through_n, &eye(em));
            let step2 = linalg::kron(&eye(en), &through_m);
            let composed = step2.dot(&step1);
            prop_assert!(fro_norm(&(&full - &composed)) < 1e-11);
        }

        /// Every flat position round-trips through (level, tensor, h).
        #[test]
        fn flat_roundtrip_random_modules(
            d1 in 1usize..3, d2 in 1usize..3, h in 1usize..4, p in 2usize..5
        ) {
            let spec = ProductSystemSpec::with_swap_flips(&[d1, d2]);
            let module = TruncatedFockModule::new(spec, h, p, 1).unwrap();
            for pos in (0..module.dim).step_by(1 + module.dim / 37) {
                let (l, t, hh) = module.unflat(pos);
                prop_assert_eq!(module.flat(l, t, hh), pos);
            }
        }
    }
}
