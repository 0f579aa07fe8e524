//! A numerical laboratory for covariant representations of product systems
//! over ℕ₀^k with scalar coefficients, realized on truncated Fock modules.
//!
//! The crate materializes the operator theory of doubly commuting isometric
//! tuples as finite-precision linear algebra: quotient-subspace and
//! Beurling-quotient characterizations, regular (Brehmer–Solel) dilations
//! into creation-operator models, and inner–outer factorization of
//! multi-analytic operators, each as checkable operator identities with
//! explicit residuals.
//!
//! Truncation convention: the Fock module keeps levels n with max nⱼ ≤ p;
//! creation operators map the top level to zero, and every theorem check is
//! phrased through interior projections that drop the top `guard` levels,
//! where the truncated operators stop being isometric.

extern crate blas_src;

pub mod analytic;
pub mod beurling;
pub mod corpus;
pub mod covariant;
pub mod dilation;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod subspace;
pub mod tensor;

pub use error::{Error, Result};

/// The tolerance family used throughout; every verdict is accompanied by the
/// numeric residual it was derived from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Exact identities (construction-level): relative Frobenius, 1e−9.
    pub exact: f64,
    /// Theorem verdicts, which compose several assembled products: 1e−7.
    pub thm: f64,
    /// Relative singular-value cutoff for spans and complements: 1e−8.
    pub rank: f64,
    /// Eigenvalue clamp for PSD square roots: 1e−10.
    pub psd: f64,
    /// Operator-norm threshold declaring a power "vanished": 1e−8.
    pub pure: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { exact: 1e-9, thm: 1e-7, rank: 1e-8, psd: 1e-10, pure: 1e-8 }
    }
}
