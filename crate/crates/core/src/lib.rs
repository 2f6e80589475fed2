//! Positive definite radial kernels on homogeneous trees and their products.
//!
//! A function `φ: ℕ → ℝ` defines the kernel `(x, y) ↦ φ(d(x, y))` on any graph.
//! On the tree `T_q` of degree `q + 1` it is positive definite exactly when a
//! certain operator `B` built from second differences of `φ` is positive and
//! trace class, and `|lim φ(2n+1)| ≤ lim φ(2n)`. Then
//! `φ(n) = c₊ + (-1)^n c₋ + ∫ P_n^{(q)} dν` for a positive measure `ν` on
//! `(-1, 1)`, where `P_n^{(q)}` are the spherical polynomials of the tree. The
//! same holds on products of trees with product polynomials.
//!
//! The crate computes these objects on finite truncations:
//!
//! * [`polynomials`]: `P_n^{(q)}` and `Q_n^{(q)}`;
//! * [`operators`]: truncated Hankel, tree, product and multi-radial operators;
//! * [`analysis`]: spectra, membership verdicts, cb-norms and the two
//!   strict-inclusion witnesses;
//! * [`moments`]: recovery of `ν` and reconstruction of `φ`;
//! * [`graphs`]: finite balls, products and median graphs as brute-force
//!   ground truth.
//!
//! ```
//! use radial_kernels::{check_positive_definite, ExtendedDegree, RadialKernelSpec, Verdict};
//!
//! let q = ExtendedDegree::finite(2)?;
//! let phi = RadialKernelSpec::tree_eigen(q, 0.0)?;
//! let on_t2 = check_positive_definite(&phi, &[q], 32, 1e-10)?;
//! assert_eq!(on_t2.verdict, Verdict::Member);
//!
//! let t3 = ExtendedDegree::finite(3)?;
//! let on_t3 = check_positive_definite(&phi, &[t3], 32, 1e-10)?;
//! assert_eq!(on_t3.verdict, Verdict::NonMember);
//! # Ok::<(), radial_kernels::Error>(())
//! ```

pub mod analysis;
pub mod degree;
pub mod error;
pub mod graphs;
pub mod kernel;
pub mod linalg;
pub mod moments;
pub mod operators;
pub mod polynomials;

pub use analysis::{
    cb_norm_estimate, check_positive_definite, check_positive_definite_with, corollary5_witness, corollary6_witness,
    extract_limits, spectral_stats, CheckOptions, LimitsPair, MembershipReport, SpectralStats, Verdict,
};
pub use degree::ExtendedDegree;
pub use error::{Error, Result};
pub use kernel::{Component, RadialKernelSpec, WeightedComponent};
pub use moments::{
    reconstruct, spectral_measure_product, spectral_measure_tree, verify_q_moments, Atom, DiscreteMeasure,
    MomentOptions,
};
pub use operators::{
    apply_smoothing_product, build_hankel, build_multiradial_t, build_product_b, build_smoothed, build_tree_b,
    OperatorKind, TruncatedOperator,
};
pub use polynomials::{eval_p, eval_q};

/// The guide chapters, compiled as doctests.
#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    pub mod polynomials {}
    #[doc = include_str!("../../../book/src/operators.md")]
    pub mod operators {}
    #[doc = include_str!("../../../book/src/membership.md")]
    pub mod membership {}
    #[doc = include_str!("../../../book/src/moments.md")]
    pub mod moments {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    pub mod graphs {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
