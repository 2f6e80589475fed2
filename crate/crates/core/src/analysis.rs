//! Spectral statistics of truncated operators and positivity verdicts.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::degree::ExtendedDegree;
use crate::error::{Error, Result};
use crate::kernel::{Component, RadialKernelSpec};
use crate::linalg::{asymmetry, max_abs, symmetric_eigen, symmetrize};
use crate::operators::{build_product_b, build_smoothed, build_tree_b, BoxIndexer, TruncatedOperator};

/// Relative asymmetry above which an operator is rejected.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Default fraction of the trace norm the tail heuristic may reach before a
/// verdict becomes inconclusive.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.01;

/// Eigenvalue summary of a symmetric matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralStats {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
    /// Sum of singular values, i.e. of `|λ|`.
    pub trace_norm: f64,
    pub min_eigenvalue: f64,
    /// Largest `|λ|`.
    pub spectral_norm: f64,
    /// `max |A - Aᵀ| / 2` before symmetrization.
    pub asymmetry: f64,
    /// Eigenvector of `min_eigenvalue`, unit Euclidean norm.
    #[serde(skip)]
    pub min_eigenvector: DVector<f64>,
}

/// See [`matrix_spectral_stats`].
pub fn spectral_stats(op: &TruncatedOperator) -> Result<SpectralStats> {
    matrix_spectral_stats(&op.entries)
}

/// Symmetrizes `a`, rejecting it if the defect exceeds `1e-10 · max|a|`, and
/// diagonalizes the result.
pub fn matrix_spectral_stats(a: &DMatrix<f64>) -> Result<SpectralStats> {
    let defect = asymmetry(a);
    if defect > SYMMETRY_TOLERANCE * max_abs(a) {
        return Err(Error::NotSymmetric { defect });
    }
    let sym = symmetrize(a);
    let n = sym.nrows();
    if n == 0 {
        return Ok(SpectralStats {
            eigenvalues: vec![],
            trace: 0.0,
            trace_norm: 0.0,
            min_eigenvalue: 0.0,
            spectral_norm: 0.0,
            asymmetry: 0.0,
            min_eigenvector: DVector::zeros(0),
        });
    }
    let eig = symmetric_eigen(&sym)?;
    let trace = sym.trace();
    let trace_norm = eig.values.iter().map(|v| v.abs()).sum();
    let spectral_norm = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(SpectralStats {
        min_eigenvalue: eig.values[0],
        min_eigenvector: eig.vectors.column(0).into_owned(),
        eigenvalues: eig.values,
        trace,
        trace_norm,
        spectral_norm,
        asymmetry: defect,
    })
}

/// Limits `l0 = lim φ(2n)` and `l1 = lim φ(2n+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitsPair {
    pub l0: f64,
    pub l1: f64,
}

impl LimitsPair {
    /// `l0 + l1`.
    pub fn c_plus(&self) -> f64 {
        self.l0 + self.l1
    }

    /// `l0 - l1`.
    pub fn c_minus(&self) -> f64 {
        self.l0 - self.l1
    }

    /// Masses `((l0 + l1)/2, (l0 - l1)/2)` of the endpoint atoms at `±1`.
    pub fn endpoint_masses(&self) -> (f64, f64) {
        (self.c_plus() / 2.0, self.c_minus() / 2.0)
    }

    pub fn satisfied(&self, tol: f64) -> bool {
        self.l1.abs() <= self.l0 + tol
    }
}

fn closed_form_limits(s: f64) -> LimitsPair {
    if s == 1.0 {
        LimitsPair { l0: 1.0, l1: 1.0 }
    } else if s == -1.0 {
        LimitsPair { l0: 1.0, l1: -1.0 }
    } else {
        LimitsPair { l0: 0.0, l1: 0.0 }
    }
}

/// Declared limits for tables, exact limits for closed forms.
pub fn extract_limits(phi: &RadialKernelSpec) -> LimitsPair {
    match phi {
        RadialKernelSpec::Table { l0, l1, .. } => LimitsPair { l0: *l0, l1: *l1 },
        RadialKernelSpec::Geometric { s } | RadialKernelSpec::TreeEigen { s, .. } => closed_form_limits(*s),
        RadialKernelSpec::Mixture(components) => {
            components.iter().fold(LimitsPair { l0: 0.0, l1: 0.0 }, |acc, c| {
                let s = match c.component {
                    Component::Geometric { s } | Component::TreeEigen { s, .. } => s,
                };
                let l = closed_form_limits(s);
                LimitsPair { l0: acc.l0 + c.weight * l.l0, l1: acc.l1 + c.weight * l.l1 }
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

/// One coordinate of a witness vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessEntry {
    pub index: Vec<usize>,
    pub value: f64,
}

/// A vector `v` with `⟨Bv, v⟩ < 0`, in the operator's index basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub entries: Vec<WitnessEntry>,
    pub quadratic_form: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub verdict: Verdict,
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub trace_norm: f64,
    pub l0: f64,
    pub l1: f64,
    pub limits_satisfied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub truncation: usize,
    pub tail_heuristic: f64,
}

impl MembershipReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// Tolerances for [`check_positive_definite_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub tol: f64,
    pub tail_fraction: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { tol: 1e-10, tail_fraction: DEFAULT_TAIL_FRACTION }
    }
}

/// The operator whose positivity decides membership: the tree operator for a
/// single factor, the product operator otherwise.
pub fn membership_operator(phi: &RadialKernelSpec, qs: &[ExtendedDegree], m: usize) -> Result<TruncatedOperator> {
    match qs {
        [] => Err(Error::InvalidParameter("at least one tree factor is required".into())),
        [q] => build_tree_b(phi, *q, m),
        _ => build_product_b(phi, qs, m),
    }
}

pub fn check_positive_definite(
    phi: &RadialKernelSpec,
    qs: &[ExtendedDegree],
    m: usize,
    tol: f64,
) -> Result<MembershipReport> {
    check_positive_definite_with(phi, qs, m, CheckOptions { tol, ..CheckOptions::default() })
}

/// Decides positive definiteness of `φ` on the product of trees with degrees
/// `qs` from the section of size `M`.
///
/// A negative eigenvalue of a finite section is a certificate of
/// non-membership. Absence of one is evidence only, so the verdict is
/// `inconclusive` when the tail heuristic is a sizable fraction of the trace
/// norm.
pub fn check_positive_definite_with(
    phi: &RadialKernelSpec,
    qs: &[ExtendedDegree],
    m: usize,
    options: CheckOptions,
) -> Result<MembershipReport> {
    let op = membership_operator(phi, qs, m)?;
    let stats = spectral_stats(&op)?;
    let limits = extract_limits(phi);
    let limits_satisfied = limits.satisfied(options.tol);
    let negative = stats.min_eigenvalue < -options.tol * stats.spectral_norm.max(1.0);

    let witness = negative.then(|| {
        let v = &stats.min_eigenvector;
        let ix = op.indexer();
        let entries = v
            .iter()
            .enumerate()
            .filter(|(_, x)| x.abs() > 1e-12)
            .map(|(k, &value)| WitnessEntry { index: ix.unflatten(k), value })
            .collect();
        Witness { entries, quadratic_form: v.dot(&(&op.entries * v)) }
    });

    let verdict = if negative || !limits_satisfied {
        Verdict::NonMember
    } else if op.tail_heuristic > options.tail_fraction * stats.trace_norm {
        Verdict::Inconclusive
    } else {
        Verdict::Member
    };

    Ok(MembershipReport {
        verdict,
        min_eigenvalue: stats.min_eigenvalue,
        trace: stats.trace,
        trace_norm: stats.trace_norm,
        l0: limits.l0,
        l1: limits.l1,
        limits_satisfied,
        witness,
        truncation: m,
        tail_heuristic: op.tail_heuristic,
    })
}

/// `‖α B‖_{S_1} + |c₊| + |c₋|` with `α = Π(1 - 1/q_i)` and `c± = (l0 ± l1)/2`.
pub fn cb_norm_estimate(phi: &RadialKernelSpec, qs: &[ExtendedDegree], m: usize) -> Result<f64> {
    let op = membership_operator(phi, qs, m)?;
    let stats = spectral_stats(&op)?;
    let alpha: f64 = qs.iter().map(|q| q.one_minus()).product();
    let (c_plus, c_minus) = extract_limits(phi).endpoint_masses();
    Ok(alpha * stats.trace_norm + c_plus.abs() + c_minus.abs())
}

/// `P^{(q)}(0)` is positive definite on `T_q` but its smoothed operator at
/// `r = q + ε` is not positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Corollary5Witness {
    pub in_rq: bool,
    pub entry11: f64,
    /// `(1 + 1/q)(1/(q + ε) - 1/q)`.
    pub closed_form: f64,
}

pub fn corollary5_witness(q: u64, eps: f64, m: usize) -> Result<Corollary5Witness> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {eps} must lie in (0, 1]")));
    }
    if m < 2 {
        return Err(Error::InvalidParameter("truncation must be at least 2".into()));
    }
    let degree = ExtendedDegree::finite(q)?;
    let phi = RadialKernelSpec::tree_eigen(degree, 0.0)?;
    let in_rq = check_positive_definite(&phi, &[degree], m, 1e-10)?.verdict == Verdict::Member;
    let r = q as f64 + eps;
    let entry11 = build_smoothed(&phi, r, m)?.entries[(1, 1)];
    let closed_form = degree.one_plus() * (1.0 / r - degree.inv_q());
    Ok(Corollary5Witness { in_rq, entry11, closed_form })
}

/// `P^{(q)}(0)` is positive definite on `T_q` but not on `T_q × T_q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Corollary6Witness {
    pub in_rq: bool,
    /// `⟨Bv, v⟩ / B_{(0,0),(0,0)}` for `v = δ_{(0,1)} + δ_{(1,0)}`; equals `-2/q`.
    pub quad_form: f64,
    /// `⟨Bv, v⟩` itself, `-2(1 + 1/q)²/q`.
    pub raw_quad_form: f64,
    /// `B_{(0,0),(0,0)} = (1 + 1/q)²`.
    pub scale: f64,
}

pub fn corollary6_witness(q: u64, m: usize) -> Result<Corollary6Witness> {
    if m < 2 {
        return Err(Error::InvalidParameter("truncation must be at least 2".into()));
    }
    let degree = ExtendedDegree::finite(q)?;
    let phi = RadialKernelSpec::tree_eigen(degree, 0.0)?;
    let in_rq = check_positive_definite(&phi, &[degree], m.max(8), 1e-10)?.verdict == Verdict::Member;
    let b = build_product_b(&phi, &[degree, degree], m)?;
    let ix = BoxIndexer::new(2, m);
    let mut v = DVector::zeros(b.size());
    v[ix.flatten(&[0, 1])] = 1.0;
    v[ix.flatten(&[1, 0])] = 1.0;
    let raw_quad_form = v.dot(&(&b.entries * &v));
    let scale = b.entries[(0, 0)];
    Ok(Corollary6Witness { in_rq, quad_form: raw_quad_form / scale, raw_quad_form, scale })
}
