//! Finite truncations of the kernel operators.
//!
//! For a radial function `φ` write `h(n) = φ(n) - φ(n+2)`. The operators built
//! here are
//!
//! * the Hankel matrix `H_{i,j} = h(i+j)`;
//! * the tree operator `B_{i,j} = Σ_{k ≤ min(i,j)} q^{-k} h(i+j-2k)`, which is
//!   `H` itself at `q = ∞`;
//! * the same sum with `q` replaced by an arbitrary real `r ≥ 1`
//!   ([`build_smoothed`]);
//! * the product operator on `ℕ^N`,
//!   `B_{m,n} = Σ_{l ≤ m∧n} (Π q_i^{-l_i}) Σ_k C(N,k)(-1)^k φ(|m|+|n|-2|l|+2k)`;
//! * the multi-radial operator `T_{m,n} = Σ_{I ⊂ [N]} (-1)^{|I|} φ̃(m+n+2χ^I)`
//!   and its smoothing `T' = Π(1 - 1/q_i)(I - τ_i/q_i)^{-1} T`, where
//!   `τ_i(A) = S_i A S_i^*`.
//!
//! Multi-indices in the box `{0..M-1}^N` are flattened lexicographically with
//! the first coordinate most significant, see [`BoxIndexer`].
//!
//! The geometric series behind `(I - τ_i/q_i)^{-1}` is never summed directly.
//! Inverting it gives `Π_i (I - τ_i/q_i) B = T`, i.e.
//! `B_{m,n} = T_{m,n} - Σ_{∅ ≠ I ⊂ [N]} (-1)^{|I|} (Π_{i∈I} q_i^{-1}) B_{m-χ^I, n-χ^I}`
//! with out-of-range terms dropped, which fills the matrix in lexicographic
//! order. The same recursion restricted to the diagonal gives the tail
//! heuristic.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::degree::ExtendedDegree;
use crate::error::{Error, Result};
use crate::kernel::RadialKernelSpec;

/// Default cap on the number of rows of a product operator.
pub const DEFAULT_MAX_ROWS: usize = 4096;

/// Which operator a [`TruncatedOperator`] realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    H,
    BTree,
    BProduct,
    T,
    TPrime,
    ASmoothed,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            OperatorKind::H => "H",
            OperatorKind::BTree => "B_tree",
            OperatorKind::BProduct => "B_product",
            OperatorKind::T => "T",
            OperatorKind::TPrime => "T_prime",
            OperatorKind::ASmoothed => "A_smoothed",
        };
        f.write_str(name)
    }
}

/// A finite section of one of the operators above.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub entries: DMatrix<f64>,
    pub kind: OperatorKind,
    /// Side length `M` of the index box.
    pub truncation: usize,
    /// Number of tree factors `N`; rows are indexed by `{0..M-1}^N`.
    pub dims: usize,
    /// `Σ |B_{m,m}|` over diagonal entries just outside the box that the data
    /// for `φ` allows us to compute. A convergence indicator, not a bound.
    pub tail_heuristic: f64,
}

impl TruncatedOperator {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn indexer(&self) -> BoxIndexer {
        BoxIndexer::new(self.dims, self.truncation)
    }

    /// Entry at a pair of multi-indices.
    pub fn at(&self, m: &[usize], n: &[usize]) -> f64 {
        let ix = self.indexer();
        self.entries[(ix.flatten(m), ix.flatten(n))]
    }

    /// Row-major CSV with round-trip decimal formatting.
    pub fn to_csv(&self) -> String {
        matrix_to_csv(&self.entries)
    }
}

/// Writes a matrix as row-major CSV; every value round-trips through `f64` parsing.
pub fn matrix_to_csv(a: &DMatrix<f64>) -> String {
    let mut out = String::with_capacity(a.len() * 12);
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| format!("{:?}", a[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Lexicographic flattening of the box `{0..side-1}^dims`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxIndexer {
    pub dims: usize,
    pub side: usize,
}

impl BoxIndexer {
    pub fn new(dims: usize, side: usize) -> Self {
        Self { dims, side }
    }

    pub fn len(&self) -> usize {
        self.side.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flatten(&self, m: &[usize]) -> usize {
        debug_assert_eq!(m.len(), self.dims);
        m.iter().fold(0, |acc, &c| {
            debug_assert!(c < self.side);
            acc * self.side + c
        })
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut m = vec![0; self.dims];
        for c in m.iter_mut().rev() {
            *c = flat % self.side;
            flat /= self.side;
        }
        m
    }

    /// All multi-indices in flattening order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(move |f| self.unflatten(f))
    }
}

/// A function `φ̃: ℕ^N → ℝ`.
pub trait MultiRadial {
    fn dims(&self) -> usize;
    fn eval(&self, n: &[usize]) -> Result<f64>;
}

/// `φ̃(n) = φ(|n|)` for a radial `φ`.
pub struct Radialized<'a> {
    pub phi: &'a RadialKernelSpec,
    pub dims: usize,
}

impl MultiRadial for Radialized<'_> {
    fn dims(&self) -> usize {
        self.dims
    }

    fn eval(&self, n: &[usize]) -> Result<f64> {
        self.phi.value(n.iter().sum())
    }
}

/// Adapter turning a closure into a [`MultiRadial`].
pub struct FnMultiRadial<F> {
    pub dims: usize,
    pub f: F,
}

impl<F: Fn(&[usize]) -> f64> MultiRadial for FnMultiRadial<F> {
    fn dims(&self) -> usize {
        self.dims
    }

    fn eval(&self, n: &[usize]) -> Result<f64> {
        Ok((self.f)(n))
    }
}

fn check_truncation(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("truncation M must be positive".into()));
    }
    Ok(())
}

/// Number of further diagonal indices used for the tail heuristic, given that
/// the diagonal entry at index `i` of a one-factor operator needs `φ` up to `2i + 2`.
fn tail_end(phi: &RadialKernelSpec, m: usize) -> usize {
    match phi.max_index() {
        None => 4 * m,
        Some(n_max) => (n_max.saturating_sub(2) / 2 + 1).max(m),
    }
}

/// `h(n) = φ(n) - φ(n+2)` for `n ≤ n_max`.
fn differences(values: &[f64], n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| values[n] - values[n + 2]).collect()
}

fn one_factor(phi: &RadialKernelSpec, inv_r: f64, m: usize, kind: OperatorKind) -> Result<TruncatedOperator> {
    check_truncation(m)?;
    let values = phi.values(2 * m)?;
    let h = differences(&values, 2 * m - 2);
    let mut b = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let inner = if i > 0 && j > 0 { inv_r * b[(i - 1, j - 1)] } else { 0.0 };
            b[(i, j)] = h[i + j] + inner;
        }
    }

    let end = tail_end(phi, m);
    let mut tail = 0.0;
    if end > m {
        let values = phi.values(2 * end)?;
        let mut diag = b[(m - 1, m - 1)];
        for i in m..end {
            diag = values[2 * i] - values[2 * i + 2] + inv_r * diag;
            tail += diag.abs();
        }
    }

    Ok(TruncatedOperator { entries: b, kind, truncation: m, dims: 1, tail_heuristic: tail })
}

/// `H_{i,j} = φ(i+j) - φ(i+j+2)` for `0 ≤ i, j < M`.
pub fn build_hankel(phi: &RadialKernelSpec, m: usize) -> Result<TruncatedOperator> {
    one_factor(phi, 0.0, m, OperatorKind::H)
}

/// The tree operator `B` for degree `q`; equal to [`build_hankel`] at `q = ∞`.
pub fn build_tree_b(phi: &RadialKernelSpec, q: ExtendedDegree, m: usize) -> Result<TruncatedOperator> {
    one_factor(phi, q.inv_q(), m, OperatorKind::BTree)
}

/// `Σ_{k ≤ min(i,j)} r^{-k} h(i+j-2k)`, the tree operator with a real
/// parameter `r ≥ 1` in place of `q`. Each entry is a finite sum, so no
/// series truncation parameter is needed.
pub fn build_smoothed(phi: &RadialKernelSpec, r: f64, m: usize) -> Result<TruncatedOperator> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("smoothing parameter r = {r} must be at least 1")));
    }
    one_factor(phi, 1.0 / r, m, OperatorKind::ASmoothed)
}

/// Applies `Π_i (I - τ_i/q_i)^{-1}` to `t` (given on the box) by the
/// lexicographic recursion; only `diag_only` entries are computed when set.
fn invert_shift_conjugation(
    t: impl Fn(usize, usize) -> Result<f64>,
    ix: BoxIndexer,
    inv_q: &[f64],
    diag_only: bool,
) -> Result<DMatrix<f64>> {
    let n = ix.len();
    let dims = ix.dims;
    // Non-empty subsets I with signed weight -(-1)^{|I|} Π_{i∈I} 1/q_i.
    let subsets: Vec<(usize, f64)> = (1usize..1 << dims)
        .map(|mask| {
            let w: f64 = (0..dims).filter(|i| mask >> i & 1 == 1).map(|i| inv_q[i]).product();
            let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
            (mask, sign * w)
        })
        .filter(|&(_, w)| w != 0.0)
        .collect();
    // Flat offset of χ^I.
    let strides: Vec<usize> = (0..dims).map(|i| ix.side.pow((dims - 1 - i) as u32)).collect();
    let offsets: Vec<usize> = subsets
        .iter()
        .map(|&(mask, _)| (0..dims).filter(|i| mask >> i & 1 == 1).map(|i| strides[i]).sum())
        .collect();

    let coords: Vec<Vec<usize>> = ix.iter().collect();
    let positive = |a: usize, mask: usize| (0..dims).all(|i| mask >> i & 1 == 0 || coords[a][i] > 0);

    let mut out = DMatrix::zeros(n, n);
    for a in 0..n {
        let cols: Box<dyn Iterator<Item = usize>> = if diag_only { Box::new(a..=a) } else { Box::new(0..n) };
        for b in cols {
            let mut v = t(a, b)?;
            for (&(mask, w), &off) in subsets.iter().zip(&offsets) {
                if positive(a, mask) && positive(b, mask) {
                    v += w * out[(a - off, b - off)];
                }
            }
            out[(a, b)] = v;
        }
    }
    Ok(out)
}

fn inv_qs(qs: &[ExtendedDegree]) -> Vec<f64> {
    qs.iter().map(|q| q.inv_q()).collect()
}

/// `Σ_{k=0}^{N} C(N,k)(-1)^k φ(j + 2k)`.
fn alternating_difference(values: &[f64], dims: usize, j: usize) -> f64 {
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..=dims {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * values[j + 2 * k];
        binom = binom * (dims - k) as f64 / (k + 1) as f64;
    }
    sum
}

/// The product operator `B` on `{0..M-1}^N` for degrees `qs`, with the
/// default row cap.
pub fn build_product_b(phi: &RadialKernelSpec, qs: &[ExtendedDegree], m: usize) -> Result<TruncatedOperator> {
    build_product_b_capped(phi, qs, m, DEFAULT_MAX_ROWS)
}

/// [`build_product_b`] with an explicit cap on `M^N`.
pub fn build_product_b_capped(
    phi: &RadialKernelSpec,
    qs: &[ExtendedDegree],
    m: usize,
    max_rows: usize,
) -> Result<TruncatedOperator> {
    check_truncation(m)?;
    let dims = qs.len();
    if dims == 0 {
        return Err(Error::InvalidParameter("at least one tree factor is required".into()));
    }
    let ix = BoxIndexer::new(dims, m);
    let rows = m.checked_pow(dims as u32).unwrap_or(usize::MAX);
    if rows > max_rows {
        return Err(Error::DimensionTooLarge { rows, cap: max_rows });
    }
    let values = phi.values(2 * dims * m)?;
    let inv = inv_qs(qs);
    let norms: Vec<usize> = ix.iter().map(|c| c.iter().sum()).collect();
    let entries = invert_shift_conjugation(
        |a, b| Ok(alternating_difference(&values, dims, norms[a] + norms[b])),
        ix,
        &inv,
        false,
    )?;

    // Diagonal over the doubled box, as far as φ's data permits.
    let side = match phi.max_index() {
        None => 2 * m,
        Some(n_max) => (n_max / (2 * dims)).clamp(m, 2 * m),
    };
    let tail = if side > m && side.checked_pow(dims as u32).is_some_and(|r| r <= 64 * max_rows) {
        let big = BoxIndexer::new(dims, side);
        let values = phi.values(2 * dims * side)?;
        let big_norms: Vec<usize> = big.iter().map(|c| c.iter().sum()).collect();
        let diag = invert_shift_conjugation(
            |a, b| Ok(alternating_difference(&values, dims, big_norms[a] + big_norms[b])),
            big,
            &inv,
            true,
        )?;
        big.iter()
            .enumerate()
            .filter(|(_, c)| c.iter().any(|&x| x >= m))
            .map(|(a, _)| diag[(a, a)].abs())
            .sum()
    } else {
        0.0
    };

    Ok(TruncatedOperator { entries, kind: OperatorKind::BProduct, truncation: m, dims, tail_heuristic: tail })
}

/// `T_{m,n} = Σ_{I ⊂ [N]} (-1)^{|I|} φ̃(m + n + 2χ^I)` on `{0..M-1}^N`.
pub fn build_multiradial_t(phi: &dyn MultiRadial, m: usize) -> Result<TruncatedOperator> {
    check_truncation(m)?;
    let dims = phi.dims();
    if dims == 0 {
        return Err(Error::InvalidParameter("at least one coordinate is required".into()));
    }
    let rows = m.checked_pow(dims as u32).unwrap_or(usize::MAX);
    if rows > DEFAULT_MAX_ROWS {
        return Err(Error::DimensionTooLarge { rows, cap: DEFAULT_MAX_ROWS });
    }
    let ix = BoxIndexer::new(dims, m);
    // φ̃ on {0..2M}^N, evaluated once.
    let grid = BoxIndexer::new(dims, 2 * m + 1);
    let mut table = Vec::with_capacity(grid.len());
    for c in grid.iter() {
        table.push(phi.eval(&c)?);
    }
    let coords: Vec<Vec<usize>> = ix.iter().collect();
    let mut entries = DMatrix::zeros(rows, rows);
    let mut point = vec![0; dims];
    for a in 0..rows {
        for b in 0..rows {
            let mut sum = 0.0;
            for mask in 0usize..1 << dims {
                for i in 0..dims {
                    point[i] = coords[a][i] + coords[b][i] + 2 * (mask >> i & 1);
                }
                let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign * table[grid.flatten(&point)];
            }
            entries[(a, b)] = sum;
        }
    }
    Ok(TruncatedOperator { entries, kind: OperatorKind::T, truncation: m, dims, tail_heuristic: 0.0 })
}

/// `T' = Π_i (1 - 1/q_i)(I - τ_i/q_i)^{-1} T`.
///
/// Inside the box the shift-conjugation series stops at `l = m ∧ n`, so
/// `T'_{m,n} = α Σ_{l ≤ m∧n} (Π q_i^{-l_i}) T_{m-l, n-l}` is exact for the
/// truncated input.
pub fn apply_smoothing_product(t: &TruncatedOperator, qs: &[ExtendedDegree]) -> Result<TruncatedOperator> {
    if qs.len() != t.dims {
        return Err(Error::DimensionMismatch { expected: t.dims, found: qs.len() });
    }
    let ix = t.indexer();
    if ix.len() != t.size() {
        return Err(Error::DimensionMismatch { expected: ix.len(), found: t.size() });
    }
    let inv = inv_qs(qs);
    let alpha: f64 = qs.iter().map(|q| q.one_minus()).product();
    let u = invert_shift_conjugation(|a, b| Ok(t.entries[(a, b)]), ix, &inv, false)?;
    Ok(TruncatedOperator {
        entries: u * alpha,
        kind: OperatorKind::TPrime,
        truncation: t.truncation,
        dims: t.dims,
        tail_heuristic: alpha * t.tail_heuristic,
    })
}
