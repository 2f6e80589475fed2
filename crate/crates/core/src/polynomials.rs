//! The polynomial families `P_n^{(q)}` and `Q_n^{(q)}`.
//!
//! Both satisfy the three-term recurrence
//! `R_{n+1}(x) = (1 + 1/q) x R_n(x) - (1/q) R_{n-1}(x)` with `R_0 = 1`; they
//! differ only in the first step: `P_1(x) = x` while `Q_1(x) = (1 + 1/q) x`.
//! `n ↦ P_n^{(q)}(s)` is the radial eigenfunction of the Laplacian on the
//! `(q+1)`-homogeneous tree, and the two families are tied by
//! `P_n - P_{n+2} = (1 + 1/q)(1 - x²) Q_n`.
//!
//! At `q = ∞` both reduce to `x^n`.
//!
//! Evaluation runs the recurrence forward. On `[-1, 1]` the `P` sequence is
//! bounded by one, which keeps forward evaluation stable there; outside that
//! interval no accuracy is promised.

use crate::degree::ExtendedDegree;

fn recurrence(q: ExtendedDegree, first: f64, n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let a = q.one_plus() * x;
    let b = q.inv_q();
    let (mut prev, mut cur) = (1.0, first);
    for _ in 1..n {
        let next = a * cur - b * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn recurrence_sequence(q: ExtendedDegree, first: f64, n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(first);
    let a = q.one_plus() * x;
    let b = q.inv_q();
    for n in 2..=n_max {
        out.push(a * out[n - 1] - b * out[n - 2]);
    }
    out
}

/// `P_n^{(q)}(x)`.
pub fn eval_p(q: ExtendedDegree, n: usize, x: f64) -> f64 {
    recurrence(q, x, n, x)
}

/// `Q_n^{(q)}(x)`.
pub fn eval_q(q: ExtendedDegree, n: usize, x: f64) -> f64 {
    recurrence(q, q.one_plus() * x, n, x)
}

/// `[P_0(x), …, P_{n_max}(x)]` in one pass.
pub fn p_sequence(q: ExtendedDegree, n_max: usize, x: f64) -> Vec<f64> {
    recurrence_sequence(q, x, n_max, x)
}

/// `[Q_0(x), …, Q_{n_max}(x)]` in one pass.
pub fn q_sequence(q: ExtendedDegree, n_max: usize, x: f64) -> Vec<f64> {
    recurrence_sequence(q, q.one_plus() * x, n_max, x)
}

/// Smallest `N ≤ limit` such that `|P_n^{(q)}(s)| ≤ threshold` for every `n`
/// in `N..=limit`, or `None` when the tail never drops below the threshold.
pub fn decay_index(q: ExtendedDegree, s: f64, threshold: f64, limit: usize) -> Option<usize> {
    let seq = p_sequence(q, limit, s);
    let last_big = seq.iter().rposition(|v| v.abs() > threshold);
    match last_big {
        None => Some(0),
        Some(i) if i < limit => Some(i + 1),
        Some(_) => None,
    }
}
