//! Positivity of kernels restricted to finite graphs.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{tree_ball, GraphBall};
use crate::error::Result;
use crate::kernel::RadialKernelSpec;
use crate::linalg::symmetric_eigenvalues;
use crate::moments::DiscreteMeasure;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsdCheck {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CondNegCheck {
    pub holds: bool,
    /// Largest eigenvalue of `PDP`, where `P` projects onto sums zero.
    pub max_violation: f64,
}

/// `G[x][y] = f(d(x, y))`.
pub fn gram_matrix(g: &GraphBall, f: impl Fn(u32) -> f64) -> DMatrix<f64> {
    let n = g.n_vertices();
    DMatrix::from_fn(n, n, |x, y| f(g.dist(x, y)))
}

fn psd_of(a: &DMatrix<f64>, tol: f64) -> Result<PsdCheck> {
    let values = symmetric_eigenvalues(a)?;
    let min_eigenvalue = values[0];
    let norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(PsdCheck { psd: min_eigenvalue >= -tol * norm.max(1.0), min_eigenvalue })
}

/// Whether `(x, y) ↦ φ(d(x, y))` is positive semidefinite on `g`.
pub fn gram_psd_check(g: &GraphBall, phi: &RadialKernelSpec, tol: f64) -> Result<PsdCheck> {
    let values = phi.values(g.diameter() as usize)?;
    psd_of(&gram_matrix(g, |d| values[d as usize]), tol)
}

/// Whether the distance is conditionally negative on `g`.
pub fn conditionally_negative_check(g: &GraphBall, tol: f64) -> Result<CondNegCheck> {
    let n = g.n_vertices();
    let d = gram_matrix(g, f64::from);
    let p = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let pdp = &p * d * &p;
    let pdp = (&pdp + pdp.transpose()) * 0.5;
    let max_violation = symmetric_eigenvalues(&pdp)?.last().copied().unwrap_or(0.0);
    let scale = f64::from(g.diameter()).max(1.0) * n as f64;
    Ok(CondNegCheck { holds: max_violation <= tol * scale, max_violation })
}

/// Whether `s^{d(x, y)}` is positive semidefinite on `g`, with `0^0 = 1`.
pub fn schoenberg_check(g: &GraphBall, s: f64, tol: f64) -> Result<bool> {
    Ok(psd_of(&gram_matrix(g, |d| s.powi(d as i32)), tol)?.psd)
}

/// Whether `φ(n) = c₊ + (-1)^n c₋ + Σ w_k s_k^n` is positive semidefinite on `g`.
pub fn median_kernel_check(g: &GraphBall, measure: &DiscreteMeasure, tol: f64) -> Result<bool> {
    let phi = |d: u32| {
        let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
        measure.c_plus
            + sign * measure.c_minus
            + measure.atoms.iter().map(|a| a.weight * a.location[0].powi(d as i32)).sum::<f64>()
    };
    Ok(psd_of(&gram_matrix(g, phi), tol)?.psd)
}

/// Smallest `R ≤ r_max` for which `φ` fails the Gram check on the ball of
/// radius `R` in `T_q`, or `None`.
pub fn find_failing_radius(phi: &RadialKernelSpec, q: u64, r_max: usize, tol: f64) -> Result<Option<usize>> {
    for r in 0..=r_max {
        if !gram_psd_check(&tree_ball(q, r)?, phi, tol)?.psd {
            return Ok(Some(r));
        }
    }
    Ok(None)
}
