//! Recovery of the representing measure from a positive operator.
//!
//! For `φ` in the cone, `B` is the Gram matrix of the functions `Q_n` in
//! `L²(μ)`, and `Ψ = (1 + 1/q)^{-1}(S + q^{-1}Sᵀ)` is multiplication by `t` in
//! the coefficient basis. So `μ` is the spectral measure of `Ψ` at `δ_0` in
//! the inner product `⟨f, g⟩ = ⟨Bf, g⟩`.
//!
//! `Ψ` maps `span{δ_0, …, δ_{M-2}}` into the box, so on that subspace `BΨ` is
//! exact. The solver restricts to it, deflates the null space of `B` there,
//! and solves the symmetric pencil `(BΨ) v = θ B v`. For finitely supported
//! measures of rank below `M - 1` this returns the atoms exactly; otherwise it
//! is a Gauss-type quadrature of `μ`.
//!
//! The measure `ν` of the representation `φ(n) = c₊ + (-1)^n c₋ + ∫ P_n dν`
//! is `dμ / ((1 + 1/q)(1 - t²))` away from `±1`. Products work coordinatewise
//! with one `Ψ_i` per factor, diagonalized jointly.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{extract_limits, matrix_spectral_stats, LimitsPair};
use crate::degree::ExtendedDegree;
use crate::error::{Error, Result};
use crate::kernel::RadialKernelSpec;
use crate::linalg::{forward_shift, max_abs, symmetric_eigen};
use crate::operators::{build_product_b, build_tree_b, BoxIndexer};
use crate::polynomials::{p_sequence, q_sequence};

/// Default seed for the random combination used in joint diagonalization.
pub const DEFAULT_SEED: u64 = 0x5eed_0001;

/// A point mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: Vec<f64>,
    pub weight: f64,
}

/// `c₊ δ_{(1,…,1)} + c₋ δ_{(-1,…,-1)} + Σ w_k δ_{θ_k}` on `[-1, 1]^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub dims: usize,
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub c_plus: f64,
    #[serde(default)]
    pub c_minus: f64,
}

impl DiscreteMeasure {
    pub fn empty(dims: usize) -> Self {
        Self { dims, atoms: vec![], c_plus: 0.0, c_minus: 0.0 }
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum::<f64>() + self.c_plus + self.c_minus
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: DiscreteMeasure = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("measures always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims == 0 {
            return Err(Error::InvalidParameter("measure dimension must be positive".into()));
        }
        for a in &self.atoms {
            if a.location.len() != self.dims {
                return Err(Error::DimensionMismatch { expected: self.dims, found: a.location.len() });
            }
            if a.location.iter().any(|t| !(-1.0..=1.0).contains(t)) || !a.weight.is_finite() {
                return Err(Error::InvalidParameter(format!("atom {:?} is outside [-1, 1]", a.location)));
            }
        }
        if !(self.c_plus.is_finite() && self.c_minus.is_finite()) {
            return Err(Error::InvalidParameter("endpoint masses must be finite".into()));
        }
        Ok(())
    }
}

/// Numerical policy of the solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentOptions {
    /// Relative tolerance of the positivity check on `B` and of `|l1| ≤ l0`.
    pub tol: f64,
    /// Eigenvalues of `B` below this fraction of the largest are null space.
    pub rank_tolerance: f64,
    /// Atoms with a coordinate beyond `1 - snap` in absolute value are dropped.
    pub snap: f64,
    /// Atoms closer than this (max norm) are merged.
    pub merge: f64,
    /// Allowed excursion of `Ψ`-eigenvalues beyond `[-1, 1]` before erroring.
    pub clamp: f64,
    /// Eigenvector residual accepted from joint diagonalization, relative.
    pub joint_tol: f64,
    pub seed: u64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            rank_tolerance: 1e-12,
            snap: 1e-6,
            merge: 1e-8,
            clamp: 1e-9,
            joint_tol: 1e-6,
            seed: DEFAULT_SEED,
        }
    }
}

/// Full output of the solver.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSolution {
    /// `φ`'s representing measure.
    pub measure: DiscreteMeasure,
    /// The spectral measure `μ` of `Ψ` before division by `Π(1 + 1/q_i)(1 - t_i²)`.
    pub raw: DiscreteMeasure,
    /// `μ`-mass of atoms dropped in the snap band.
    pub boundary_mass: f64,
    /// Rank of the compressed Gram matrix.
    pub rank: usize,
    /// `max |BΨ - (BΨ)ᵀ|` on the compressed block, before symmetrization.
    pub symmetry_defect: f64,
    /// Worst eigenvector residual of the joint diagonalization.
    pub joint_residual: f64,
}

/// `(1 + 1/q)^{-1} (S + q^{-1} Sᵀ)` with `S` the forward shift; `S` at `q = ∞`.
pub fn build_psi_matrix(q: ExtendedDegree, m: usize) -> DMatrix<f64> {
    let s = forward_shift(m);
    (&s + s.transpose() * q.inv_q()) / q.one_plus()
}

/// Representing measure of `φ` on `T_q`.
pub fn spectral_measure_tree(phi: &RadialKernelSpec, q: ExtendedDegree, m: usize) -> Result<DiscreteMeasure> {
    Ok(solve_tree(phi, q, m, &MomentOptions::default())?.measure)
}

/// [`spectral_measure_tree`] with explicit options, returning diagnostics and `μ`.
pub fn solve_tree(phi: &RadialKernelSpec, q: ExtendedDegree, m: usize, options: &MomentOptions) -> Result<MomentSolution> {
    let b = build_tree_b(phi, q, m)?;
    solve(&b.entries, &[q], m, extract_limits(phi), options)
}

/// Representing measure of the radial `φ` on the product of trees `qs`.
pub fn spectral_measure_product(phi: &RadialKernelSpec, qs: &[ExtendedDegree], m: usize) -> Result<DiscreteMeasure> {
    Ok(solve_product(phi, qs, m, &MomentOptions::default())?.measure)
}

pub fn solve_product(
    phi: &RadialKernelSpec,
    qs: &[ExtendedDegree],
    m: usize,
    options: &MomentOptions,
) -> Result<MomentSolution> {
    let b = build_product_b(phi, qs, m)?;
    solve(&b.entries, qs, m, extract_limits(phi), options)
}

/// Solves the moment problem for a given operator `B` on `{0..M-1}^N`.
pub fn solve(
    b: &DMatrix<f64>,
    qs: &[ExtendedDegree],
    m: usize,
    limits: LimitsPair,
    options: &MomentOptions,
) -> Result<MomentSolution> {
    let dims = qs.len();
    if dims == 0 {
        return Err(Error::InvalidParameter("at least one tree factor is required".into()));
    }
    if m < 2 {
        return Err(Error::InvalidParameter("truncation must be at least 2".into()));
    }
    let full = BoxIndexer::new(dims, m);
    if b.nrows() != full.len() || b.ncols() != full.len() {
        return Err(Error::DimensionMismatch { expected: full.len(), found: b.nrows() });
    }

    let stats = matrix_spectral_stats(b)?;
    if stats.min_eigenvalue < -options.tol * stats.spectral_norm.max(1.0) {
        return Err(Error::NotPositive { min_eigenvalue: stats.min_eigenvalue });
    }
    if !limits.satisfied(options.tol) {
        return Err(Error::LimitsViolated { l0: limits.l0, l1: limits.l1 });
    }
    let (c_plus, c_minus) = limits.endpoint_masses();
    let mut measure = DiscreteMeasure { dims, atoms: vec![], c_plus: c_plus.max(0.0), c_minus: c_minus.max(0.0) };
    let mut raw = DiscreteMeasure::empty(dims);

    // Compression to the sub-box {0..M-2}^N, on which every Ψ_i is exact.
    let sub = BoxIndexer::new(dims, m - 1);
    let sub_to_full: Vec<usize> = sub.iter().map(|c| full.flatten(&c)).collect();
    let n = sub.len();
    let b_sub = DMatrix::from_fn(n, n, |a, c| b[(sub_to_full[a], sub_to_full[c])]);

    let mut symmetry_defect: f64 = 0.0;
    let mut compressed_psi = Vec::with_capacity(dims);
    for (i, q) in qs.iter().enumerate() {
        let stride = m.pow((dims - 1 - i) as u32);
        let coords: Vec<Vec<usize>> = sub.iter().collect();
        // Column c of BΨ_i is (1+1/q)^{-1} (B e_{c+e_i} + q^{-1} B e_{c-e_i}).
        let a = DMatrix::from_fn(n, n, |r, c| {
            let row = sub_to_full[r];
            let col = sub_to_full[c];
            let up = b[(row, col + stride)];
            let down = if coords[c][i] > 0 { b[(row, col - stride)] } else { 0.0 };
            (up + q.inv_q() * down) / q.one_plus()
        });
        symmetry_defect = symmetry_defect.max(crate::linalg::asymmetry(&a));
        compressed_psi.push(crate::linalg::symmetrize(&a));
    }

    // Deflated B-orthonormal basis W = U_r Λ_r^{-1/2}.
    let eig = symmetric_eigen(&b_sub)?;
    let lambda_max = eig.values.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..n).filter(|&k| lambda_max > 0.0 && eig.values[k] > options.rank_tolerance * lambda_max).collect();
    let rank = keep.len();
    if rank == 0 {
        return Ok(MomentSolution { measure, raw, boundary_mass: 0.0, rank, symmetry_defect, joint_residual: 0.0 });
    }
    let w = DMatrix::from_fn(n, rank, |r, k| eig.vectors[(r, keep[k])] / eig.values[keep[k]].sqrt());
    // Row 0 of B W = U_r Λ_r^{1/2}, the B-inner products with δ_0.
    let delta0 = DVector::from_fn(rank, |k, _| eig.vectors[(0, keep[k])] * eig.values[keep[k]].sqrt());
    let cs: Vec<DMatrix<f64>> = compressed_psi.iter().map(|a| w.transpose() * a * &w).collect();

    let (vectors, joint_residual) = joint_eigenvectors(&cs, options)?;

    let mut boundary_mass = 0.0;
    let mut raw_atoms = Vec::with_capacity(rank);
    for y in vectors.column_iter() {
        let weight = delta0.dot(&y).powi(2);
        let mut location = Vec::with_capacity(dims);
        for c in &cs {
            let theta = y.dot(&(c * y));
            if theta.abs() > 1.0 + options.clamp {
                return Err(Error::SpectrumOutOfRange { value: theta });
            }
            location.push(theta.clamp(-1.0, 1.0));
        }
        if location.iter().any(|t| t.abs() > 1.0 - options.snap) {
            boundary_mass += weight;
            continue;
        }
        raw_atoms.push(Atom { location, weight });
    }
    raw.atoms = merge_atoms(raw_atoms, options.merge);

    let scale: f64 = qs.iter().map(|q| q.one_plus()).product();
    measure.atoms = raw
        .atoms
        .iter()
        .map(|a| Atom {
            location: a.location.clone(),
            weight: a.weight / (scale * a.location.iter().map(|t| 1.0 - t * t).product::<f64>()),
        })
        .collect();

    Ok(MomentSolution { measure, raw, boundary_mass, rank, symmetry_defect, joint_residual })
}

/// Orthonormal common eigenvectors (columns) of commuting symmetric matrices.
fn joint_eigenvectors(cs: &[DMatrix<f64>], options: &MomentOptions) -> Result<(DMatrix<f64>, f64)> {
    if cs.len() == 1 {
        return Ok((symmetric_eigen(&cs[0])?.vectors, 0.0));
    }
    let scale = cs.iter().map(max_abs).fold(1.0f64, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut worst = f64::INFINITY;
    for _attempt in 0..3 {
        let mut combo = DMatrix::zeros(cs[0].nrows(), cs[0].ncols());
        for c in cs {
            combo += c * rng.random_range(0.5..1.5);
        }
        let v = symmetric_eigen(&combo)?.vectors;
        let residual = cs
            .iter()
            .map(|c| {
                let cv = c * &v;
                (0..v.ncols())
                    .map(|k| {
                        let y = v.column(k);
                        let theta = y.dot(&cv.column(k));
                        (cv.column(k) - y * theta).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if residual <= options.joint_tol * scale {
            return Ok((v, residual));
        }
        worst = worst.min(residual);
    }
    Err(Error::JointDiagonalizationFailed { residual: worst })
}

/// Sorts atoms and merges those within `radius` of their predecessor.
fn merge_atoms(mut atoms: Vec<Atom>, radius: f64) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.location.partial_cmp(&b.location).expect("locations are finite"));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for atom in atoms {
        if let Some(last) = out.last_mut() {
            let close = last.location.iter().zip(&atom.location).all(|(x, y)| (x - y).abs() < radius);
            if close {
                let total = last.weight + atom.weight;
                if total > 0.0 {
                    for (x, y) in last.location.iter_mut().zip(&atom.location) {
                        *x = (*x * last.weight + y * atom.weight) / total;
                    }
                }
                last.weight = total;
                continue;
            }
        }
        out.push(atom);
    }
    out
}

/// `c₊ + (-1)^{|n|} c₋ + Σ_k w_k Π_i P_{n_i}^{(q_i)}(θ_{k,i})`.
pub fn reconstruct(measure: &DiscreteMeasure, qs: &[ExtendedDegree], n: &[usize]) -> Result<f64> {
    if qs.len() != measure.dims {
        return Err(Error::DimensionMismatch { expected: measure.dims, found: qs.len() });
    }
    if n.len() != measure.dims {
        return Err(Error::DimensionMismatch { expected: measure.dims, found: n.len() });
    }
    let parity = if n.iter().sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 };
    let interior: f64 = measure
        .atoms
        .iter()
        .map(|a| {
            a.weight
                * a.location
                    .iter()
                    .zip(qs)
                    .zip(n)
                    .map(|((&t, &q), &k)| p_sequence(q, k, t)[k])
                    .product::<f64>()
        })
        .sum();
    Ok(measure.c_plus + parity * measure.c_minus + interior)
}

/// `φ(n)` for `n = 0..=n_max` from a one-dimensional measure.
pub fn reconstruct_sequence(measure: &DiscreteMeasure, q: ExtendedDegree, n_max: usize) -> Result<Vec<f64>> {
    if measure.dims != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: measure.dims });
    }
    let mut out: Vec<f64> = (0..=n_max)
        .map(|n| measure.c_plus + if n % 2 == 0 { measure.c_minus } else { -measure.c_minus })
        .collect();
    for a in &measure.atoms {
        for (o, p) in out.iter_mut().zip(p_sequence(q, n_max, a.location[0])) {
            *o += a.weight * p;
        }
    }
    Ok(out)
}

/// `max_{n ≤ n_max} |φ(n) - φ(n+2) - Σ_k u_k Q_n(θ_k)|` for the raw measure `μ`.
pub fn verify_q_moments(phi: &RadialKernelSpec, raw: &DiscreteMeasure, q: ExtendedDegree, n_max: usize) -> Result<f64> {
    if raw.dims != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: raw.dims });
    }
    let values = phi.values(n_max + 2)?;
    let mut moments = vec![0.0; n_max + 1];
    for a in &raw.atoms {
        for (m, v) in moments.iter_mut().zip(q_sequence(q, n_max, a.location[0])) {
            *m += a.weight * v;
        }
    }
    Ok((0..=n_max).map(|n| (values[n] - values[n + 2] - moments[n]).abs()).fold(0.0, f64::max))
}
