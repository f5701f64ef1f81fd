//! Dense complex linear algebra helpers shared across the crate.
//!
//! Everything is built on dynamically sized `nalgebra` matrices over
//! `Complex<f64>`; eigenvalue problems go through the complex Schur form.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use thiserror::Error;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Machine epsilon for `f64`.
pub const EPS: f64 = f64::EPSILON;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("Schur iteration failed to converge")]
    SchurFailure,
    #[error("singular matrix in solve")]
    Singular,
}

pub fn complex(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Lift a real matrix into the complex field.
pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

/// Hermitian part `(M + M*)/2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Largest absolute entry; zero for empty matrices.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_real(m: &RMat) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending. Empty input gives an empty list.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = hermitian_part(m).symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eig_hermitian(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Largest eigenvalue of the Hermitian part of `m`.
pub fn max_eig_hermitian(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).last().copied().unwrap_or(0.0)
}

/// Eigenvalues of a general complex square matrix via the Schur form.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>, LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare(m.nrows(), m.ncols()));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 100_000)
        .ok_or(LinalgError::SchurFailure)?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues with right eigenvectors (columns), computed from the Schur
/// form with triangular back-substitution. Nearly defective directions get a
/// perturbed denominator; callers should check residuals when it matters.
pub fn eigen_pairs(m: &CMat) -> Result<(Vec<C64>, CMat), LinalgError> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(LinalgError::NotSquare(m.nrows(), m.ncols()));
    }
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 100_000)
        .ok_or(LinalgError::SchurFailure)?;
    let (q, t) = schur.unpack();
    let scale = max_abs(&t).max(1.0);
    let guard = scale * EPS * 64.0;
    let mut vecs = CMat::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        let lam = t[(i, i)];
        vals.push(lam);
        let mut y = CVec::zeros(n);
        y[i] = C64::new(1.0, 0.0);
        for k in (0..i).rev() {
            let mut s = C64::new(0.0, 0.0);
            for c in (k + 1)..=i {
                s += t[(k, c)] * y[c];
            }
            let mut den = t[(k, k)] - lam;
            if den.norm() < guard {
                den = C64::new(guard, 0.0);
            }
            y[k] = -s / den;
        }
        let mut x = &q * y;
        let nx = x.norm();
        if nx > 0.0 {
            x /= C64::new(nx, 0.0);
        }
        vecs.set_column(i, &x);
    }
    Ok((vals, vecs))
}

/// Orthonormal basis of the numerical null space of `m` (right singular
/// vectors whose singular value is at most `tol`).
pub fn null_space(m: &CMat, tol: f64) -> CMat {
    let ncols = m.ncols();
    if ncols == 0 {
        return CMat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMat::identity(ncols, ncols);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut cols: Vec<CVec> = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol {
            cols.push(v_t.row(i).adjoint());
        }
    }
    // Singular values only cover min(nrows, ncols); trailing rows of V^H span
    // directions annihilated outright.
    for i in svd.singular_values.len()..ncols {
        cols.push(v_t.row(i).adjoint());
    }
    let mut out = CMat::zeros(ncols, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Numerical rank data of a (possibly rectangular) matrix.
#[derive(Debug, Clone)]
pub struct RankInfo {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// Right singular vector of the smallest singular value.
    pub least_right: Option<CVec>,
    /// Absolute threshold actually applied.
    pub threshold: f64,
}

/// Rank by SVD with a relative threshold: singular values above
/// `rel_tol * sigma_max` count. `rel_tol = None` uses
/// `ncols^2 * eps * 100` which is scale free.
pub fn numerical_rank(m: &CMat, rel_tol: Option<f64>) -> RankInfo {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return RankInfo { rank: 0, singular_values: Vec::new(), least_right: None, threshold: 0.0 };
    }
    let svd = m.clone().svd(false, true);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let smax = sv.first().copied().unwrap_or(0.0);
    let rel = rel_tol.unwrap_or((n * n) as f64 * EPS * 100.0);
    let threshold = smax * rel;
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    let v_t = svd.v_t.expect("requested V^H");
    // Index of the smallest singular value in the unsorted order.
    let least_idx = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i);
    let least_right = if rank < n {
        // Directions beyond the singular value list are exactly annihilated.
        if svd.singular_values.len() < n {
            Some(v_t.row(n - 1).adjoint())
        } else {
            least_idx.map(|i| v_t.row(i).adjoint())
        }
    } else {
        None
    };
    RankInfo { rank, singular_values: sv, least_right, threshold }
}

/// 2-norm condition number estimate via SVD.
pub fn condition_number(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Solve `A X = B` by LU; `None` when `A` is singular to working precision.
pub fn solve(a: &CMat, b: &CMat) -> Option<CMat> {
    a.clone().lu().solve(b)
}

pub fn solve_real(a: &RMat, b: &RMat) -> Option<RMat> {
    a.clone().lu().solve(b)
}

/// Applies the semigroup `v -> exp(-t K) v` for a fixed generator `K` and
/// many times `t`. Diagonalization is used when the eigenvector basis is
/// well conditioned, otherwise each application falls back to a
/// scaling-and-squaring matrix exponential.
#[derive(Debug, Clone)]
pub enum Propagator {
    Diagonal { vals: Vec<C64>, basis: CMat, basis_inv: CMat },
    Direct { generator: CMat },
}

/// Condition-number gate for the eigenbasis route.
const PROPAGATOR_COND_LIMIT: f64 = 1e8;

impl Propagator {
    pub fn new(generator: &CMat) -> Result<Self, LinalgError> {
        let n = generator.nrows();
        if n != generator.ncols() {
            return Err(LinalgError::NotSquare(generator.nrows(), generator.ncols()));
        }
        if let Ok((vals, basis)) = eigen_pairs(generator) {
            let scale = max_abs(generator).max(1.0);
            let mut lam = CMat::zeros(n, n);
            for i in 0..n {
                lam[(i, i)] = vals[i];
            }
            let residual = max_abs(&(generator * &basis - &basis * &lam));
            if residual <= scale * 1e-10 && condition_number(&basis) <= PROPAGATOR_COND_LIMIT {
                if let Some(basis_inv) = solve(&basis, &CMat::identity(n, n)) {
                    return Ok(Propagator::Diagonal { vals, basis, basis_inv });
                }
            }
        }
        Ok(Propagator::Direct { generator: generator.clone() })
    }

    pub fn apply(&self, t: f64, v0: &CVec) -> CVec {
        match self {
            Propagator::Diagonal { vals, basis, basis_inv } => {
                let mut w = basis_inv * v0;
                for (i, lam) in vals.iter().enumerate() {
                    w[i] *= (-lam * t).exp();
                }
                basis * w
            }
            Propagator::Direct { generator } => {
                let e = generator.scale(-t).exp();
                &e * v0
            }
        }
    }

    /// Propagator of the conjugated generator, built entry-exactly so that
    /// Hermitian mode pairs stay in exact symmetry.
    pub fn conjugated(&self) -> Self {
        match self {
            Propagator::Diagonal { vals, basis, basis_inv } => Propagator::Diagonal {
                vals: vals.iter().map(|z| z.conj()).collect(),
                basis: basis.map(|z| z.conj()),
                basis_inv: basis_inv.map(|z| z.conj()),
            },
            Propagator::Direct { generator } => {
                Propagator::Direct { generator: generator.map(|z| z.conj()) }
            }
        }
    }
}
