//! The Shizuta-Kawashima condition decided through the Kalman rank test,
//! with a direct eigenvector oracle and the block-reduction equivalence.
//!
//! A pair `(N, M)` fails the condition exactly when some eigenvector of `N`
//! lies in the kernel of `M`; equivalently the stacked controllability-type
//! matrix `[M; MN; ...; M N^{n-1}]` drops rank.

use crate::linalg::{self, C64, CMat, CVec};
use crate::sphere;
use crate::system::{evaluate_symbols, FrequencySymbol, SymbolicSystem, SymbolError};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SkError {
    #[error("shape mismatch: N is {n_rows}x{n_cols}, M is {m_rows}x{m_cols}")]
    ShapeMismatch { n_rows: usize, n_cols: usize, m_rows: usize, m_cols: usize },
    #[error("eigenvalue computation failed")]
    EigenFailure,
    #[error("lemma hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkMethod {
    Kalman,
    Eigenvector,
}

/// Which eigenvalues of `N` the eigenvector oracle screens. The definition
/// restricts to real `lambda` in `lambda phi + N phi = 0`; after the
/// conventional factor `i` in the convection symbol the restriction lands on
/// the imaginary axis instead, so both filters are exposed and the default
/// conservatively screens everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LambdaFilter {
    #[default]
    All,
    /// Keep eigenvalues with negligible imaginary part.
    RealOnly,
    /// Keep eigenvalues with negligible real part.
    ImaginaryOnly,
}

#[derive(Debug, Clone)]
pub struct SkVerdict {
    pub holds: bool,
    pub rank: usize,
    /// Singular values of the Kalman stack (descending), or of the screened
    /// quantities for the eigenvector method.
    pub singular_values: Vec<f64>,
    /// A unit vector violating the condition when `holds` is false.
    pub witness: Option<CVec>,
    /// Eigenvalue associated with the witness.
    pub witness_lambda: Option<C64>,
    pub method: SkMethod,
    /// Absolute singular-value threshold that was applied.
    pub threshold: f64,
}

fn check_shapes(n_mat: &CMat, m_mat: &CMat) -> Result<usize, SkError> {
    let n = n_mat.nrows();
    if n_mat.ncols() != n || m_mat.nrows() != n || m_mat.ncols() != n {
        return Err(SkError::ShapeMismatch {
            n_rows: n_mat.nrows(),
            n_cols: n_mat.ncols(),
            m_rows: m_mat.nrows(),
            m_cols: m_mat.ncols(),
        });
    }
    Ok(n)
}

/// Vertical stack `[M; MN; ...; M N^{n-1}]` (an `n^2 x n` matrix).
pub fn kalman_matrix(n_mat: &CMat, m_mat: &CMat) -> Result<CMat, SkError> {
    let n = check_shapes(n_mat, m_mat)?;
    let mut stack = CMat::zeros(n * n, n);
    let mut block = m_mat.clone();
    for k in 0..n {
        stack.view_mut((k * n, 0), (n, n)).copy_from(&block);
        if k + 1 < n {
            block = &block * n_mat;
        }
    }
    Ok(stack)
}

/// Decide the condition by the numerical rank of the Kalman stack.
///
/// `rel_tol = None` applies the scale-free default
/// `sigma_max * n^2 * eps * 100`.
pub fn kalman_rank_holds(
    n_mat: &CMat,
    m_mat: &CMat,
    rel_tol: Option<f64>,
) -> Result<SkVerdict, SkError> {
    let n = check_shapes(n_mat, m_mat)?;
    let stack = kalman_matrix(n_mat, m_mat)?;
    let info = linalg::numerical_rank(&stack, rel_tol);
    let holds = info.rank == n;
    let mut witness = None;
    let mut witness_lambda = None;
    if !holds && n > 0 {
        // The kernel of the stack is N-invariant; refine the certificate to
        // an eigenvector of N inside it so that it witnesses the defining
        // property and not just rank deficiency.
        let kernel = linalg::null_space(&stack, info.threshold.max(linalg::EPS));
        if kernel.ncols() == 1 {
            let w = kernel.column(0).into_owned();
            let lam = w.dotc(&(n_mat * &w)); // Rayleigh quotient w* N w
            witness_lambda = Some(lam);
            witness = Some(w);
        } else if kernel.ncols() > 1 {
            let nk = kernel.adjoint() * n_mat * &kernel;
            if let Ok((vals, vecs)) = linalg::eigen_pairs(&nk) {
                let w = (&kernel * vecs.column(0)).normalize();
                witness_lambda = vals.first().copied();
                witness = Some(w);
            } else {
                witness = info.least_right.clone();
            }
        }
    }
    Ok(SkVerdict {
        holds,
        rank: info.rank,
        singular_values: info.singular_values,
        witness,
        witness_lambda,
        method: SkMethod::Kalman,
        threshold: info.threshold,
    })
}

/// Direct oracle on the definition: the condition fails iff some eigenspace
/// of `N` meets the kernel of `M`. Eigenspaces are recovered per distinct
/// eigenvalue from the null space of `N - lambda I`, which also covers
/// defective `N`.
pub fn sk_eigenvector_check(
    n_mat: &CMat,
    m_mat: &CMat,
    rel_tol: Option<f64>,
    filter: LambdaFilter,
) -> Result<SkVerdict, SkError> {
    let n = check_shapes(n_mat, m_mat)?;
    if n == 0 {
        return Ok(SkVerdict {
            holds: true,
            rank: 0,
            singular_values: vec![],
            witness: None,
            witness_lambda: None,
            method: SkMethod::Eigenvector,
            threshold: 0.0,
        });
    }
    let vals = linalg::eigenvalues(n_mat).map_err(|_| SkError::EigenFailure)?;
    let scale_n = linalg::max_abs(n_mat).max(1.0);
    let scale_m = linalg::max_abs(m_mat).max(1.0);
    let rel = rel_tol.unwrap_or((n * n) as f64 * linalg::EPS * 100.0);
    let tol_m = rel * scale_m;

    // Cluster eigenvalues so each eigenspace is handled once.
    let mut distinct: Vec<C64> = Vec::new();
    for v in vals {
        if !distinct.iter().any(|u| (u - v).norm() <= 1e-8 * scale_n) {
            distinct.push(v);
        }
    }

    let mut screened_min = f64::INFINITY;
    for lam in distinct {
        let keep = match filter {
            LambdaFilter::All => true,
            LambdaFilter::RealOnly => lam.im.abs() <= 1e-10 * scale_n,
            LambdaFilter::ImaginaryOnly => lam.re.abs() <= 1e-10 * scale_n,
        };
        if !keep {
            continue;
        }
        let shifted = n_mat - CMat::identity(n, n) * lam;
        let basis = linalg::null_space(&shifted, 1e-10 * scale_n);
        if basis.ncols() == 0 {
            continue;
        }
        // Smallest singular value of M restricted to the eigenspace: zero
        // exactly when some eigenvector is annihilated by M.
        let mb = m_mat * &basis;
        let sv = mb.clone().svd(false, true);
        let smin = sv.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
        let smin = if basis.ncols() > mb.nrows() { 0.0 } else { smin };
        screened_min = screened_min.min(smin);
        if smin <= tol_m {
            let v_t = sv.v_t.expect("requested V^H");
            let idx = sv
                .singular_values
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap_or(0);
            let combo = v_t.row(idx).adjoint();
            let witness = (&basis * combo).normalize();
            return Ok(SkVerdict {
                holds: false,
                rank: 0,
                singular_values: vec![smin],
                witness: Some(witness),
                witness_lambda: Some(lam),
                method: SkMethod::Eigenvector,
                threshold: tol_m,
            });
        }
    }
    Ok(SkVerdict {
        holds: true,
        rank: n,
        singular_values: vec![screened_min],
        witness: None,
        witness_lambda: None,
        method: SkMethod::Eigenvector,
        threshold: tol_m,
    })
}

/// `min_{|eta| = 1} sum_l eps_l |M N^l eta|^2`, the hypocoercive quadratic
/// form of the Kalman lemma; strictly positive exactly when the condition
/// holds.
pub fn hypocoercivity_positivity(n_mat: &CMat, m_mat: &CMat, epsilons: &[f64]) -> f64 {
    let n = n_mat.nrows();
    assert_eq!(epsilons.len(), n, "one epsilon per Kalman power");
    assert!(epsilons.iter().all(|&e| e > 0.0), "epsilons must be positive");
    if n == 0 {
        return 0.0;
    }
    let mut q = CMat::zeros(n, n);
    let mut block = m_mat.clone();
    for &eps in epsilons {
        q += (block.adjoint() * &block).scale(eps);
        block = &block * n_mat;
    }
    linalg::min_eig_hermitian(&q).max(0.0)
}

// ---------------------------------------------------------------------------
// Sphere sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct SphereSpec {
    pub count: usize,
}

impl SphereSpec {
    pub fn default_for(d: usize) -> Self {
        Self { count: sphere::default_count(d) }
    }
}

#[derive(Debug, Clone)]
pub struct SkSphereEntry {
    pub index: usize,
    pub omega: crate::linalg::RVec,
    pub rank: usize,
    pub holds: bool,
    pub min_singular_value: f64,
    pub reduced_holds: bool,
    pub reduced_rank: usize,
}

#[derive(Debug, Clone)]
pub struct SkSphereReport {
    pub entries: Vec<SkSphereEntry>,
    /// Every sampled direction passes on the full pair.
    pub all_hold: bool,
    /// The reduced pair's verdict agrees with the full pair everywhere
    /// (the block-reduction lemma).
    pub reduced_agrees: bool,
}

impl SkSphereReport {
    /// CSV body with the report columns; deterministic formatting.
    pub fn to_csv(&self) -> String {
        let d = self.entries.first().map(|e| e.omega.len()).unwrap_or(0);
        let mut out = String::from("omega_index");
        for i in 0..d {
            out.push_str(&format!(",omega_{i}"));
        }
        out.push_str(",rank,holds,min_singular_value\n");
        for e in &self.entries {
            out.push_str(&e.index.to_string());
            for i in 0..d {
                out.push_str(&format!(",{:.16e}", e.omega[i]));
            }
            out.push_str(&format!(",{},{},{:.16e}\n", e.rank, e.holds, e.min_singular_value));
        }
        out
    }
}

/// Run the Kalman test at every sampled direction, on the full pair
/// `(N_omega, M_omega)` and on the reduced pair, and record agreement.
pub fn sk_over_sphere(
    system: &SymbolicSystem,
    sampling: &SphereSpec,
) -> Result<SkSphereReport, SkError> {
    let dirs = sphere::unit_sphere(system.d, sampling.count);
    let entries: Result<Vec<SkSphereEntry>, SkError> = dirs
        .par_iter()
        .enumerate()
        .map(|(index, omega)| {
            let sym = evaluate_symbols(system, omega)?;
            let full = kalman_rank_holds(&sym.n_omega, &sym.m_omega, None)?;
            let red = kalman_rank_holds(&sym.nred, &sym.mred, None)?;
            let min_sv = full.singular_values.last().copied().unwrap_or(0.0);
            Ok(SkSphereEntry {
                index,
                omega: omega.clone(),
                rank: full.rank,
                holds: full.holds,
                min_singular_value: min_sv,
                reduced_holds: red.holds,
                reduced_rank: red.rank,
            })
        })
        .collect();
    let entries = entries?;
    let all_hold = entries.iter().all(|e| e.holds);
    let reduced_agrees = entries.iter().all(|e| e.holds == e.reduced_holds);
    Ok(SkSphereReport { entries, all_hold, reduced_agrees })
}

// ---------------------------------------------------------------------------
// Block reduction (the appendix lemma)
// ---------------------------------------------------------------------------

/// Self-test of the block reduction: with `M = diag(0, M22)` and blocked `N`,
/// the condition on `(N, M)` implies it on `(N11, N12 Q N21)` whenever the
/// Hermitian part of `Q` is definite; with invertible `M22` the two are
/// equivalent. Returns whether the verdicts relate as the lemma demands.
#[allow(clippy::too_many_arguments)]
pub fn block_sk_reduction_check(
    n11: &CMat,
    n12: &CMat,
    n21: &CMat,
    n22: &CMat,
    m22: &CMat,
    q: &CMat,
    rel_tol: Option<f64>,
) -> Result<bool, SkError> {
    let n1 = n11.nrows();
    let n2 = n22.nrows();
    let shapes_ok = n11.ncols() == n1
        && n12.nrows() == n1
        && n12.ncols() == n2
        && n21.nrows() == n2
        && n21.ncols() == n1
        && n22.ncols() == n2
        && m22.nrows() == n2
        && m22.ncols() == n2
        && q.nrows() == n2
        && q.ncols() == n2;
    if !shapes_ok {
        return Err(SkError::ShapeMismatch {
            n_rows: n11.nrows(),
            n_cols: n12.ncols(),
            m_rows: m22.nrows(),
            m_cols: q.ncols(),
        });
    }

    // Hypothesis: Re(Q eta . eta) never vanishes, i.e. the Hermitian part of
    // Q is definite (either sign).
    if n2 > 0 {
        let ev = linalg::hermitian_eigenvalues(q);
        let lo = ev.first().copied().unwrap();
        let hi = ev.last().copied().unwrap();
        let tol = 1e-12 * linalg::max_abs(q).max(1.0);
        if !(lo > tol || hi < -tol) {
            return Err(SkError::HypothesisViolation(format!(
                "Hermitian part of Q is not definite (eigenvalue range [{lo:.3e}, {hi:.3e}])"
            )));
        }
    }
    // Hypothesis: N12 and N21 are adjoint up to sign (the skew-Hermitian
    // convention flips the sign; the lemma's proof is insensitive to it).
    let adj = n21.adjoint();
    let scale = linalg::max_abs(n12).max(linalg::max_abs(n21)).max(1.0);
    let plus = linalg::max_abs(&(&adj - n12));
    let minus = linalg::max_abs(&(&adj + n12));
    if plus.min(minus) > 1e-10 * scale {
        return Err(SkError::HypothesisViolation(format!(
            "N12 and adjoint(N21) differ beyond sign (defect {:.3e})",
            plus.min(minus)
        )));
    }

    let n = n1 + n2;
    let mut n_full = CMat::zeros(n, n);
    n_full.view_mut((0, 0), (n1, n1)).copy_from(n11);
    n_full.view_mut((0, n1), (n1, n2)).copy_from(n12);
    n_full.view_mut((n1, 0), (n2, n1)).copy_from(n21);
    n_full.view_mut((n1, n1), (n2, n2)).copy_from(n22);
    let mut m_full = CMat::zeros(n, n);
    m_full.view_mut((n1, n1), (n2, n2)).copy_from(m22);

    let full = kalman_rank_holds(&n_full, &m_full, rel_tol)?;
    let reduced_m = n12 * q * n21;
    let reduced = kalman_rank_holds(n11, &reduced_m, rel_tol)?;

    let m22_invertible = if n2 == 0 {
        true
    } else {
        let sv = m22.clone().singular_values();
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        smax > 0.0 && smin > 1e-10 * smax
    };

    if m22_invertible {
        Ok(full.holds == reduced.holds)
    } else {
        // Only the forward implication is claimed.
        Ok(!full.holds || reduced.holds)
    }
}

/// Reduced-vs-full agreement data for one frequency symbol (used by tests
/// and by the sphere sweep).
pub fn reduction_agrees(sym: &FrequencySymbol) -> Result<bool, SkError> {
    let full = kalman_rank_holds(&sym.n_omega, &sym.m_omega, None)?;
    let red = kalman_rank_holds(&sym.nred, &sym.mred, None)?;
    Ok(full.holds == red.holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex, CMat, CVec};
    use crate::zoo;

    fn toy_pair() -> (CMat, CMat) {
        let n = CMat::from_row_slice(2, 2, &[
            complex(0.0, 0.0),
            complex(0.0, 1.0),
            complex(0.0, 1.0),
            complex(0.0, 0.0),
        ]);
        let m = CMat::from_row_slice(2, 2, &[
            complex(0.0, 0.0),
            complex(0.0, 0.0),
            complex(0.0, 0.0),
            complex(1.0, 0.0),
        ]);
        (n, m)
    }

    #[test]
    fn kalman_matrix_zero_convection() {
        // N = 0, M = I: the stack is [I; 0].
        let n = CMat::zeros(2, 2);
        let m = CMat::identity(2, 2);
        let k = kalman_matrix(&n, &m).unwrap();
        assert_eq!(k.nrows(), 4);
        assert!((k[(0, 0)] - complex(1.0, 0.0)).norm() < 1e-15);
        assert!((k[(1, 1)] - complex(1.0, 0.0)).norm() < 1e-15);
        assert!(k.view((2, 0), (2, 2)).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn kalman_matrix_toy_rows() {
        let (n, m) = toy_pair();
        let k = kalman_matrix(&n, &m).unwrap();
        // rows: (0,0), (0,1), (0,0), (i,0)
        assert!(k.row(0).iter().all(|z| z.norm() == 0.0));
        assert!((k[(1, 1)] - complex(1.0, 0.0)).norm() < 1e-15);
        assert!(k.row(2).iter().all(|z| z.norm() < 1e-15));
        assert!((k[(3, 0)] - complex(0.0, 1.0)).norm() < 1e-15);
        assert!(k[(3, 1)].norm() < 1e-15);
    }

    #[test]
    fn kalman_matrix_identity_convection() {
        // N = I fixes the powers: stack [diag(1,0); diag(1,0)].
        let n = CMat::identity(2, 2);
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = complex(1.0, 0.0);
        let k = kalman_matrix(&n, &m).unwrap();
        for blk in 0..2 {
            assert!((k[(2 * blk, 0)] - complex(1.0, 0.0)).norm() < 1e-15);
            assert!(k[(2 * blk + 1, 1)].norm() < 1e-15);
        }
    }

    #[test]
    fn toy_pair_holds_with_rank_two() {
        let (n, m) = toy_pair();
        let v = kalman_rank_holds(&n, &m, None).unwrap();
        assert!(v.holds);
        assert_eq!(v.rank, 2);
        assert!(v.witness.is_none());
    }

    #[test]
    fn zero_damping_fails_with_rank_zero() {
        let (n, _) = toy_pair();
        let m = CMat::zeros(2, 2);
        let v = kalman_rank_holds(&n, &m, None).unwrap();
        assert!(!v.holds);
        assert_eq!(v.rank, 0);
    }

    #[test]
    fn diagonal_pair_witness() {
        // N = diag(i, -i), M = diag(0, 1): the first coordinate is invisible.
        let n = CMat::from_diagonal(&CVec::from_vec(vec![complex(0.0, 1.0), complex(0.0, -1.0)]));
        let m = CMat::from_diagonal(&CVec::from_vec(vec![complex(0.0, 0.0), complex(1.0, 0.0)]));
        let v = kalman_rank_holds(&n, &m, None).unwrap();
        assert!(!v.holds);
        assert_eq!(v.rank, 1);
        let w = v.witness.expect("witness for rank-deficient pair");
        assert!((w[0].norm() - 1.0).abs() < 1e-10);
        assert!(w[1].norm() < 1e-10);
        // witness invariant
        assert!((&m * &w).norm() <= 1e-10);
        let lam = v.witness_lambda.unwrap();
        assert!((&n * &w - w.scale(1.0) * lam).norm() <= 1e-10);
    }

    #[test]
    fn eigenvector_oracle_on_toy_pair() {
        let (n, m) = toy_pair();
        let v = sk_eigenvector_check(&n, &m, None, LambdaFilter::All).unwrap();
        assert!(v.holds);
        // eigenvectors (1, +-1)/sqrt(2): |M phi| = 1/sqrt(2)
        assert!((v.singular_values[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn eigenvector_oracle_zero_damping() {
        let (n, _) = toy_pair();
        let m = CMat::zeros(2, 2);
        let v = sk_eigenvector_check(&n, &m, None, LambdaFilter::All).unwrap();
        assert!(!v.holds);
        assert!(v.witness.is_some());
    }

    #[test]
    fn eigenvector_oracle_diagonal_witness() {
        let n = CMat::from_diagonal(&CVec::from_vec(vec![complex(0.0, 1.0), complex(0.0, -1.0)]));
        let m = CMat::from_diagonal(&CVec::from_vec(vec![complex(0.0, 0.0), complex(1.0, 0.0)]));
        let v = sk_eigenvector_check(&n, &m, None, LambdaFilter::All).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!((w[0].norm() - 1.0).abs() < 1e-10 && w[1].norm() < 1e-10);
    }

    #[test]
    fn hypocoercivity_of_toy_pair() {
        // |M eta|^2 + |MN eta|^2 = |eta_2|^2 + |eta_1|^2 = 1 on the unit
        // sphere, so the minimum is exactly 1.
        let (n, m) = toy_pair();
        let v = hypocoercivity_positivity(&n, &m, &[1.0, 1.0]);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hypocoercivity_vanishes_without_damping() {
        let (n, _) = toy_pair();
        let m = CMat::zeros(2, 2);
        assert_eq!(hypocoercivity_positivity(&n, &m, &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn sphere_sweep_toy_passes_and_decoupled_fails() {
        let sys = zoo::make_toy1d();
        let rep = sk_over_sphere(&sys, &SphereSpec::default_for(1)).unwrap();
        assert!(rep.all_hold);
        assert!(rep.reduced_agrees);

        let dec = zoo::make_toy1d_with_coupling(0.0);
        let rep = sk_over_sphere(&dec, &SphereSpec::default_for(1)).unwrap();
        assert!(!rep.all_hold);
        assert!(rep.entries.iter().all(|e| !e.holds), "every direction must fail");
        assert!(rep.reduced_agrees);
    }

    #[test]
    fn block_reduction_on_toy_blocks() {
        // N11 = 0, N12 = N21 = i, Q = 1, M22 = 1: both sides hold.
        let one = |z: C64| CMat::from_row_slice(1, 1, &[z]);
        let ok = block_sk_reduction_check(
            &one(complex(0.0, 0.0)),
            &one(complex(0.0, 1.0)),
            &one(complex(0.0, 1.0)),
            &one(complex(0.0, 0.0)),
            &one(complex(1.0, 0.0)),
            &one(complex(1.0, 0.0)),
            None,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn block_reduction_forward_only_with_singular_m22() {
        let one = |z: C64| CMat::from_row_slice(1, 1, &[z]);
        // M22 = 0: the full pair fails SK while the reduced pair holds;
        // the forward implication is satisfied vacuously.
        let ok = block_sk_reduction_check(
            &one(complex(0.0, 0.0)),
            &one(complex(0.0, 1.0)),
            &one(complex(0.0, 1.0)),
            &one(complex(0.0, 0.0)),
            &one(complex(0.0, 0.0)),
            &one(complex(1.0, 0.0)),
            None,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn block_reduction_rejects_indefinite_q() {
        let one = |z: C64| CMat::from_row_slice(1, 1, &[z]);
        let err = block_sk_reduction_check(
            &one(complex(0.0, 0.0)),
            &one(complex(0.0, 1.0)),
            &one(complex(0.0, 1.0)),
            &one(complex(0.0, 0.0)),
            &one(complex(1.0, 0.0)),
            &one(complex(0.0, 1.0)), // purely imaginary: Hermitian part zero
            None,
        );
        assert!(matches!(err, Err(SkError::HypothesisViolation(_))));
    }

    #[test]
    fn mhd_reduction_agreement_spotcheck() {
        let sys = zoo::make_mhd_default();
        for omega in sphere::unit_sphere(3, 16) {
            let sym = evaluate_symbols(&sys, &omega).unwrap();
            assert!(reduction_agrees(&sym).unwrap());
        }
    }
}
