//! System descriptions by coefficient matrices and their frequency symbols.
//!
//! A system is given by callable matrix coefficients `S^0(U)`, `S^alpha(U)`
//! and `Y^{alpha,beta}(U)` on a state domain, together with a reference state
//! about which everything is frozen. The first `n1` state components carry no
//! diffusion; the remaining `n2` see a strongly elliptic second-order block.

use crate::linalg::{
    self, complex, max_abs_real, to_complex, C64, CMat, RMat, RVec,
};
use crate::sphere;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Callable matrix coefficient `U -> matrix`.
pub type MatrixFn = Arc<dyn Fn(&RVec) -> RMat + Send + Sync>;
/// Domain membership predicate.
pub type DomainFn = Arc<dyn Fn(&RVec) -> bool + Send + Sync>;

#[derive(Debug, Error)]
pub enum SymbolError {
    #[error("direction is not a unit vector (|omega| = {0})")]
    NonUnitDirection(f64),
    #[error("S^0 at the reference state is singular")]
    SingularS0,
    #[error("Z(omega) is singular or not elliptic (min Hermitian eigenvalue {0:.3e})")]
    SingularZ(f64),
    #[error("coefficient map returned a {got_rows}x{got_cols} matrix, expected {want}x{want}")]
    ShapeMismatch { got_rows: usize, got_cols: usize, want: usize },
    #[error("state sample {index} lies outside the admissible domain")]
    DomainViolation { index: usize },
    #[error("dimension mismatch: expected vector of length {want}, got {got}")]
    DimensionMismatch { want: usize, got: usize },
}

/// A symmetric hyperbolic system with partially diffusive structure.
#[derive(Clone)]
pub struct SymbolicSystem {
    pub d: usize,
    pub n1: usize,
    pub n2: usize,
    pub uref: RVec,
    s0: MatrixFn,
    s_alpha: Vec<MatrixFn>,
    y: Vec<Vec<MatrixFn>>,
    domain: DomainFn,
    /// Whether the model declares a vanishing source term `f`.
    pub source_free: bool,
    /// Human-readable note on the (non-evolved) source, when present.
    pub source_note: Option<String>,
}

impl fmt::Debug for SymbolicSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolicSystem")
            .field("d", &self.d)
            .field("n1", &self.n1)
            .field("n2", &self.n2)
            .field("uref", &self.uref)
            .field("source_free", &self.source_free)
            .finish()
    }
}

impl SymbolicSystem {
    /// Builds a system and validates shapes at the reference state.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d: usize,
        n1: usize,
        n2: usize,
        uref: RVec,
        s0: MatrixFn,
        s_alpha: Vec<MatrixFn>,
        y: Vec<Vec<MatrixFn>>,
        domain: DomainFn,
        source_free: bool,
    ) -> Result<Self, SymbolError> {
        let n = n1 + n2;
        if uref.len() != n {
            return Err(SymbolError::DimensionMismatch { want: n, got: uref.len() });
        }
        assert_eq!(s_alpha.len(), d, "need one S^alpha per space direction");
        assert_eq!(y.len(), d, "need a d x d array of Y^{{alpha,beta}} maps");
        for row in &y {
            assert_eq!(row.len(), d);
        }
        let sys = Self {
            d,
            n1,
            n2,
            uref,
            s0,
            s_alpha,
            y,
            domain,
            source_free,
            source_note: None,
        };
        sys.check_shapes_at(&sys.uref.clone())?;
        assert!(sys.in_domain(&sys.uref), "reference state must be admissible");
        Ok(sys)
    }

    pub fn with_source_note(mut self, note: impl Into<String>) -> Self {
        self.source_note = Some(note.into());
        self.source_free = false;
        self
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn in_domain(&self, u: &RVec) -> bool {
        (self.domain)(u)
    }

    pub fn s0_at(&self, u: &RVec) -> RMat {
        (self.s0)(u)
    }

    pub fn s_alpha_at(&self, alpha: usize, u: &RVec) -> RMat {
        (self.s_alpha[alpha])(u)
    }

    pub fn y_at(&self, alpha: usize, beta: usize, u: &RVec) -> RMat {
        (self.y[alpha][beta])(u)
    }

    fn check_shapes_at(&self, u: &RVec) -> Result<(), SymbolError> {
        let n = self.n();
        let shape_ok = |m: &RMat| -> Result<(), SymbolError> {
            if m.nrows() != n || m.ncols() != n {
                Err(SymbolError::ShapeMismatch { got_rows: m.nrows(), got_cols: m.ncols(), want: n })
            } else {
                Ok(())
            }
        };
        shape_ok(&self.s0_at(u))?;
        for a in 0..self.d {
            shape_ok(&self.s_alpha_at(a, u))?;
        }
        for a in 0..self.d {
            for b in 0..self.d {
                shape_ok(&self.y_at(a, b, u))?;
            }
        }
        Ok(())
    }

    /// Second-order symbol `sum Z^{ab}(U) xi_a xi_b` (the diffusive block of
    /// `Y(xi, U)`), for an arbitrary, not necessarily unit, `xi`.
    pub fn z_symbol_at(&self, u: &RVec, xi: &RVec) -> RMat {
        let mut z = RMat::zeros(self.n2, self.n2);
        for a in 0..self.d {
            for b in 0..self.d {
                let yab = self.y_at(a, b, u);
                z += yab.view((self.n1, self.n1), (self.n2, self.n2)) * (xi[a] * xi[b]);
            }
        }
        z
    }
}

/// All frozen-coefficient symbol data at one unit direction.
#[derive(Debug, Clone)]
pub struct FrequencySymbol {
    pub omega: RVec,
    /// `A_omega = i sum S^alpha(Uref) omega_alpha`, skew-Hermitian.
    pub a_omega: CMat,
    /// `B_omega = sum Y^{ab}(Uref) omega_a omega_b`, real symmetric PSD.
    pub b_omega: RMat,
    /// `N_omega = (S^0)^{-1} A_omega`.
    pub n_omega: CMat,
    /// `M_omega = (S^0)^{-1} B_omega`.
    pub m_omega: CMat,
    /// `S21(omega) = sum S^alpha_21 omega_alpha` (n2 x n1).
    pub s21: RMat,
    /// `S22(omega) = sum S^alpha_22 omega_alpha` (n2 x n2).
    pub s22: RMat,
    /// `S12(omega) = sum S^alpha_12 omega_alpha` (n1 x n2).
    pub s12: RMat,
    /// `Z(omega)`, the diffusive block of `B_omega` (n2 x n2).
    pub z_omega: RMat,
    /// Reduced convection symbol on the undiffused block (n1 x n1).
    pub nred: CMat,
    /// Reduced damping symbol `(S^0_11)^{-1} S12 Z^{-1} S21` (n1 x n1).
    pub mred: CMat,
    /// Frozen `S^0` and its diagonal blocks.
    pub s0_bar: RMat,
    pub s0_bar_11: RMat,
    pub s0_bar_22: RMat,
    pub n1: usize,
    pub n2: usize,
}

impl FrequencySymbol {
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// Generator of the per-mode linear flow, `K(xi) = rho N + rho^2 M`
    /// with `rho = |xi|` and this symbol's direction.
    pub fn mode_generator(&self, rho: f64) -> CMat {
        &self.n_omega * complex(rho, 0.0) + &self.m_omega * complex(rho * rho, 0.0)
    }
}

/// Evaluate every frequency symbol of `system` at the unit direction `omega`.
pub fn evaluate_symbols(system: &SymbolicSystem, omega: &RVec) -> Result<FrequencySymbol, SymbolError> {
    if omega.len() != system.d {
        return Err(SymbolError::DimensionMismatch { want: system.d, got: omega.len() });
    }
    let norm = omega.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(SymbolError::NonUnitDirection(norm));
    }
    let (n1, n2) = (system.n1, system.n2);
    let n = system.n();
    let uref = &system.uref;

    let s0_bar = system.s0_at(uref);
    let s0_bar_11 = s0_bar.view((0, 0), (n1, n1)).into_owned();
    let s0_bar_22 = s0_bar.view((n1, n1), (n2, n2)).into_owned();

    let mut s_omega = RMat::zeros(n, n);
    for a in 0..system.d {
        s_omega += system.s_alpha_at(a, uref) * omega[a];
    }
    let a_omega: CMat = s_omega.map(|x| complex(0.0, x));

    let mut b_omega = RMat::zeros(n, n);
    for a in 0..system.d {
        for b in 0..system.d {
            b_omega += system.y_at(a, b, uref) * (omega[a] * omega[b]);
        }
    }
    let z_omega = b_omega.view((n1, n1), (n2, n2)).into_owned();

    let s0_c = to_complex(&s0_bar);
    let n_omega = linalg::solve(&s0_c, &a_omega).ok_or(SymbolError::SingularS0)?;
    let m_omega = linalg::solve(&s0_c, &to_complex(&b_omega)).ok_or(SymbolError::SingularS0)?;

    let s12 = s_omega.view((0, n1), (n1, n2)).into_owned();
    let s21 = s_omega.view((n1, 0), (n2, n1)).into_owned();
    let s22 = s_omega.view((n1, n1), (n2, n2)).into_owned();
    let s11 = s_omega.view((0, 0), (n1, n1)).into_owned();

    // Z(omega) must be elliptic: positive definite Hermitian part.
    let zmin = if n2 > 0 {
        linalg::min_eig_hermitian(&to_complex(&z_omega))
    } else {
        f64::INFINITY
    };
    if n2 > 0 && zmin <= 1e-12 * max_abs_real(&z_omega).max(1.0) {
        return Err(SymbolError::SingularZ(zmin));
    }
    let z_inv_s21 =
        linalg::solve_real(&z_omega, &s21).ok_or(SymbolError::SingularZ(zmin))?;

    let s0_11_c = to_complex(&s0_bar_11);
    let nred = linalg::solve(&s0_11_c, &s11.map(|x| complex(0.0, x)))
        .ok_or(SymbolError::SingularS0)?;
    let mred = linalg::solve(&s0_11_c, &to_complex(&(&s12 * &z_inv_s21)))
        .ok_or(SymbolError::SingularS0)?;

    Ok(FrequencySymbol {
        omega: omega.clone(),
        a_omega,
        b_omega,
        n_omega,
        m_omega,
        s21,
        s22,
        s12,
        z_omega,
        nred,
        mred,
        s0_bar,
        s0_bar_11,
        s0_bar_22,
        n1,
        n2,
    })
}

// ---------------------------------------------------------------------------
// Assumption D: normal form and strong ellipticity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AssumptionDOptions {
    /// Sample count on the xi-sphere for the ellipticity estimate.
    pub xi_samples: usize,
    /// Sample count on the lambda-sphere.
    pub lambda_samples: usize,
    /// Relative tolerance for symmetry/zero-block checks.
    pub structure_tol: f64,
    /// The estimated ellipticity constant must exceed this.
    pub c1_tol: f64,
}

impl Default for AssumptionDOptions {
    fn default() -> Self {
        Self { xi_samples: 32, lambda_samples: 32, structure_tol: 1e-10, c1_tol: 1e-10 }
    }
}

/// Symmetry failure of a convection matrix at a state.
#[derive(Debug, Clone)]
pub struct AsymmetryFailure {
    pub alpha: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone)]
pub struct SampleDReport {
    pub state: RVec,
    pub s0_symmetric: bool,
    pub s0_positive_definite: bool,
    pub s0_block_diagonal: bool,
    /// Convection matrices failing (D2), with their asymmetry magnitude.
    pub d2_failures: Vec<AsymmetryFailure>,
    pub y_block_form: bool,
    /// Sampled strong-ellipticity constant at this state.
    pub c1: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct AssumptionDReport {
    pub samples: Vec<SampleDReport>,
    /// Smallest sampled ellipticity constant over all states.
    pub c1_min: f64,
    pub pass: bool,
}

/// Check the normal-form structure (block-diagonal positive `S^0`, symmetric
/// `S^alpha`, block form of `Y` and strong ellipticity) at each sample state.
pub fn check_assumption_d(
    system: &SymbolicSystem,
    samples: &[RVec],
    opts: &AssumptionDOptions,
) -> Result<AssumptionDReport, SymbolError> {
    for (index, u) in samples.iter().enumerate() {
        if !system.in_domain(u) {
            return Err(SymbolError::DomainViolation { index });
        }
    }
    let (n1, n2) = (system.n1, system.n2);
    let xi_sphere = sphere::unit_sphere_with_axes(system.d, opts.xi_samples);
    let lambda_sphere = if n2 > 0 {
        sphere::unit_sphere_with_axes(n2, opts.lambda_samples)
    } else {
        Vec::new()
    };

    let mut reports = Vec::with_capacity(samples.len());
    let mut c1_min = f64::INFINITY;
    for u in samples {
        let s0 = system.s0_at(u);
        let scale0 = max_abs_real(&s0).max(1.0);
        let s0_symmetric = max_abs_real(&(&s0 - &s0.transpose())) <= opts.structure_tol * scale0;
        let s0_positive_definite = linalg::min_eig_hermitian(&to_complex(&s0)) > 0.0;
        let off_a = s0.view((0, n1), (n1, n2)).amax();
        let off_b = s0.view((n1, 0), (n2, n1)).amax();
        let s0_block_diagonal =
            (n1 == 0 || n2 == 0) || off_a.max(off_b) <= opts.structure_tol * scale0;

        let mut d2_failures = Vec::new();
        for a in 0..system.d {
            let sa = system.s_alpha_at(a, u);
            let mag = max_abs_real(&(&sa - &sa.transpose()));
            if mag > opts.structure_tol * max_abs_real(&sa).max(1.0) {
                d2_failures.push(AsymmetryFailure { alpha: a, magnitude: mag });
            }
        }

        let mut y_block_form = true;
        for a in 0..system.d {
            for b in 0..system.d {
                let yab = system.y_at(a, b, u);
                let scale = max_abs_real(&yab).max(1.0);
                let tl = yab.view((0, 0), (n1, n1)).amax();
                let tr = yab.view((0, n1), (n1, n2)).amax();
                let bl = yab.view((n1, 0), (n2, n1)).amax();
                if n1 > 0 && tl.max(tr).max(bl) > opts.structure_tol * scale {
                    y_block_form = false;
                }
            }
        }

        let mut c1 = f64::INFINITY;
        for xi in &xi_sphere {
            let z = system.z_symbol_at(u, xi);
            let zs = (&z + &z.transpose()).scale(0.5);
            for lam in &lambda_sphere {
                let v = (&zs * lam).dot(lam);
                if v < c1 {
                    c1 = v;
                }
            }
        }
        if n2 == 0 {
            c1 = f64::INFINITY;
        }

        let pass = s0_symmetric
            && s0_positive_definite
            && s0_block_diagonal
            && d2_failures.is_empty()
            && y_block_form
            && c1 > opts.c1_tol;
        c1_min = c1_min.min(c1);
        reports.push(SampleDReport {
            state: u.clone(),
            s0_symmetric,
            s0_positive_definite,
            s0_block_diagonal,
            d2_failures,
            y_block_form,
            c1,
            pass,
        });
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(AssumptionDReport { samples: reports, c1_min, pass })
}

// ---------------------------------------------------------------------------
// Assumption E: affineness/independence structure
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ProbeSpec {
    /// States at which the finite differences are taken.
    pub base_points: Vec<RVec>,
    /// Step is `rel_step * (|Uref| + 1)`.
    pub rel_step: f64,
    /// Threshold on first-derivative estimates for "independent of".
    pub tol_first: f64,
    /// Threshold on second-derivative estimates for "affine in".
    pub tol_second: f64,
}

impl ProbeSpec {
    /// Probe at the reference state plus small admissible axis perturbations.
    pub fn default_for(system: &SymbolicSystem) -> Self {
        let mut base_points = vec![system.uref.clone()];
        let h = 0.05 * (system.uref.norm() + 1.0);
        for i in 0..system.n() {
            for sign in [1.0, -1.0] {
                let mut u = system.uref.clone();
                u[i] += sign * h;
                if system.in_domain(&u) {
                    base_points.push(u);
                }
            }
        }
        Self { base_points, rel_step: 1e-5, tol_first: 1e-8, tol_second: 1e-4 }
    }
}

#[derive(Debug, Clone)]
pub struct AssumptionEReport {
    /// Literal `S^0_11 = Id` at every probe point.
    pub e1_s011_identity: bool,
    /// `S^0_11` is a state-independent scalar multiple of the identity
    /// (identity after a constant rescaling of the undiffused variable).
    pub e1_s011_constant_scalar: bool,
    /// The scalar in question, from the reference state.
    pub e1_s011_scale: f64,
    pub e1_s022_independent_u2: bool,
    pub e2_s11_affine_u2: bool,
    pub e2_s11_independent_u1: bool,
    pub e2_s21_independent_u2: bool,
    pub e2_s22_affine_u2: bool,
    pub e3_y_independent_u2: bool,
    pub e4_source_free: bool,
    /// Human-readable failure descriptions.
    pub failures: Vec<String>,
    pub pass: bool,
}

fn first_derivative_max(f: &dyn Fn(&RVec) -> RMat, u: &RVec, i: usize, h: f64) -> f64 {
    let mut up = u.clone();
    let mut dn = u.clone();
    up[i] += h;
    dn[i] -= h;
    max_abs_real(&(f(&up) - f(&dn))) / (2.0 * h)
}

fn second_derivative_max(f: &dyn Fn(&RVec) -> RMat, u: &RVec, i: usize, j: usize, h: f64) -> f64 {
    if i == j {
        let mut up = u.clone();
        let mut dn = u.clone();
        up[i] += h;
        dn[i] -= h;
        max_abs_real(&(f(&up) + f(&dn) - f(u).scale(2.0))) / (h * h)
    } else {
        let mut pp = u.clone();
        let mut pm = u.clone();
        let mut mp = u.clone();
        let mut mm = u.clone();
        pp[i] += h;
        pp[j] += h;
        pm[i] += h;
        pm[j] -= h;
        mp[i] -= h;
        mp[j] += h;
        mm[i] -= h;
        mm[j] -= h;
        max_abs_real(&(f(&pp) - f(&pm) - f(&mp) + f(&mm))) / (4.0 * h * h)
    }
}

/// Numerically probe the additional structure (identity/independence and
/// affineness in the diffused variables) that the critical-regularity theory
/// requires. The report lists every failing item; nothing errors.
pub fn check_assumption_e(system: &SymbolicSystem, probe: &ProbeSpec) -> AssumptionEReport {
    let (n1, n2) = (system.n1, system.n2);
    let n = n1 + n2;
    let h = probe.rel_step * (system.uref.norm() + 1.0);
    let u2_dirs: Vec<usize> = (n1..n).collect();
    let u1_dirs: Vec<usize> = (0..n1).collect();
    let points: Vec<&RVec> =
        probe.base_points.iter().filter(|u| system.in_domain(u)).collect();

    let mut failures: Vec<String> = Vec::new();

    // E1: S^0_11 block.
    let s011 = |u: &RVec| system.s0_at(u).view((0, 0), (n1, n1)).into_owned();
    let mut id_dev: f64 = 0.0;
    let mut const_dev: f64 = 0.0;
    for u in &points {
        let m = s011(u);
        let c = if n1 > 0 { m.trace() / n1 as f64 } else { 1.0 };
        id_dev = id_dev.max(max_abs_real(&(&m - RMat::identity(n1, n1))));
        const_dev = const_dev.max(max_abs_real(&(&m - RMat::identity(n1, n1).scale(c))));
    }
    let scale_ref = if n1 > 0 { s011(&system.uref).trace() / n1 as f64 } else { 1.0 };
    let mut scale_independent = true;
    for u in &points {
        for i in 0..n {
            if first_derivative_max(&s011, u, i, h) > probe.tol_first {
                scale_independent = false;
            }
        }
    }
    let e1_s011_identity = id_dev <= 1e-10;
    let e1_s011_constant_scalar = const_dev <= 1e-10 && scale_independent && scale_ref > 0.0;
    if !e1_s011_constant_scalar {
        failures.push(format!(
            "E1: S0_11 is not a constant multiple of the identity (deviation {const_dev:.3e})"
        ));
    }

    // E1: S^0_22 independent of U^2.
    let s022 = |u: &RVec| system.s0_at(u).view((n1, n1), (n2, n2)).into_owned();
    let mut e1_s022_independent_u2 = true;
    for u in &points {
        for &i in &u2_dirs {
            let d = first_derivative_max(&s022, u, i, h);
            if d > probe.tol_first {
                e1_s022_independent_u2 = false;
                failures.push(format!(
                    "E1: S0_22 depends on U2 component {} (derivative {d:.3e})",
                    i - n1
                ));
            }
        }
        if !e1_s022_independent_u2 {
            break;
        }
    }

    // E2 probes on the S^alpha blocks.
    let mut e2_s11_affine_u2 = true;
    let mut e2_s11_independent_u1 = true;
    let mut e2_s21_independent_u2 = true;
    let mut e2_s22_affine_u2 = true;
    for a in 0..system.d {
        let s11 = move |sys: &SymbolicSystem, u: &RVec| {
            sys.s_alpha_at(a, u).view((0, 0), (n1, n1)).into_owned()
        };
        let s21 = move |sys: &SymbolicSystem, u: &RVec| {
            sys.s_alpha_at(a, u).view((n1, 0), (n2, n1)).into_owned()
        };
        let s22 = move |sys: &SymbolicSystem, u: &RVec| {
            sys.s_alpha_at(a, u).view((n1, n1), (n2, n2)).into_owned()
        };
        let s11f = |u: &RVec| s11(system, u);
        let s21f = |u: &RVec| s21(system, u);
        let s22f = |u: &RVec| s22(system, u);
        for u in &points {
            for (pos, &i) in u2_dirs.iter().enumerate() {
                for &j in &u2_dirs[pos..] {
                    if second_derivative_max(&s11f, u, i, j, h) > probe.tol_second {
                        e2_s11_affine_u2 = false;
                    }
                    if second_derivative_max(&s22f, u, i, j, h) > probe.tol_second {
                        e2_s22_affine_u2 = false;
                    }
                }
                if first_derivative_max(&s21f, u, i, h) > probe.tol_first {
                    e2_s21_independent_u2 = false;
                }
            }
            for &i in &u1_dirs {
                if first_derivative_max(&s11f, u, i, h) > probe.tol_first {
                    e2_s11_independent_u1 = false;
                }
            }
        }
    }
    if !e2_s11_affine_u2 {
        failures.push("E2: some S11^alpha is not affine in U2".into());
    }
    if !e2_s11_independent_u1 {
        failures.push("E2: some S11^alpha depends on U1".into());
    }
    if !e2_s21_independent_u2 {
        failures.push("E2: some S21^alpha depends on U2".into());
    }
    if !e2_s22_affine_u2 {
        failures.push("E2: some S22^alpha is not affine in U2".into());
    }

    // E3: Y independent of U^2.
    let mut e3_y_independent_u2 = true;
    'outer: for a in 0..system.d {
        for b in 0..system.d {
            let yf = |u: &RVec| system.y_at(a, b, u);
            for u in &points {
                for &i in &u2_dirs {
                    if first_derivative_max(&yf, u, i, h) > probe.tol_first {
                        e3_y_independent_u2 = false;
                        failures.push(format!(
                            "E3: Y^{{{a},{b}}} depends on U2 component {}",
                            i - n1
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }

    let e4_source_free = system.source_free;
    if !e4_source_free {
        failures.push("E4: model declares a nonzero source term".into());
    }

    let pass = e1_s011_constant_scalar
        && e1_s022_independent_u2
        && e2_s11_affine_u2
        && e2_s11_independent_u1
        && e2_s21_independent_u2
        && e2_s22_affine_u2
        && e3_y_independent_u2
        && e4_source_free;

    AssumptionEReport {
        e1_s011_identity,
        e1_s011_constant_scalar,
        e1_s011_scale: scale_ref,
        e1_s022_independent_u2,
        e2_s11_affine_u2,
        e2_s11_independent_u1,
        e2_s21_independent_u2,
        e2_s22_affine_u2,
        e3_y_independent_u2,
        e4_source_free,
        failures,
        pass,
    }
}

/// Max of `|Re(A_omega eta . eta)|` over random unit eta; the convection
/// symbol must be skew-Hermitian so this should vanish.
pub fn skew_hermitian_defect(a: &CMat) -> f64 {
    linalg::max_abs(&linalg::hermitian_part(a))
}

/// Convenience: `A_omega` from a system at a direction without the full
/// symbol evaluation (used by property tests).
pub fn convection_symbol(system: &SymbolicSystem, omega: &RVec) -> CMat {
    let mut s = RMat::zeros(system.n(), system.n());
    for a in 0..system.d {
        s += system.s_alpha_at(a, &system.uref) * omega[a];
    }
    s.map(|x| C64::new(0.0, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn toy1d_symbols_by_hand() {
        let sys = zoo::make_toy1d();
        let omega = RVec::from_vec(vec![1.0]);
        let sym = evaluate_symbols(&sys, &omega).unwrap();
        // A = i [[0,1],[1,0]]
        assert!((sym.a_omega[(0, 1)] - complex(0.0, 1.0)).norm() < 1e-14);
        assert!((sym.a_omega[(1, 0)] - complex(0.0, 1.0)).norm() < 1e-14);
        assert!(sym.a_omega[(0, 0)].norm() < 1e-14);
        // B = diag(0, 1)
        assert!((sym.b_omega[(1, 1)] - 1.0).abs() < 1e-14);
        assert!(sym.b_omega[(0, 0)].abs() < 1e-14);
        // Z = 1, S21 = 1
        assert!((sym.z_omega[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((sym.s21[(0, 0)] - 1.0).abs() < 1e-14);
        // Reduced pair: M = 1, N = 0
        assert!((sym.mred[(0, 0)] - complex(1.0, 0.0)).norm() < 1e-14);
        assert!(sym.nred[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn b_symbol_top_left_block_vanishes() {
        for sys in [zoo::make_toy1d(), zoo::make_barotropic_ns_default(2), zoo::make_mhd_default()]
        {
            for omega in sphere::unit_sphere(sys.d, 16) {
                let sym = evaluate_symbols(&sys, &omega).unwrap();
                let tl = sym.b_omega.view((0, 0), (sys.n1, sys.n1)).amax();
                assert!(tl < 1e-14);
            }
        }
    }

    #[test]
    fn non_unit_direction_is_rejected() {
        let sys = zoo::make_toy1d();
        let omega = RVec::from_vec(vec![1.5]);
        assert!(matches!(
            evaluate_symbols(&sys, &omega),
            Err(SymbolError::NonUnitDirection(_))
        ));
    }

    #[test]
    fn assumption_d_toy1d_passes_with_unit_c1() {
        let sys = zoo::make_toy1d();
        let rep =
            check_assumption_d(&sys, &[sys.uref.clone()], &AssumptionDOptions::default()).unwrap();
        assert!(rep.pass);
        assert!((rep.c1_min - 1.0).abs() < 1e-12);
    }

    #[test]
    fn assumption_d_flags_asymmetric_convection() {
        let sys = zoo::make_toy1d();
        let bad = SymbolicSystem::new(
            1,
            1,
            1,
            sys.uref.clone(),
            Arc::new(|_: &RVec| RMat::identity(2, 2)),
            vec![Arc::new(|_: &RVec| RMat::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]))],
            vec![vec![Arc::new(|_: &RVec| {
                RMat::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0])
            })]],
            Arc::new(|_: &RVec| true),
            true,
        )
        .unwrap();
        let rep =
            check_assumption_d(&bad, &[bad.uref.clone()], &AssumptionDOptions::default()).unwrap();
        assert!(!rep.pass);
        let f = &rep.samples[0].d2_failures;
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].alpha, 0);
        assert!((f[0].magnitude - 1.0).abs() < 1e-12);
    }

    #[test]
    fn assumption_d_rejects_out_of_domain_samples() {
        let sys = zoo::make_mhd_default();
        let mut bad_state = sys.uref.clone();
        bad_state[0] = -1.0; // negative density
        let err = check_assumption_d(&sys, &[bad_state], &AssumptionDOptions::default());
        assert!(matches!(err, Err(SymbolError::DomainViolation { index: 0 })));
    }

    #[test]
    fn assumption_e_toy1d_constant_matrices_pass() {
        let sys = zoo::make_toy1d();
        let rep = check_assumption_e(&sys, &ProbeSpec::default_for(&sys));
        assert!(rep.pass, "failures: {:?}", rep.failures);
        assert!(rep.e1_s011_identity);
    }
}
