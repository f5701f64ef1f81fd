//! Concrete model systems: a minimal 1-D toy, barotropic compressible flow,
//! and full compressible MHD, all in the block-symmetrized normal form.

use crate::linalg::{RMat, RVec};
use crate::system::{MatrixFn, SymbolicSystem};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZooError {
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("Assumption G violation: {0}")]
    AssumptionGViolation(String),
    #[error("unknown model parameter `{0}`")]
    UnknownParameter(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error(transparent)]
    System(#[from] crate::system::SymbolError),
}

// ---------------------------------------------------------------------------
// Toy 1-D system
// ---------------------------------------------------------------------------

/// Minimal SK-holding instance: one conserved and one diffused component,
/// coupled by a symmetric off-diagonal convection.
pub fn make_toy1d() -> SymbolicSystem {
    make_toy1d_with_coupling(1.0)
}

/// Same structure with adjustable coupling; `coupling = 0` decouples the
/// blocks and breaks the SK condition at every direction.
pub fn make_toy1d_with_coupling(coupling: f64) -> SymbolicSystem {
    let s0: MatrixFn = Arc::new(|_: &RVec| RMat::identity(2, 2));
    let c = coupling;
    let s1: MatrixFn = Arc::new(move |_: &RVec| RMat::from_row_slice(2, 2, &[0.0, c, c, 0.0]));
    let y11: MatrixFn = Arc::new(|_: &RVec| RMat::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]));
    SymbolicSystem::new(
        1,
        1,
        1,
        RVec::zeros(2),
        s0,
        vec![s1],
        vec![vec![y11]],
        Arc::new(|_: &RVec| true),
        true,
    )
    .expect("toy1d construction is static")
}

/// Pure diffusion in every component (`n1 = 0`): heat system of size `n`.
pub fn make_pure_parabolic(d: usize, n: usize) -> SymbolicSystem {
    let nn = n;
    let s0: MatrixFn = Arc::new(move |_: &RVec| RMat::identity(nn, nn));
    let s_alpha: Vec<MatrixFn> =
        (0..d).map(|_| Arc::new(move |_: &RVec| RMat::zeros(nn, nn)) as MatrixFn).collect();
    let mut y: Vec<Vec<MatrixFn>> = Vec::new();
    for a in 0..d {
        let mut row: Vec<MatrixFn> = Vec::new();
        for b in 0..d {
            row.push(Arc::new(move |_: &RVec| {
                if a == b {
                    RMat::identity(nn, nn)
                } else {
                    RMat::zeros(nn, nn)
                }
            }) as MatrixFn);
        }
        y.push(row);
    }
    SymbolicSystem::new(d, 0, n, RVec::zeros(n), s0, s_alpha, y, Arc::new(|_: &RVec| true), true)
        .expect("parabolic construction is static")
}

// ---------------------------------------------------------------------------
// Barotropic compressible flow
// ---------------------------------------------------------------------------

/// Barotropic pressure law with its derivative.
#[derive(Clone)]
pub struct PressureLaw {
    pub p: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub dp: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl PressureLaw {
    /// `p(rho) = k rho^gamma`.
    pub fn power(k: f64, gamma: f64) -> Self {
        Self {
            p: Arc::new(move |r| k * r.powf(gamma)),
            dp: Arc::new(move |r| k * gamma * r.powf(gamma - 1.0)),
        }
    }
}

/// Symmetrized barotropic system in the variables (density, velocity):
/// `n1 = 1`, `n2 = d`. Obtained from the MHD display by dropping the
/// temperature and magnetic rows and columns.
pub fn make_barotropic_ns(
    d: usize,
    mu: f64,
    lambda: f64,
    pressure: PressureLaw,
    rho_ref: f64,
) -> Result<SymbolicSystem, ZooError> {
    let nu = 2.0 * mu + lambda;
    if rho_ref <= 0.0 {
        return Err(ZooError::ParameterViolation(format!("rho_ref = {rho_ref} must be positive")));
    }
    if mu <= 0.0 {
        return Err(ZooError::ParameterViolation(format!("mu = {mu} must be positive")));
    }
    if nu <= 0.0 {
        return Err(ZooError::ParameterViolation(format!(
            "nu = 2 mu + lambda = {nu} must be positive"
        )));
    }
    let dp_ref = (pressure.dp)(rho_ref);
    if dp_ref <= 0.0 {
        return Err(ZooError::ParameterViolation(format!(
            "p'(rho_ref) = {dp_ref} must be positive"
        )));
    }

    let n = 1 + d;
    let dp = pressure.dp.clone();
    let s0: MatrixFn = Arc::new(move |u: &RVec| {
        let rho = u[0];
        let mut m = RMat::identity(n, n).scale(rho);
        m[(0, 0)] = dp(rho) / rho;
        m
    });

    let dp2 = pressure.dp.clone();
    let s_alpha: Vec<MatrixFn> = (0..d)
        .map(|a| {
            let dp = dp2.clone();
            Arc::new(move |u: &RVec| {
                let rho = u[0];
                let ua = u[1 + a];
                let prho = dp(rho);
                let mut m = RMat::zeros(n, n);
                m[(0, 0)] = prho / rho * ua;
                for i in 0..d {
                    m[(0, 1 + i)] = if i == a { prho } else { 0.0 };
                    m[(1 + i, 0)] = m[(0, 1 + i)];
                    m[(1 + i, 1 + i)] = rho * ua;
                }
                m
            }) as MatrixFn
        })
        .collect();

    let mut y: Vec<Vec<MatrixFn>> = Vec::new();
    for a in 0..d {
        let mut row: Vec<MatrixFn> = Vec::new();
        for b in 0..d {
            row.push(Arc::new(move |_: &RVec| {
                let mut m = RMat::zeros(n, n);
                for i in 0..d {
                    for j in 0..d {
                        let mut v = 0.0;
                        if a == b && i == j {
                            v += mu;
                        }
                        // symmetrized split of (mu + lambda) xi (x) xi
                        if i == a && j == b {
                            v += 0.5 * (mu + lambda);
                        }
                        if i == b && j == a {
                            v += 0.5 * (mu + lambda);
                        }
                        m[(1 + i, 1 + j)] = v;
                    }
                }
                m
            }) as MatrixFn);
        }
        y.push(row);
    }

    let mut uref = RVec::zeros(n);
    uref[0] = rho_ref;
    Ok(SymbolicSystem::new(
        d,
        1,
        d,
        uref,
        s0,
        s_alpha,
        y,
        Arc::new(|u: &RVec| u[0] > 0.0),
        true,
    )?)
}

/// The default barotropic instance used throughout the tests:
/// `p(rho) = rho^2`, `mu = 1`, `lambda = 0`, reference density 1.
pub fn make_barotropic_ns_default(d: usize) -> SymbolicSystem {
    make_barotropic_ns(d, 1.0, 0.0, PressureLaw::power(1.0, 2.0), 1.0)
        .expect("default parameters are admissible")
}

// ---------------------------------------------------------------------------
// Compressible MHD
// ---------------------------------------------------------------------------

type Coeff2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Thermodynamic closure `p(rho, theta)`, `e(rho, theta)` with the partial
/// derivatives the symbol matrices need.
#[derive(Clone)]
pub struct ThermoLaw {
    pub p: Coeff2,
    pub p_rho: Coeff2,
    pub p_theta: Coeff2,
    pub e_theta: Coeff2,
}

impl ThermoLaw {
    /// Ideal gas: `p = rho theta`, `e = theta`.
    pub fn ideal_gas() -> Self {
        Self {
            p: Arc::new(|r, t| r * t),
            p_rho: Arc::new(|_, t| t),
            p_theta: Arc::new(|r, _| r),
            e_theta: Arc::new(|_, _| 1.0),
        }
    }
}

/// Transport coefficients of the MHD system; all may depend on
/// `(rho, theta)` except the magnetic permeability.
#[derive(Clone)]
pub struct TransportCoeffs {
    pub mu: Coeff2,
    pub lambda: Coeff2,
    pub heat_k: Coeff2,
    pub sigma: Coeff2,
    pub mu0: f64,
}

impl TransportCoeffs {
    pub fn constant(mu: f64, lambda: f64, heat_k: f64, sigma: f64, mu0: f64) -> Self {
        Self {
            mu: Arc::new(move |_, _| mu),
            lambda: Arc::new(move |_, _| lambda),
            heat_k: Arc::new(move |_, _| heat_k),
            sigma: Arc::new(move |_, _| sigma),
            mu0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssumptionGReport {
    /// (1) `p_rho > 0` and `e_theta > 0` at every sample.
    pub thermodynamics_ok: bool,
    /// (2) `mu > 0`, `nu = 2 mu + lambda > 0`, `k > 0`.
    pub viscosity_ok: bool,
    /// (3) `sigma > 0`.
    pub conductivity_ok: bool,
    pub failures: Vec<String>,
    pub pass: bool,
}

/// Evaluate the three Assumption-G inequality groups at `(rho, theta)`
/// samples.
pub fn check_assumption_g(
    thermo: &ThermoLaw,
    transport: &TransportCoeffs,
    samples: &[(f64, f64)],
) -> AssumptionGReport {
    let mut failures = Vec::new();
    let mut thermodynamics_ok = true;
    let mut viscosity_ok = true;
    let mut conductivity_ok = true;
    for &(r, t) in samples {
        let prho = (thermo.p_rho)(r, t);
        let eth = (thermo.e_theta)(r, t);
        if prho <= 0.0 {
            thermodynamics_ok = false;
            failures.push(format!("p_rho({r}, {t}) = {prho} <= 0"));
        }
        if eth <= 0.0 {
            thermodynamics_ok = false;
            failures.push(format!("e_theta({r}, {t}) = {eth} <= 0"));
        }
        let mu = (transport.mu)(r, t);
        let nu = 2.0 * mu + (transport.lambda)(r, t);
        let k = (transport.heat_k)(r, t);
        if mu <= 0.0 {
            viscosity_ok = false;
            failures.push(format!("mu({r}, {t}) = {mu} <= 0"));
        }
        if nu <= 0.0 {
            viscosity_ok = false;
            failures.push(format!("nu({r}, {t}) = {nu} <= 0"));
        }
        if k <= 0.0 {
            viscosity_ok = false;
            failures.push(format!("k({r}, {t}) = {k} <= 0"));
        }
        let sigma = (transport.sigma)(r, t);
        if sigma <= 0.0 {
            conductivity_ok = false;
            failures.push(format!("sigma({r}, {t}) = {sigma} <= 0"));
        }
    }
    let pass = thermodynamics_ok && viscosity_ok && conductivity_ok;
    AssumptionGReport { thermodynamics_ok, viscosity_ok, conductivity_ok, failures, pass }
}

/// Full compressible MHD in the state `U = (rho, u, theta, B)`, `d = 3`,
/// `n = 8`, with only the density undiffused (`n1 = 1`).
pub fn make_mhd(
    thermo: ThermoLaw,
    transport: TransportCoeffs,
    state_ref: RVec,
) -> Result<SymbolicSystem, ZooError> {
    assert_eq!(state_ref.len(), 8, "MHD state is (rho, u, theta, B)");
    let (r0, t0) = (state_ref[0], state_ref[4]);
    if r0 <= 0.0 || t0 <= 0.0 {
        return Err(ZooError::ParameterViolation(format!(
            "reference state needs rho > 0 and theta > 0, got ({r0}, {t0})"
        )));
    }
    if transport.mu0 <= 0.0 {
        return Err(ZooError::ParameterViolation("mu0 must be positive".into()));
    }
    let g = check_assumption_g(&thermo, &transport, &[(r0, t0)]);
    if !g.pass {
        return Err(ZooError::AssumptionGViolation(g.failures.join("; ")));
    }

    let mu0 = transport.mu0;
    let th = thermo.clone();
    let tr = transport.clone();
    let s0: MatrixFn = Arc::new(move |u: &RVec| {
        let (r, t) = (u[0], u[4]);
        let mut m = RMat::zeros(8, 8);
        m[(0, 0)] = (th.p_rho)(r, t) / r;
        for i in 0..3 {
            m[(1 + i, 1 + i)] = r;
        }
        m[(4, 4)] = r * (th.e_theta)(r, t) / t;
        for i in 0..3 {
            m[(5 + i, 5 + i)] = 1.0 / mu0;
        }
        let _ = &tr; // transport does not enter S^0
        m
    });

    let s_alpha: Vec<MatrixFn> = (0..3)
        .map(|a| {
            let th = thermo.clone();
            Arc::new(move |u: &RVec| {
                let (r, t) = (u[0], u[4]);
                let vel = [u[1], u[2], u[3]];
                let b = [u[5], u[6], u[7]];
                let prho = (th.p_rho)(r, t);
                let pth = (th.p_theta)(r, t);
                let eth = (th.e_theta)(r, t);
                let ua = vel[a];
                let mut m = RMat::zeros(8, 8);
                m[(0, 0)] = prho / r * ua;
                for i in 0..3 {
                    let d_ia = if i == a { 1.0 } else { 0.0 };
                    m[(0, 1 + i)] = prho * d_ia;
                    m[(1 + i, 0)] = prho * d_ia;
                    m[(4, 1 + i)] = pth * d_ia;
                    m[(1 + i, 4)] = pth * d_ia;
                    for j in 0..3 {
                        let d_ij = if i == j { 1.0 } else { 0.0 };
                        m[(1 + i, 1 + j)] = r * ua * d_ij;
                        // coupling (xi (x) B - (B . xi) I) between u and B
                        let c = (d_ia * b[j] - b[a] * d_ij) / mu0;
                        m[(1 + i, 5 + j)] = c;
                        m[(5 + j, 1 + i)] = c;
                        m[(5 + i, 5 + j)] = ua / mu0 * d_ij;
                    }
                }
                m[(4, 4)] = r * eth / t * ua;
                m
            }) as MatrixFn
        })
        .collect();

    let mut y: Vec<Vec<MatrixFn>> = Vec::new();
    for a in 0..3 {
        let mut row: Vec<MatrixFn> = Vec::new();
        for b in 0..3 {
            let tr = transport.clone();
            row.push(Arc::new(move |u: &RVec| {
                let (r, t) = (u[0], u[4]);
                let mu = (tr.mu)(r, t);
                let lam = (tr.lambda)(r, t);
                let k = (tr.heat_k)(r, t);
                let sigma = (tr.sigma)(r, t);
                let mu0 = tr.mu0;
                let d_ab = if a == b { 1.0 } else { 0.0 };
                let mut m = RMat::zeros(8, 8);
                for i in 0..3 {
                    for j in 0..3 {
                        let mut v = if i == j { mu * d_ab } else { 0.0 };
                        if i == a && j == b {
                            v += 0.5 * (mu + lam);
                        }
                        if i == b && j == a {
                            v += 0.5 * (mu + lam);
                        }
                        m[(1 + i, 1 + j)] = v;
                    }
                }
                m[(4, 4)] = k / t * d_ab;
                for i in 0..3 {
                    m[(5 + i, 5 + i)] = d_ab / (mu0 * mu0 * sigma);
                }
                m
            }) as MatrixFn);
        }
        y.push(row);
    }

    let sys = SymbolicSystem::new(
        3,
        1,
        7,
        state_ref,
        s0,
        s_alpha,
        y,
        Arc::new(|u: &RVec| u[0] > 0.0 && u[4] > 0.0),
        false,
    )?;
    Ok(sys.with_source_note(
        "quadratic source: viscous dissipation and Joule heating in the temperature \
         equation, conductivity-gradient terms in the induction equation; \
         not evolved by the linear toolkit",
    ))
}

/// Ideal-gas MHD with unit transport coefficients at the reference state
/// `(rho, u, theta, B) = (1, 0, 1, e1)`.
pub fn make_mhd_default() -> SymbolicSystem {
    let uref = RVec::from_vec(vec![1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
    make_mhd(
        ThermoLaw::ideal_gas(),
        TransportCoeffs::constant(1.0, 1.0, 1.0, 1.0, 1.0),
        uref,
    )
    .expect("default parameters satisfy Assumption G")
}

// ---------------------------------------------------------------------------
// Registry and state sampling
// ---------------------------------------------------------------------------

/// Keys accepted by [`build_model`].
pub fn registered_models() -> &'static [&'static str] {
    &["toy1d", "ns-baro", "mhd"]
}

fn take(params: &mut BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.remove(key).unwrap_or(default)
}

/// Build a registered model from flat numeric parameters (the CLI config
/// surface). Unknown keys are rejected so that typos fail loudly.
pub fn build_model(key: &str, params: &BTreeMap<String, f64>) -> Result<SymbolicSystem, ZooError> {
    let mut p = params.clone();
    let sys = match key {
        "toy1d" => make_toy1d_with_coupling(take(&mut p, "coupling", 1.0)),
        "ns-baro" => {
            let d = take(&mut p, "dim", 2.0) as usize;
            let mu = take(&mut p, "mu", 1.0);
            let lambda = take(&mut p, "lambda", 0.0);
            let k = take(&mut p, "pressure_k", 1.0);
            let gamma = take(&mut p, "gamma", 2.0);
            let rho_ref = take(&mut p, "rho_ref", 1.0);
            make_barotropic_ns(d, mu, lambda, PressureLaw::power(k, gamma), rho_ref)?
        }
        "mhd" => {
            let mu = take(&mut p, "mu", 1.0);
            let lambda = take(&mut p, "lambda", 1.0);
            let heat_k = take(&mut p, "k", 1.0);
            let sigma = take(&mut p, "sigma", 1.0);
            let mu0 = take(&mut p, "mu0", 1.0);
            let rho_ref = take(&mut p, "rho_ref", 1.0);
            let theta_ref = take(&mut p, "theta_ref", 1.0);
            let b1 = take(&mut p, "b1", 1.0);
            let b2 = take(&mut p, "b2", 0.0);
            let b3 = take(&mut p, "b3", 0.0);
            let uref = RVec::from_vec(vec![rho_ref, 0.0, 0.0, 0.0, theta_ref, b1, b2, b3]);
            make_mhd(ThermoLaw::ideal_gas(), TransportCoeffs::constant(mu, lambda, heat_k, sigma, mu0), uref)?
        }
        other => return Err(ZooError::UnknownModel(other.to_string())),
    };
    if let Some(k) = p.keys().next() {
        return Err(ZooError::UnknownParameter(k.clone()));
    }
    Ok(sys)
}

/// Tensor grid of admissible states around the reference: three points per
/// coordinate at relative offset `rel` (absolute for near-zero coordinates).
pub fn state_grid(system: &SymbolicSystem, rel: f64, points_per_coord: usize) -> Vec<RVec> {
    let n = system.n();
    let offsets: Vec<f64> = match points_per_coord {
        1 => vec![0.0],
        2 => vec![-1.0, 1.0],
        _ => vec![-1.0, 0.0, 1.0],
    };
    let mut states = vec![system.uref.clone()];
    for i in 0..n {
        let step = rel * system.uref[i].abs().max(1.0);
        let mut next = Vec::with_capacity(states.len() * offsets.len());
        for s in &states {
            for &o in &offsets {
                let mut u = s.clone();
                u[i] += o * step;
                next.push(u);
            }
        }
        states = next;
    }
    states.retain(|u| system.in_domain(u));
    states
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_complex;
    use crate::system::evaluate_symbols;

    #[test]
    fn mhd_z_blocks_along_b() {
        // omega = (1,0,0): velocity block mu I + (mu+lambda) e1 e1^T,
        // temperature k/theta, magnetic (mu0^2 sigma)^{-1} I.
        let sys = make_mhd_default();
        let omega = RVec::from_vec(vec![1.0, 0.0, 0.0]);
        let sym = evaluate_symbols(&sys, &omega).unwrap();
        let z = &sym.z_omega;
        let mut expect = RMat::zeros(7, 7);
        for i in 0..3 {
            expect[(i, i)] = 1.0;
        }
        expect[(0, 0)] += 2.0; // mu + lambda = 2 along e1
        expect[(3, 3)] = 1.0; // k / theta
        for i in 0..3 {
            expect[(4 + i, 4 + i)] = 1.0; // 1/(mu0^2 sigma)
        }
        assert!((z - expect).amax() < 1e-14);
        // off-diagonal blocks vanish
        for i in 0..3 {
            for j in 3..7 {
                assert!(z[(i, j)].abs() < 1e-14);
                assert!(z[(j, i)].abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mhd_magnetic_coupling_block() {
        // B = e1, omega = e2: the (u, B) block is mu0^{-1} omega (x) B.
        let sys = make_mhd_default();
        let uref = sys.uref.clone();
        let omega = [0.0, 1.0, 0.0];
        let mut block = RMat::zeros(3, 3);
        for a in 0..3 {
            let sa = sys.s_alpha_at(a, &uref);
            block += sa.view((1, 5), (3, 3)) * omega[a];
        }
        let mut expect = RMat::zeros(3, 3);
        expect[(1, 0)] = 1.0; // (omega (x) B)_{21}
        assert!((block - expect).amax() < 1e-14);
    }

    #[test]
    fn mhd_requires_positive_heat_conduction() {
        let uref = RVec::from_vec(vec![1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let err = make_mhd(
            ThermoLaw::ideal_gas(),
            TransportCoeffs::constant(1.0, 1.0, 0.0, 1.0, 1.0),
            uref,
        );
        assert!(matches!(err, Err(ZooError::AssumptionGViolation(_))));
    }

    #[test]
    fn ns_rejects_nonpositive_nu() {
        let err = make_barotropic_ns(2, 1.0, -3.0, PressureLaw::power(1.0, 2.0), 1.0);
        assert!(matches!(err, Err(ZooError::ParameterViolation(_))));
    }

    #[test]
    fn ns_viscous_symbol_spectrum() {
        // Z(omega) eigenvalues are {mu (d-1 fold), 2 mu + lambda}.
        let (mu, lambda) = (0.7, 0.4);
        let sys = make_barotropic_ns(3, mu, lambda, PressureLaw::power(1.0, 2.0), 1.0).unwrap();
        let omega = RVec::from_vec(vec![0.6, 0.0, 0.8]);
        let sym = evaluate_symbols(&sys, &omega).unwrap();
        let mut ev = crate::linalg::hermitian_eigenvalues(&to_complex(&sym.z_omega));
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - mu).abs() < 1e-12);
        assert!((ev[1] - mu).abs() < 1e-12);
        assert!((ev[2] - (2.0 * mu + lambda)).abs() < 1e-12);
    }

    #[test]
    fn ns_is_the_mhd_reduction() {
        // Deleting theta and B rows/columns of the MHD matrices (with the
        // theta and B dependence frozen at the reference) reproduces the
        // barotropic matrices entrywise.
        let mhd = make_mhd_default();
        let ns = make_barotropic_ns(3, 1.0, 1.0, PressureLaw::power(1.0, 1.0), 1.0).unwrap();
        let keep = [0usize, 1, 2, 3];
        let mut u_ns = RVec::zeros(4);
        u_ns[0] = 1.2;
        u_ns[1] = 0.3;
        u_ns[2] = -0.1;
        u_ns[3] = 0.05;
        let mut u_mhd = mhd.uref.clone();
        for (i, &k) in keep.iter().enumerate() {
            u_mhd[k] = u_ns[i];
        }
        let pick = |m: &RMat| {
            RMat::from_fn(4, 4, |i, j| m[(keep[i], keep[j])])
        };
        assert!((pick(&mhd.s0_at(&u_mhd)) - ns.s0_at(&u_ns)).amax() < 1e-12);
        for a in 0..3 {
            assert!((pick(&mhd.s_alpha_at(a, &u_mhd)) - ns.s_alpha_at(a, &u_ns)).amax() < 1e-12);
            for b in 0..3 {
                assert!((pick(&mhd.y_at(a, b, &u_mhd)) - ns.y_at(a, b, &u_ns)).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn assumption_g_report_items() {
        let thermo = ThermoLaw::ideal_gas();
        let ok = check_assumption_g(
            &thermo,
            &TransportCoeffs::constant(1.0, 1.0, 1.0, 1.0, 1.0),
            &[(1.0, 1.0), (0.9, 1.1)],
        );
        assert!(ok.pass);
        // constant pressure: p_rho = 0 fails item (1)
        let flat = ThermoLaw {
            p: Arc::new(|_, _| 1.0),
            p_rho: Arc::new(|_, _| 0.0),
            p_theta: Arc::new(|_, _| 0.0),
            e_theta: Arc::new(|_, _| 1.0),
        };
        let bad = check_assumption_g(
            &flat,
            &TransportCoeffs::constant(1.0, 1.0, 1.0, 1.0, 1.0),
            &[(1.0, 1.0)],
        );
        assert!(!bad.thermodynamics_ok && !bad.pass);
        // temperature-dependent conductivity stays positive for theta > 0
        let sigma_theta = TransportCoeffs {
            mu: Arc::new(|_, _| 1.0),
            lambda: Arc::new(|_, _| 1.0),
            heat_k: Arc::new(|_, _| 1.0),
            sigma: Arc::new(|_, t| t),
            mu0: 1.0,
        };
        let rep = check_assumption_g(&thermo, &sigma_theta, &[(1.0, 0.5), (1.0, 2.0)]);
        assert!(rep.conductivity_ok);
    }

    #[test]
    fn registry_rejects_unknown_keys() {
        let mut params = BTreeMap::new();
        assert!(matches!(build_model("nope", &params), Err(ZooError::UnknownModel(_))));
        params.insert("typo".into(), 1.0);
        assert!(matches!(build_model("toy1d", &params), Err(ZooError::UnknownParameter(_))));
    }

    #[test]
    fn state_grid_respects_domain() {
        let sys = make_mhd_default();
        let grid = state_grid(&sys, 0.1, 3);
        assert!(!grid.is_empty());
        assert!(grid.iter().all(|u| u[0] > 0.0 && u[4] > 0.0));
    }
}
