//! Frequency-wise hypocoercive Lyapunov functionals.
//!
//! For a mode family `S v' + (rho^a A + rho^b B) v = 0` with skew-Hermitian
//! `A` and Hermitian nonnegative `B`, the functional
//!
//! ```text
//! L(v) = S v . v + min(1/(kappa rho^{a-b}), kappa rho^{a-b}) * I(v),
//! I(v) = sum_{k>=1} eps_k Re( MN^{k-1} v . M N^k v ),   M = kappa S^{-1} B
//! ```
//!
//! is equivalent to `|v|^2` and decays at rate `min(rho^b/kappa,
//! kappa rho^{2a-b})` once the weights `eps` are small enough and the
//! Shizuta-Kawashima condition holds. This module selects such weights by
//! shrinking a geometric ansatz until the derivative inequalities hold as
//! matrix inequalities on a `rho` grid, and certifies the constants.

use crate::linalg::{self, to_complex, CMat, CVec};
use crate::sk;
use crate::sphere;
use crate::system::{evaluate_symbols, FrequencySymbol, SymbolicSystem, SymbolError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LyapunovError {
    #[error("the SK condition fails for this pair; no Lyapunov functional exists")]
    SkFails,
    #[error("no feasible epsilon weights found (last violation at rho = {rho})")]
    NoFeasibleEpsilons { rho: f64 },
    #[error("rho must be positive, got {0}")]
    NonPositiveRho(f64),
    #[error("rho grid must span at least {want} decades with several points")]
    InsufficientGrid { want: u32 },
    #[error("eigenvalue computation failed")]
    EigenFailure,
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Sk(#[from] sk::SkError),
}

/// Certified Lyapunov data for one dissipative pair.
#[derive(Debug, Clone)]
pub struct LyapunovParams {
    /// Order of the skew-Hermitian multiplier (1 for the systems here).
    pub a: i32,
    /// Order of the diffusive multiplier: 2 for the full system, 0 for the
    /// reduced equation on the undiffused block.
    pub b: i32,
    /// Positivity scale of the diffusion symbol.
    pub kappa: f64,
    /// Geometric weights `eps_0, ..., eps_{n-1}`.
    pub epsilons: Vec<f64>,
    /// `H` eigenvalues stay within `[1/C, C]` on the certification grid.
    pub equivalence_c: f64,
    /// Certified dissipation constant `c` of the derivative inequality.
    pub dissipation_c: f64,
}

impl LyapunovParams {
    /// Weights entering the cross-term functional (`eps_1, ...`).
    pub fn cross_epsilons(&self) -> &[f64] {
        if self.epsilons.len() <= 1 {
            &[]
        } else {
            &self.epsilons[1..]
        }
    }
}

/// The `(S, A, B)` data of one mode family at a fixed direction.
#[derive(Debug, Clone)]
pub struct DissipativePair {
    /// Hermitian positive definite weight.
    pub s: CMat,
    /// Skew-Hermitian convection symbol (degree `a`).
    pub a_sym: CMat,
    /// Hermitian nonnegative diffusion symbol (degree `b`).
    pub b_sym: CMat,
}

impl DissipativePair {
    /// Full-system pair `(S^0, A_omega, B_omega)`.
    pub fn full(sym: &FrequencySymbol) -> Self {
        Self {
            s: to_complex(&sym.s0_bar),
            a_sym: sym.a_omega.clone(),
            b_sym: to_complex(&sym.b_omega),
        }
    }

    /// Reduced pair on the undiffused block:
    /// `(S^0_11, i S11(omega), S12 Z^{-1} S21)`, degree 0 diffusion.
    pub fn reduced(sym: &FrequencySymbol) -> Self {
        let s011 = to_complex(&sym.s0_bar_11);
        let a_red = &s011 * &sym.nred; // undoes the S^{-1} in nred
        let b_red = &s011 * &sym.mred;
        Self { s: s011, a_sym: a_red, b_sym: b_red }
    }

    pub fn for_order(sym: &FrequencySymbol, b: i32) -> Self {
        if b == 0 {
            Self::reduced(sym)
        } else {
            Self::full(sym)
        }
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// `N = S^{-1} A`.
    pub fn n_mat(&self) -> CMat {
        linalg::solve(&self.s, &self.a_sym).expect("S is positive definite")
    }

    /// Unscaled `M = S^{-1} B`.
    pub fn m_plain(&self) -> CMat {
        linalg::solve(&self.s, &self.b_sym).expect("S is positive definite")
    }

    /// Natural positivity scale: the largest `kappa` with
    /// `Re(B eta . eta) >= kappa |B eta|^2`, i.e. `1/lambda_max(B)`.
    pub fn natural_kappa(&self) -> f64 {
        let lmax = linalg::max_eig_hermitian(&self.b_sym);
        if lmax > 0.0 {
            1.0 / lmax
        } else {
            1.0
        }
    }
}

/// Default certification grid: 61 log-spaced points on `[1e-3, 1e3]`.
pub fn default_rho_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 61)
}

pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Weight in front of the cross terms,
/// `min(1/(kappa rho^{a-b}), kappa rho^{a-b})`.
pub fn cross_weight(a: i32, b: i32, kappa: f64, rho: f64) -> f64 {
    let w = kappa * rho.powi(a - b);
    w.min(1.0 / w)
}

/// Coercivity envelope `min(rho^b / kappa, kappa rho^{2a-b})`.
pub fn rate_envelope(a: i32, b: i32, kappa: f64, rho: f64) -> f64 {
    (rho.powi(b) / kappa).min(kappa * rho.powi(2 * a - b))
}

/// Hermitian matrix `G` with `I(v) = v* G v` for the scaled pair
/// `(N, M) = (S^{-1}A, kappa S^{-1}B)`.
pub fn cross_term_matrix(n_mat: &CMat, m_scaled: &CMat, cross_eps: &[f64]) -> CMat {
    let n = n_mat.nrows();
    let mut g = CMat::zeros(n, n);
    let mut mk_prev = m_scaled.clone(); // M N^{k-1}
    for &eps in cross_eps {
        let mk = &mk_prev * n_mat; // M N^k
        let prod = mk.adjoint() * &mk_prev;
        g += linalg::hermitian_part(&prod).scale(eps);
        mk_prev = mk;
    }
    g
}

/// The Hermitian representation `H` of the functional at radius `rho`.
pub fn lyapunov_matrix(pair: &DissipativePair, params: &LyapunovParams, rho: f64) -> CMat {
    let n_mat = pair.n_mat();
    let m_scaled = pair.m_plain().scale(params.kappa);
    let g = cross_term_matrix(&n_mat, &m_scaled, params.cross_epsilons());
    &pair.s + g.scale(cross_weight(params.a, params.b, params.kappa, rho))
}

/// Evaluate the functional on a mode vector. The pair (full or reduced) is
/// chosen by `params.b`.
pub fn lyapunov_value(
    vhat: &CVec,
    rho: f64,
    sym: &FrequencySymbol,
    params: &LyapunovParams,
) -> Result<f64, LyapunovError> {
    if rho <= 0.0 {
        return Err(LyapunovError::NonPositiveRho(rho));
    }
    let pair = DissipativePair::for_order(sym, params.b);
    let h = lyapunov_matrix(&pair, params, rho);
    Ok(((&h * vhat).dotc(vhat)).re.max(0.0))
}

/// Generator of the mode flow for the pair: `K = rho^a N + rho^b S^{-1} B`.
pub fn mode_generator(pair: &DissipativePair, a: i32, b: i32, rho: f64) -> CMat {
    pair.n_mat().scale(rho.powi(a)) + pair.m_plain().scale(rho.powi(b))
}

/// Observed vs required dissipation rate of the functional at radius `rho`:
/// the smallest eigenvalue of `H K + K* H` over the largest of `H`, against
/// `c min(rho^b/kappa, kappa rho^{2a-b})`.
pub fn lyapunov_derivative_along_flow(
    rho: f64,
    sym: &FrequencySymbol,
    params: &LyapunovParams,
) -> (f64, f64) {
    let pair = DissipativePair::for_order(sym, params.b);
    derivative_rates(&pair, params, rho)
}

fn derivative_rates(pair: &DissipativePair, params: &LyapunovParams, rho: f64) -> (f64, f64) {
    let h = lyapunov_matrix(pair, params, rho);
    let k = mode_generator(pair, params.a, params.b, rho);
    let d = &h * &k + k.adjoint() * &h;
    let observed = linalg::min_eig_hermitian(&d) / linalg::max_eig_hermitian(&h).max(1e-300);
    let required = params.dissipation_c * rate_envelope(params.a, params.b, params.kappa, rho);
    (observed, required)
}

struct FeasibilityOutcome {
    /// Worst ratio of observed rate to envelope over the grid.
    c: f64,
    /// Equivalence constant over the grid.
    big_c: f64,
    /// First violating rho, when infeasible.
    violation: Option<f64>,
}

fn assess(
    pair: &DissipativePair,
    a: i32,
    b: i32,
    kappa: f64,
    rho_grid: &[f64],
    epsilons: &[f64],
) -> FeasibilityOutcome {
    let n_mat = pair.n_mat();
    let m_plain = pair.m_plain();
    let m_scaled = m_plain.scale(kappa);
    let cross = if epsilons.len() <= 1 { &[][..] } else { &epsilons[1..] };
    let g = cross_term_matrix(&n_mat, &m_scaled, cross);
    let eps0 = epsilons.first().copied().unwrap_or(1.0);

    // Pieces of the cross-term derivative inequality.
    let mut w_terms: Vec<CMat> = Vec::new();
    {
        let mut mk = m_scaled.clone();
        for _ in 0..cross.len() {
            mk = &mk * &n_mat;
            w_terms.push(mk.adjoint() * &mk);
        }
    }
    let mm = m_scaled.adjoint() * &m_scaled;

    let mut c = f64::INFINITY;
    let mut big_c: f64 = 1.0;
    for &rho in rho_grid {
        let w = cross_weight(a, b, kappa, rho);
        let h = &pair.s + g.scale(w);
        let h_min = linalg::min_eig_hermitian(&h);
        let h_max = linalg::max_eig_hermitian(&h);
        if h_min <= 0.0 {
            return FeasibilityOutcome { c: 0.0, big_c, violation: Some(rho) };
        }
        big_c = big_c.max(h_max).max(1.0 / h_min);

        let k = n_mat.scale(rho.powi(a)) + m_plain.scale(rho.powi(b));
        let d = &h * &k + k.adjoint() * &h;
        let d_min = linalg::min_eig_hermitian(&d);
        let envelope = rate_envelope(a, b, kappa, rho);
        let ratio = d_min / (envelope * h_max);
        if !(ratio > 1e-10) {
            return FeasibilityOutcome { c: 0.0, big_c, violation: Some(rho) };
        }
        c = c.min(ratio);

        // Cross-term family: d/dt I + (1/2) rho^a sum eps_k |M N^k v|^2
        // <= eps0 max(rho^a, rho^{2b-a}/kappa^2) |M v|^2, as matrices.
        if !cross.is_empty() {
            let gd = &g * &k + k.adjoint() * &g;
            let budget = eps0 * rho.powi(a).max(rho.powi(2 * b - a) / (kappa * kappa));
            let mut lhs = gd + mm.scale(budget);
            for (idx, wt) in w_terms.iter().enumerate() {
                lhs -= wt.scale(0.5 * rho.powi(a) * cross[idx]);
            }
            let scale = linalg::max_abs(&lhs).max(1.0);
            if linalg::min_eig_hermitian(&lhs) < -1e-10 * scale {
                return FeasibilityOutcome { c: 0.0, big_c, violation: Some(rho) };
            }
        }
    }
    FeasibilityOutcome { c, big_c, violation: None }
}

/// Select geometric weights `eps_k = eps0 delta^k` by shrinking `(eps0,
/// delta)` until both derivative inequality families hold at every grid
/// radius, then certify the constants `(c, C)`.
pub fn select_epsilons(
    sym: &FrequencySymbol,
    a: i32,
    b: i32,
    kappa: f64,
    rho_grid: &[f64],
) -> Result<LyapunovParams, LyapunovError> {
    let pair = DissipativePair::for_order(sym, b);
    select_epsilons_for_pair(&pair, a, b, kappa, rho_grid)
}

/// Same as [`select_epsilons`] on an explicit pair.
pub fn select_epsilons_for_pair(
    pair: &DissipativePair,
    a: i32,
    b: i32,
    kappa: f64,
    rho_grid: &[f64],
) -> Result<LyapunovParams, LyapunovError> {
    assert!(kappa > 0.0, "kappa must be positive");
    assert!(!rho_grid.is_empty(), "certification grid must not be empty");
    let n = pair.dim();
    let verdict = sk::kalman_rank_holds(&pair.n_mat(), &pair.m_plain(), None)?;
    if !verdict.holds {
        return Err(LyapunovError::SkFails);
    }

    let mut eps0 = 1.0f64;
    let mut delta = 0.5f64;
    let mut last_violation = rho_grid[0];
    for iter in 0..80 {
        let epsilons: Vec<f64> = (0..n.max(1)).map(|k| eps0 * delta.powi(k as i32)).collect();
        let out = assess(pair, a, b, kappa, rho_grid, &epsilons);
        match out.violation {
            None => {
                return Ok(LyapunovParams {
                    a,
                    b,
                    kappa,
                    epsilons,
                    equivalence_c: out.big_c,
                    dissipation_c: out.c,
                });
            }
            Some(rho) => last_violation = rho,
        }
        eps0 *= 0.5;
        if iter % 2 == 1 {
            delta *= 0.75;
        }
    }
    Err(LyapunovError::NoFeasibleEpsilons { rho: last_violation })
}

/// Certify one parameter set across sampled directions, intersecting the
/// constants. All directions share the weights selected at the first one;
/// if a later direction rejects them the selection restarts there and the
/// sweep re-validates everything.
pub fn certify_over_sphere(
    system: &SymbolicSystem,
    a: i32,
    b: i32,
    direction_count: usize,
    rho_grid: &[f64],
) -> Result<LyapunovParams, LyapunovError> {
    let dirs = sphere::unit_sphere(system.d, direction_count);
    let syms: Vec<FrequencySymbol> =
        dirs.iter().map(|w| evaluate_symbols(system, w)).collect::<Result<_, _>>()?;
    let pairs: Vec<DissipativePair> =
        syms.iter().map(|s| DissipativePair::for_order(s, b)).collect();
    let kappa =
        pairs.iter().map(DissipativePair::natural_kappa).fold(f64::INFINITY, f64::min);
    let mut params = select_epsilons_for_pair(&pairs[0], a, b, kappa, rho_grid)?;
    for pair in &pairs[1..] {
        let out = assess(pair, a, b, kappa, rho_grid, &params.epsilons);
        match out.violation {
            None => {
                params.dissipation_c = params.dissipation_c.min(out.c);
                params.equivalence_c = params.equivalence_c.max(out.big_c);
            }
            Some(_) => {
                params = select_epsilons_for_pair(pair, a, b, kappa, rho_grid)?;
                for p2 in &pairs {
                    let o2 = assess(p2, a, b, kappa, rho_grid, &params.epsilons);
                    if let Some(rho) = o2.violation {
                        return Err(LyapunovError::NoFeasibleEpsilons { rho });
                    }
                    params.dissipation_c = params.dissipation_c.min(o2.c);
                    params.equivalence_c = params.equivalence_c.max(o2.big_c);
                }
                return Ok(params);
            }
        }
    }
    Ok(params)
}

// ---------------------------------------------------------------------------
// Spectral decay rates
// ---------------------------------------------------------------------------

/// Smallest real part over the spectrum of `rho N_omega + rho^2 M_omega`;
/// strict dissipativity at this mode means a positive value.
pub fn spectral_decay_rate(
    system: &SymbolicSystem,
    omega: &crate::linalg::RVec,
    rho: f64,
) -> Result<f64, LyapunovError> {
    if rho <= 0.0 {
        return Err(LyapunovError::NonPositiveRho(rho));
    }
    let sym = evaluate_symbols(system, omega)?;
    spectral_decay_rate_of(&sym, rho)
}

pub fn spectral_decay_rate_of(sym: &FrequencySymbol, rho: f64) -> Result<f64, LyapunovError> {
    let k = sym.mode_generator(rho);
    let ev = linalg::eigenvalues(&k).map_err(|_| LyapunovError::EigenFailure)?;
    Ok(ev.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
}

/// Least-squares fit of `ln y` against `ln x`; returns (slope, intercept,
/// slope standard error).
pub(crate) fn loglog_fit(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let m = data.len();
    if m < 2 {
        return None;
    }
    let mx = data.iter().map(|p| p.0).sum::<f64>() / m as f64;
    let my = data.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let sxx: f64 = data.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = data.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = data.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = if m > 2 { (ss_res / (m - 2) as f64 / sxx).sqrt() } else { 0.0 };
    Some((slope, intercept, stderr))
}

#[derive(Debug, Clone)]
pub struct EnvelopeReport {
    /// Log-log slope of the rate on the low-frequency tail of the grid.
    pub low_slope: f64,
    pub low_stderr: f64,
    /// Log-log slope on the high-frequency tail.
    pub high_slope: f64,
    pub high_stderr: f64,
    /// Mean rate level on the high tail.
    pub plateau: f64,
    /// Radius where the low-frequency fit meets the plateau.
    pub crossover_rho: f64,
    /// The raw `(rho, rate)` sweep.
    pub rates: Vec<(f64, f64)>,
}

/// Sweep `spectral_decay_rate` over a log grid and fit the two asymptotic
/// slopes (parabolic at low frequency, plateau at high frequency for the
/// standard orders).
pub fn rate_envelope_fit(
    system: &SymbolicSystem,
    omega: &crate::linalg::RVec,
    rho_grid: &[f64],
) -> Result<EnvelopeReport, LyapunovError> {
    let mut grid: Vec<f64> = rho_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let spans_decades = grid.len() >= 8
        && grid.first().map(|&lo| lo > 0.0).unwrap_or(false)
        && grid.last().unwrap() / grid.first().unwrap() >= 1e4;
    if !spans_decades {
        return Err(LyapunovError::InsufficientGrid { want: 4 });
    }
    let sym = evaluate_symbols(system, omega)?;
    let mut rates = Vec::with_capacity(grid.len());
    for &rho in &grid {
        rates.push((rho, spectral_decay_rate_of(&sym, rho)?));
    }
    let lo_cut = grid[0] * 10.0;
    let hi_cut = grid[grid.len() - 1] / 10.0;
    let low: Vec<(f64, f64)> = rates.iter().copied().filter(|&(r, _)| r <= lo_cut).collect();
    let high: Vec<(f64, f64)> = rates.iter().copied().filter(|&(r, _)| r >= hi_cut).collect();
    let (low_slope, low_icept, low_stderr) =
        loglog_fit(&low).ok_or(LyapunovError::InsufficientGrid { want: 4 })?;
    let (high_slope, _, high_stderr) =
        loglog_fit(&high).ok_or(LyapunovError::InsufficientGrid { want: 4 })?;
    let plateau = high.iter().map(|p| p.1).sum::<f64>() / high.len() as f64;
    let crossover_rho = if low_slope.abs() > 1e-12 && plateau > 0.0 {
        ((plateau.ln() - low_icept) / low_slope).exp()
    } else {
        f64::NAN
    };
    Ok(EnvelopeReport {
        low_slope,
        low_stderr,
        high_slope,
        high_stderr,
        plateau,
        crossover_rho,
        rates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex, RVec};
    use crate::zoo;

    fn toy_sym() -> FrequencySymbol {
        let sys = zoo::make_toy1d();
        evaluate_symbols(&sys, &RVec::from_vec(vec![1.0])).unwrap()
    }

    #[test]
    fn toy_certification_succeeds() {
        let sym = toy_sym();
        let params = select_epsilons(&sym, 1, 2, 1.0, &default_rho_grid()).unwrap();
        assert!(params.dissipation_c > 0.0);
        assert!(params.equivalence_c >= 1.0);
        for &rho in &default_rho_grid() {
            let (obs, req) = lyapunov_derivative_along_flow(rho, &sym, &params);
            assert!(obs >= req, "rho = {rho}: {obs} < {req}");
        }
    }

    #[test]
    fn zero_damping_reports_sk_failure() {
        let sys = zoo::make_toy1d_with_coupling(0.0);
        let sym = evaluate_symbols(&sys, &RVec::from_vec(vec![1.0])).unwrap();
        let err = select_epsilons(&sym, 1, 2, 1.0, &default_rho_grid());
        assert!(matches!(err, Err(LyapunovError::SkFails)));
    }

    #[test]
    fn scalar_diffusive_mode_reduces_to_energy() {
        // n1 = 0, n = 1: no cross terms, L = S |v|^2.
        let sys = zoo::make_pure_parabolic(1, 1);
        let sym = evaluate_symbols(&sys, &RVec::from_vec(vec![1.0])).unwrap();
        let params = select_epsilons(&sym, 1, 2, 1.0, &default_rho_grid()).unwrap();
        assert!(params.cross_epsilons().is_empty());
        let v = CVec::from_vec(vec![complex(2.0, -1.0)]);
        let val = lyapunov_value(&v, 3.0, &sym, &params).unwrap();
        assert!((val - 5.0).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_value_literal_formula() {
        // Toy pair at rho = 1: L = |v|^2 + eps1 Re(M v . M N v).
        let sym = toy_sym();
        let params = select_epsilons(&sym, 1, 2, 1.0, &default_rho_grid()).unwrap();
        let eps1 = params.epsilons[1];
        let v = CVec::from_vec(vec![complex(0.4, 0.2), complex(-0.3, 0.9)]);
        let m = &sym.m_omega;
        let n = &sym.n_omega;
        let mv = m * &v;
        let mnv = m * (n * &v);
        let expect = v.norm_squared() + eps1 * mnv.dotc(&mv).re;
        let got = lyapunov_value(&v, 1.0, &sym, &params).unwrap();
        assert!((got - expect).abs() < 1e-12);
        assert_eq!(lyapunov_value(&CVec::zeros(2), 1.0, &sym, &params).unwrap(), 0.0);
        assert!(matches!(
            lyapunov_value(&v, 0.0, &sym, &params),
            Err(LyapunovError::NonPositiveRho(_))
        ));
    }

    #[test]
    fn equivalence_bounds_hold_on_random_vectors() {
        let sym = toy_sym();
        let params = select_epsilons(&sym, 1, 2, 1.0, &default_rho_grid()).unwrap();
        let c = params.equivalence_c;
        let mut state = 0x2468aceu64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for i in 0..1000 {
            let v = CVec::from_vec(vec![complex(next(), next()), complex(next(), next())]);
            if v.norm() < 1e-9 {
                continue;
            }
            let rho = 10f64.powf(-3.0 + 6.0 * (i % 61) as f64 / 60.0);
            let val = lyapunov_value(&v, rho, &sym, &params).unwrap();
            let n2 = v.norm_squared();
            assert!(val <= c * n2 * (1.0 + 1e-12));
            assert!(val >= n2 / c * (1.0 - 1e-12));
        }
    }

    #[test]
    fn low_frequency_observed_rate_is_parabolic() {
        // observed/rho^2 approaches a constant near 1/2 as rho -> 0.
        let sym = toy_sym();
        let params = select_epsilons(&sym, 1, 2, 1.0, &default_rho_grid()).unwrap();
        let (obs, _) = lyapunov_derivative_along_flow(1e-3, &sym, &params);
        let ratio = obs / 1e-6;
        assert!(ratio > 0.25 && ratio < 0.75, "observed/rho^2 = {ratio}");
    }

    #[test]
    fn reduced_pair_envelope_is_damped_at_high_frequency() {
        // b = 0: required rate proportional to min(1/kappa, kappa rho^2).
        let sym = toy_sym();
        let pair = DissipativePair::reduced(&sym);
        let kappa = pair.natural_kappa();
        let params = select_epsilons(&sym, 1, 0, kappa, &default_rho_grid()).unwrap();
        let lo = rate_envelope(1, 0, kappa, 1e-2);
        let hi = rate_envelope(1, 0, kappa, 1e2);
        assert!((lo - kappa * 1e-4).abs() < 1e-12);
        assert!((hi - 1.0 / kappa).abs() < 1e-12);
        for &rho in &[1e-2, 1.0, 1e2] {
            let (obs, req) = lyapunov_derivative_along_flow(rho, &sym, &params);
            assert!(obs >= req);
        }
    }

    #[test]
    fn halving_epsilons_preserves_certification() {
        let sym = toy_sym();
        let params = select_epsilons(&sym, 1, 2, 1.0, &default_rho_grid()).unwrap();
        let pair = DissipativePair::full(&sym);
        let halved: Vec<f64> = params.epsilons.iter().map(|e| e / 2.0).collect();
        let out = assess(&pair, 1, 2, 1.0, &default_rho_grid(), &halved);
        assert!(out.violation.is_none());
        assert!(out.c > 0.0);
    }

    #[test]
    fn toy_spot_decay_rates() {
        let sys = zoo::make_toy1d();
        let omega = RVec::from_vec(vec![1.0]);
        let r01 = spectral_decay_rate(&sys, &omega, 0.1).unwrap();
        let r1 = spectral_decay_rate(&sys, &omega, 1.0).unwrap();
        let r10 = spectral_decay_rate(&sys, &omega, 10.0).unwrap();
        assert!((r01 - 0.005).abs() < 1e-12);
        assert!((r1 - 0.5).abs() < 1e-12);
        // (100 - sqrt(9600)) / 2
        assert!((r10 - (100.0 - 9600f64.sqrt()) / 2.0).abs() < 1e-9);
        assert!((r10 - 1.0102).abs() < 1e-3);
    }

    #[test]
    fn toy_rate_envelope_slopes() {
        let sys = zoo::make_toy1d();
        let omega = RVec::from_vec(vec![1.0]);
        let rep = rate_envelope_fit(&sys, &omega, &default_rho_grid()).unwrap();
        assert!((rep.low_slope - 2.0).abs() < 0.05, "low slope {}", rep.low_slope);
        assert!((rep.plateau - 1.0).abs() < 0.05, "plateau {}", rep.plateau);
        assert!(rep.high_slope.abs() < 0.05);
        assert!(rep.crossover_rho > 0.1 && rep.crossover_rho < 10.0);
    }

    #[test]
    fn pure_parabolic_envelope_is_quadratic_everywhere() {
        let sys = zoo::make_pure_parabolic(2, 1);
        let omega = RVec::from_vec(vec![1.0, 0.0]);
        let rep = rate_envelope_fit(&sys, &omega, &default_rho_grid()).unwrap();
        assert!((rep.low_slope - 2.0).abs() < 1e-6);
        assert!((rep.high_slope - 2.0).abs() < 1e-6);
    }

    #[test]
    fn ns_envelope_low_slope_two_with_plateau() {
        let sys =
            zoo::make_barotropic_ns(2, 1.0, -1.0, zoo::PressureLaw::power(0.5, 2.0), 1.0).unwrap();
        let omega = RVec::from_vec(vec![1.0, 0.0]);
        let rep = rate_envelope_fit(&sys, &omega, &default_rho_grid()).unwrap();
        assert!((rep.low_slope - 2.0).abs() < 0.05);
        assert!(rep.plateau > 0.0);
        assert!(rep.high_slope.abs() < 0.05);
    }

    #[test]
    fn insufficient_grid_is_rejected() {
        let sys = zoo::make_toy1d();
        let omega = RVec::from_vec(vec![1.0]);
        let err = rate_envelope_fit(&sys, &omega, &[1.0]);
        assert!(matches!(err, Err(LyapunovError::InsufficientGrid { .. })));
    }
}
