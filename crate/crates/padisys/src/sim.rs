//! Exact per-mode evolution of the linearized system, the parabolic mode,
//! functional time series and decay-exponent fits, plus a small
//! pseudo-spectral nonlinear stepper for barotropic flow.

use crate::linalg::{self, complex, to_complex, C64, CMat, CVec, Propagator, RMat};
use crate::lp::{build_cutoffs, low_high_split, BesovSum, LpError, SpectralField};
use crate::lyapunov::{cross_term_matrix, cross_weight, DissipativePair, LyapunovParams};
use crate::system::{evaluate_symbols, FrequencySymbol, SymbolicSystem, SymbolError};
use crate::zoo::PressureLaw;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),
    #[error("CFL violation: dt = {dt:.3e} exceeds the stable step {limit:.3e}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("solution norm grew to {ratio:.2e} times the initial value at t = {time:.3e}")]
    BlowupDetected { time: f64, ratio: f64 },
    #[error("field/system mismatch: {0}")]
    FieldMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

// ---------------------------------------------------------------------------
// Per-mode symbol cache
// ---------------------------------------------------------------------------

struct ModeEntry {
    flat: usize,
    /// Flat index of the opposite wavevector (equal to `flat` for
    /// self-conjugate modes).
    opp: usize,
    rho: f64,
    prop: Propagator,
    prop_conj: Propagator,
    sym: FrequencySymbol,
    /// `Z(omega)^{-1} S21` and `Z(omega)^{-1} S22` for the parabolic mode.
    zinv_s21: RMat,
    zinv_s22: RMat,
}

/// Frozen symbol data for every canonical mode of a grid (one entry per
/// `{k, -k}` pair; the opposite mode uses conjugated data).
pub struct ModeTable {
    entries: Vec<ModeEntry>,
    n1: usize,
    n2: usize,
    s0_bar: RMat,
}

impl ModeTable {
    pub fn build(system: &SymbolicSystem, field: &SpectralField) -> Result<Self, SimError> {
        if field.n_comp != system.n() {
            return Err(SimError::FieldMismatch(format!(
                "field has {} components, system has {}",
                field.n_comp,
                system.n()
            )));
        }
        if field.d != system.d {
            return Err(SimError::FieldMismatch(format!(
                "field dimension {} vs system dimension {}",
                field.d, system.d
            )));
        }
        let m = field.modes();
        let canonical: Vec<usize> =
            (0..m).filter(|&flat| flat <= field.opposite_mode(flat) && field.rho(flat) > 0.0).collect();
        let entries: Result<Vec<ModeEntry>, SimError> = canonical
            .par_iter()
            .map(|&flat| {
                let k = field.wavevector(flat);
                let kn = (k.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt();
                let omega =
                    crate::linalg::RVec::from_iterator(field.d, k.iter().map(|&x| x as f64 / kn));
                let sym = evaluate_symbols(system, &omega)?;
                let rho = field.rho(flat);
                let gen = sym.mode_generator(rho);
                let prop = Propagator::new(&gen)
                    .map_err(|_| SimError::FieldMismatch("generator not square".into()))?;
                let prop_conj = prop.conjugated();
                let zinv_s21 = linalg::solve_real(&sym.z_omega, &sym.s21)
                    .ok_or(SymbolError::SingularZ(0.0))?;
                let zinv_s22 = linalg::solve_real(&sym.z_omega, &sym.s22)
                    .ok_or(SymbolError::SingularZ(0.0))?;
                Ok(ModeEntry {
                    flat,
                    opp: field.opposite_mode(flat),
                    rho,
                    prop,
                    prop_conj,
                    sym,
                    zinv_s21,
                    zinv_s22,
                })
            })
            .collect();
        Ok(Self {
            entries: entries?,
            n1: system.n1,
            n2: system.n2,
            s0_bar: system.s0_at(&system.uref),
        })
    }
}

fn gather(field: &SpectralField, flat: usize) -> CVec {
    CVec::from_iterator(field.n_comp, (0..field.n_comp).map(|c| field.coeff(c, flat)))
}

fn scatter(field: &mut SpectralField, flat: usize, v: &CVec) {
    for c in 0..field.n_comp {
        field.set_coeff(c, flat, v[c]);
    }
}

// ---------------------------------------------------------------------------
// Linear evolution
// ---------------------------------------------------------------------------

/// Evolve the linearized system exactly per mode:
/// `vhat(t, xi) = exp(-t (rho N + rho^2 M)) vhat0(xi)`; the zero mode is
/// constant in time.
pub fn evolve_linear(
    system: &SymbolicSystem,
    field0: &SpectralField,
    times: &[f64],
) -> Result<Vec<SpectralField>, SimError> {
    let table = ModeTable::build(system, field0)?;
    Ok(evolve_with_table(&table, field0, times))
}

/// Same as [`evolve_linear`] with a prebuilt mode table.
pub fn evolve_with_table(
    table: &ModeTable,
    field0: &SpectralField,
    times: &[f64],
) -> Vec<SpectralField> {
    times
        .iter()
        .map(|&t| {
            let mut out = field0.clone();
            let updates: Vec<(usize, CVec, Option<CVec>)> = table
                .entries
                .par_iter()
                .map(|e| {
                    let vt = e.prop.apply(t, &gather(field0, e.flat));
                    let vt_opp = if e.opp != e.flat {
                        Some(e.prop_conj.apply(t, &gather(field0, e.opp)))
                    } else {
                        None
                    };
                    (e.flat, vt, vt_opp)
                })
                .collect();
            for (flat, vt, vt_opp) in &updates {
                scatter(&mut out, *flat, vt);
                if let Some(v) = vt_opp {
                    scatter(&mut out, field0.opposite_mode(*flat), v);
                }
            }
            out
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Parabolic mode
// ---------------------------------------------------------------------------

fn w_hat_at(entry: &ModeEntry, n1: usize, n2: usize, v: &CVec) -> CVec {
    // W = i rho^{-1} Z^{-1} (S21 V1 + S22 V2) + V2
    let v1 = v.rows(0, n1).into_owned();
    let v2 = v.rows(n1, n2).into_owned();
    let p = to_complex(&entry.zinv_s21) * v1 + to_complex(&entry.zinv_s22) * &v2;
    p.scale(1.0 / entry.rho) * complex(0.0, 1.0) + v2
}

/// The parabolic mode `W`: the Fourier-multiplier combination of the state
/// that satisfies a purely parabolic equation. The multiplier part is set to
/// zero at the origin mode.
pub fn parabolic_mode_field(
    system: &SymbolicSystem,
    field: &SpectralField,
) -> Result<SpectralField, SimError> {
    let table = ModeTable::build(system, field)?;
    Ok(parabolic_mode_with_table(&table, field))
}

pub fn parabolic_mode_with_table(table: &ModeTable, field: &SpectralField) -> SpectralField {
    let (n1, n2) = (table.n1, table.n2);
    let mut out = SpectralField::zeros(field.d, n2, field.grid, field.box_length, field.real_data);
    // zero mode: W = V2
    for c in 0..n2 {
        out.set_coeff(c, 0, field.coeff(n1 + c, 0));
    }
    for e in &table.entries {
        let w = w_hat_at(e, n1, n2, &gather(field, e.flat));
        for c in 0..n2 {
            out.set_coeff(c, e.flat, w[c]);
        }
        if e.opp != e.flat {
            let vo = gather(field, e.opp);
            // conjugated multiplier at -omega
            let v1 = vo.rows(0, n1).into_owned();
            let v2 = vo.rows(n1, n2).into_owned();
            let p = to_complex(&e.zinv_s21) * v1 + to_complex(&e.zinv_s22) * &v2;
            let w = p.scale(1.0 / e.rho) * complex(0.0, -1.0) + v2;
            for c in 0..n2 {
                out.set_coeff(c, e.opp, w[c]);
            }
        }
    }
    out
}

/// Residual of the parabolic equation for `W` along a trajectory, with the
/// time derivative taken exactly from the mode generator. Returns the max
/// modulus per trajectory entry.
pub fn parabolic_residual(
    system: &SymbolicSystem,
    trajectory: &[SpectralField],
) -> Result<Vec<f64>, SimError> {
    let first = trajectory
        .first()
        .ok_or_else(|| SimError::Precondition("empty trajectory".into()))?;
    let table = ModeTable::build(system, first)?;
    let (n1, n2) = (table.n1, table.n2);
    let s022 = to_complex(&table.s0_bar.view((n1, n1), (n2, n2)).into_owned());
    Ok(trajectory
        .iter()
        .map(|field| {
            let per_mode: Vec<f64> = table
                .entries
                .par_iter()
                .map(|e| {
                    let mut worst = 0.0f64;
                    for (conj, flat) in [(false, e.flat), (true, e.opp)] {
                        if conj && e.opp == e.flat {
                            continue;
                        }
                        let v = gather(field, flat);
                        let rho = e.rho;
                        let gen = e.sym.mode_generator(rho);
                        let gen = if conj { gen.map(|z| z.conj()) } else { gen };
                        let vdot = -(&gen * &v);
                        // at -omega the first-order multipliers flip sign
                        let sgn = if conj { -1.0 } else { 1.0 };
                        let i_over_rho = complex(0.0, sgn / rho);
                        let z21 = to_complex(&e.zinv_s21);
                        let z22 = to_complex(&e.zinv_s22);
                        let w_of = |x: &CVec| -> CVec {
                            let x1 = x.rows(0, n1).into_owned();
                            let x2 = x.rows(n1, n2).into_owned();
                            (&z21 * x1 + &z22 * &x2) * i_over_rho + x2
                        };
                        // Z^{-1} (S21 V1' + S22 V2')
                        let zinv_pdot = &z21 * vdot.rows(0, n1).into_owned()
                            + &z22 * vdot.rows(n1, n2).into_owned();
                        let z = to_complex(&e.sym.z_omega);
                        // S0_22 W' + rho^2 Z W - (i/rho) S0_22 Z^{-1} P'
                        let res = &s022 * w_of(&vdot) + (&z * w_of(&v)).scale(rho * rho)
                            - (&s022 * zinv_pdot) * i_over_rho;
                        worst = worst.max(res.iter().map(|z| z.norm()).fold(0.0, f64::max));
                    }
                    worst
                })
                .collect();
            per_mode.into_iter().fold(0.0, f64::max)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Functional time series
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FunctionalRow {
    pub time: f64,
    /// Hybrid low norm of the whole state at regularity `d/2 - 1`.
    pub v_low: f64,
    /// High-frequency norm of the undiffused block at `d/2 + 1`.
    pub v1_high: f64,
    /// High-frequency norm of the diffused block at `d/2`.
    pub v2_high: f64,
    /// High-frequency norm of the parabolic mode at `d/2`.
    pub w_high: f64,
    /// Block Lyapunov functional combining the three pieces.
    pub lyapunov: f64,
}

#[derive(Debug, Clone)]
pub struct FunctionalTable {
    pub rows: Vec<FunctionalRow>,
}

/// Track the hybrid norms and the dyadic-block Lyapunov functional along a
/// trajectory. `params` must be certified for the full pair (`b = 2`);
/// `reduced_params` supplies the weights of the undiffused-block functional
/// and may be omitted when `n1 <= 1` (its cross terms are then empty).
pub fn functional_time_series(
    system: &SymbolicSystem,
    trajectory: &[SpectralField],
    times: &[f64],
    params: &LyapunovParams,
    reduced_params: Option<&LyapunovParams>,
    split_j: i32,
) -> Result<FunctionalTable, SimError> {
    if trajectory.len() != times.len() {
        return Err(SimError::Precondition("one time per trajectory entry".into()));
    }
    let first = match trajectory.first() {
        Some(f) => f,
        None => return Ok(FunctionalTable { rows: Vec::new() }),
    };
    if system.n1 > 1 && reduced_params.is_none() {
        return Err(SimError::Precondition(
            "reduced-pair weights required when n1 > 1".into(),
        ));
    }
    let table = ModeTable::build(system, first)?;
    let (n1, n2) = (table.n1, table.n2);
    let d = first.d;
    let cut = build_cutoffs();
    let (j_min, j_max) = (first.j_min(), first.j_max());
    let n_blocks = (j_max - j_min + 1) as usize;
    let measure = (2.0 * std::f64::consts::PI * first.box_length).powi(d as i32);
    let s0c = to_complex(&table.s0_bar);
    let s022 = to_complex(&table.s0_bar.view((n1, n1), (n2, n2)).into_owned());

    // Per-canonical-mode caches: block weights and cross-term matrices.
    struct Cached {
        weights: Vec<f64>,
        g_full: CMat,
        g_red: CMat,
    }
    let cached: Vec<Cached> = table
        .entries
        .par_iter()
        .map(|e| {
            let weights =
                (j_min..=j_max).map(|j| cut.phi_block(j, e.rho)).collect::<Vec<f64>>();
            let pair = DissipativePair::full(&e.sym);
            let g_full = cross_term_matrix(
                &pair.n_mat(),
                &pair.m_plain().scale(params.kappa),
                params.cross_epsilons(),
            );
            let g_red = match reduced_params {
                Some(rp) if n1 > 1 => {
                    let rpair = DissipativePair::reduced(&e.sym);
                    cross_term_matrix(
                        &rpair.n_mat(),
                        &rpair.m_plain().scale(rp.kappa),
                        rp.cross_epsilons(),
                    )
                }
                _ => CMat::zeros(n1, n1),
            };
            Cached { weights, g_full, g_red }
        })
        .collect();

    let red_weight = |j: i32| -> f64 {
        match reduced_params {
            Some(rp) => cross_weight(rp.a, rp.b, rp.kappa, (j as f64).exp2()),
            None => {
                let w = (j as f64).exp2();
                w.min(1.0 / w)
            }
        }
    };

    let mut rows = Vec::with_capacity(times.len());
    for (field, &time) in trajectory.iter().zip(times) {
        // accumulators per block
        let mut v_all = vec![0.0f64; n_blocks];
        let mut v1 = vec![0.0f64; n_blocks];
        let mut v2 = vec![0.0f64; n_blocks];
        let mut w_l2 = vec![0.0f64; n_blocks];
        let mut lyap_full = vec![0.0f64; n_blocks];
        let mut lyap_red = vec![0.0f64; n_blocks];
        let mut w_weighted = vec![0.0f64; n_blocks];

        let contributions: Vec<(usize, Vec<f64>)> = table
            .entries
            .par_iter()
            .zip(&cached)
            .map(|(e, cache)| {
                // 7 accumulators per block, flattened
                let mut acc = vec![0.0f64; 7 * n_blocks];
                for (conj, flat) in [(false, e.flat), (true, e.opp)] {
                    if conj && e.opp == e.flat {
                        continue;
                    }
                    let v = gather(field, flat);
                    let v1p = v.rows(0, n1).into_owned();
                    let v2p = v.rows(n1, n2).into_owned();
                    let p = to_complex(&e.zinv_s21) * &v1p + to_complex(&e.zinv_s22) * &v2p;
                    let sgn = if conj { -1.0 } else { 1.0 };
                    let w = p.scale(1.0 / e.rho) * complex(0.0, sgn) + v2p.clone();

                    let s_form = ((&s0c * &v).dotc(&v)).re;
                    // conjugated mode: form value of conj(G) at conj(v)
                    // equals the value of G at v, so no branch is needed
                    let g_form = ((&cache.g_full * &v).dotc(&v)).re;
                    let s11_form = if n1 > 0 {
                        ((to_complex(&table.s0_bar.view((0, 0), (n1, n1)).into_owned()) * &v1p)
                            .dotc(&v1p))
                        .re
                    } else {
                        0.0
                    };
                    let gr_form = if n1 > 1 { ((&cache.g_red * &v1p).dotc(&v1p)).re } else { 0.0 };
                    let w_form = ((&s022 * &w).dotc(&w)).re;
                    let v2_sq = v2p.norm_squared();
                    let v1_sq = v1p.norm_squared();
                    let v_sq = v.norm_squared();
                    let w_sq = w.norm_squared();

                    for (bi, &phi) in cache.weights.iter().enumerate() {
                        if phi == 0.0 {
                            continue;
                        }
                        let p2 = phi * phi;
                        acc[7 * bi] += p2 * v_sq;
                        acc[7 * bi + 1] += p2 * v1_sq;
                        acc[7 * bi + 2] += p2 * v2_sq;
                        acc[7 * bi + 3] += p2 * w_sq;
                        acc[7 * bi + 4] += p2 * (s_form
                            + cross_weight(
                                params.a,
                                params.b,
                                params.kappa,
                                ((j_min + bi as i32) as f64).exp2(),
                            ) * g_form);
                        acc[7 * bi + 5] +=
                            p2 * (s11_form + red_weight(j_min + bi as i32) * gr_form);
                        acc[7 * bi + 6] += p2 * w_form;
                    }
                }
                (e.flat, acc)
            })
            .collect();
        // deterministic serial reduction in canonical-mode order
        for (_, acc) in &contributions {
            for bi in 0..n_blocks {
                v_all[bi] += acc[7 * bi];
                v1[bi] += acc[7 * bi + 1];
                v2[bi] += acc[7 * bi + 2];
                w_l2[bi] += acc[7 * bi + 3];
                lyap_full[bi] += acc[7 * bi + 4];
                lyap_red[bi] += acc[7 * bi + 5];
                w_weighted[bi] += acc[7 * bi + 6];
            }
        }

        let dh = d as f64 / 2.0;
        let mut row = FunctionalRow {
            time,
            v_low: 0.0,
            v1_high: 0.0,
            v2_high: 0.0,
            w_high: 0.0,
            lyapunov: 0.0,
        };
        for bi in 0..n_blocks {
            let j = j_min + bi as i32;
            let jf = j as f64;
            if j <= split_j {
                row.v_low += (jf * (dh - 1.0)).exp2() * (v_all[bi] * measure).sqrt();
                row.lyapunov +=
                    (jf * (dh - 1.0)).exp2() * (lyap_full[bi].max(0.0) * measure).sqrt();
            } else {
                row.v1_high += (jf * (dh + 1.0)).exp2() * (v1[bi] * measure).sqrt();
                row.v2_high += (jf * dh).exp2() * (v2[bi] * measure).sqrt();
                row.w_high += (jf * dh).exp2() * (w_l2[bi] * measure).sqrt();
                row.lyapunov += (jf * (dh + 1.0)).exp2()
                    * (lyap_red[bi].max(0.0) * measure).sqrt()
                    + (jf * dh).exp2() * (w_weighted[bi].max(0.0) * measure).sqrt();
            }
        }
        rows.push(row);
    }
    Ok(FunctionalTable { rows })
}

// ---------------------------------------------------------------------------
// Decay-exponent fits
// ---------------------------------------------------------------------------

/// Least-squares slope of `log(value)` against `log(t)` over a window;
/// returns the exponent and its standard error.
pub fn fit_decay_exponent(
    series: &[(f64, f64)],
    window: (f64, f64),
) -> Result<(f64, f64), SimError> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(SimError::DegenerateWindow(format!("bad window [{lo}, {hi}]")));
    }
    let pts: Vec<(f64, f64)> =
        series.iter().copied().filter(|&(t, v)| t >= lo && t <= hi && v > 0.0).collect();
    if pts.len() < 3 {
        return Err(SimError::DegenerateWindow(format!(
            "only {} usable points in [{lo}, {hi}]",
            pts.len()
        )));
    }
    match crate::lyapunov::loglog_fit(&pts) {
        Some((slope, _, stderr)) => Ok((slope, stderr)),
        None => Err(SimError::DegenerateWindow("no spread in the window".into())),
    }
}

/// Default decay-fit horizon for a box of scale `L`: large enough for the
/// power law to establish, small enough that the missing sub-box modes
/// (below `rho = 1/L`) stay under a few percent of the continuum norm.
pub fn decay_fit_horizon(box_length: f64) -> f64 {
    std::f64::consts::PI * box_length * box_length / 200.0
}

// ---------------------------------------------------------------------------
// Nonlinear barotropic stepper (demonstration)
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub struct NsSetup {
    pub mu: f64,
    pub lambda: f64,
    pub pressure: PressureLaw,
    pub rho_ref: f64,
}

#[derive(Debug, Clone)]
pub struct NonlinearOptions {
    /// Fixed internal time step.
    pub dt: f64,
    /// Advective CFL bound.
    pub cfl_limit: f64,
    /// Required bound on the initial hybrid norm (small-data regime).
    pub smallness: f64,
    /// Norm-growth factor that counts as blow-up.
    pub blowup_factor: f64,
    /// 2/3-rule dealiasing of products.
    pub dealias: bool,
}

impl Default for NonlinearOptions {
    fn default() -> Self {
        Self { dt: 1e-2, cfl_limit: 0.5, smallness: 0.5, blowup_factor: 10.0, dealias: true }
    }
}

#[derive(Debug)]
pub struct NonlinearRun {
    pub times: Vec<f64>,
    pub trajectory: Vec<SpectralField>,
    /// max over outputs of L2 norm relative to the initial one.
    pub growth_ratio: f64,
}

/// Semi-implicit pseudo-spectral step for the barotropic system in the
/// perturbation variables `(a, u) = (rho - rho_ref, u)`: diffusion implicit
/// at the reference density, transport and pressure explicit, products
/// dealiased. Demonstration quality; `d` must be 1 or 2.
pub fn evolve_nonlinear_ns(
    setup: &NsSetup,
    field0: &SpectralField,
    times: &[f64],
    opts: &NonlinearOptions,
) -> Result<NonlinearRun, SimError> {
    let d = field0.d;
    if !(1..=2).contains(&d) {
        return Err(SimError::Precondition(format!("nonlinear stepper supports d in {{1,2}}, got {d}")));
    }
    if field0.n_comp != 1 + d {
        return Err(SimError::FieldMismatch(format!(
            "expected {} components (density + velocity), got {}",
            1 + d,
            field0.n_comp
        )));
    }
    let init_low = besov_hybrid_ns(field0);
    if init_low > opts.smallness {
        return Err(SimError::Precondition(format!(
            "initial hybrid norm {init_low:.3e} above the small-data threshold {:.3e}",
            opts.smallness
        )));
    }
    let g = field0.grid;
    let m = field0.modes();
    let l = field0.box_length;
    let dx = 2.0 * std::f64::consts::PI * l / g as f64;
    let nu = 2.0 * setup.mu + setup.lambda;
    let c_sound = (setup.pressure.dp)(setup.rho_ref).max(0.0).sqrt();

    // per-mode xi vectors and implicit factors
    let xi: Vec<Vec<f64>> = (0..m)
        .map(|flat| field0.wavevector(flat).iter().map(|&k| k as f64 / l).collect())
        .collect();
    let xi2: Vec<f64> = xi.iter().map(|v| v.iter().map(|x| x * x).sum()).collect();

    let mut state = field0.clone();
    let mut t = 0.0f64;
    let init_l2 = field0.l2_norm().max(1e-300);
    let mut out_times = Vec::with_capacity(times.len());
    let mut out_fields = Vec::with_capacity(times.len());
    let mut growth: f64 = 1.0;

    let dealias_keep: Vec<bool> = (0..m)
        .map(|flat| {
            field0.wavevector(flat).iter().all(|&k| (k.unsigned_abs() as usize) <= g / 3)
        })
        .collect();

    for &t_out in times {
        if t_out < t {
            return Err(SimError::Precondition("output times must be nondecreasing".into()));
        }
        while t < t_out - 1e-12 {
            let dt = opts.dt.min(t_out - t);
            // physical-space fields
            let a_phys = state.to_physical(0);
            let u_phys: Vec<Vec<C64>> = (1..=d).map(|c| state.to_physical(c)).collect();
            let umax = u_phys
                .iter()
                .flat_map(|u| u.iter().map(|z| z.re.abs()))
                .fold(0.0, f64::max);
            let stable = opts.cfl_limit * dx / (umax + c_sound).max(1e-12);
            if dt > stable {
                return Err(SimError::CflViolation { dt, limit: stable });
            }
            // spectral derivatives
            let deriv = |comp: usize, ax: usize| -> Vec<C64> {
                let mut buf: Vec<C64> = state.component_slice(comp).to_vec();
                for flat in 0..m {
                    buf[flat] *= complex(0.0, xi[flat][ax]);
                }
                crate::lp::fft_nd(&mut buf, g, d, true);
                buf
            };
            let grad_a: Vec<Vec<C64>> = (0..d).map(|ax| deriv(0, ax)).collect();
            let grad_u: Vec<Vec<Vec<C64>>> =
                (0..d).map(|ci| (0..d).map(|ax| deriv(1 + ci, ax)).collect()).collect();
            // viscous operator applied to u, physical space
            let visc: Vec<Vec<C64>> = (0..d)
                .map(|ci| {
                    let mut buf = vec![complex(0.0, 0.0); m];
                    for flat in 0..m {
                        let mut div_term = complex(0.0, 0.0);
                        for cj in 0..d {
                            div_term += state.coeff(1 + cj, flat)
                                * complex(-xi[flat][ci] * xi[flat][cj], 0.0);
                        }
                        buf[flat] = state.coeff(1 + ci, flat) * complex(-setup.mu * xi2[flat], 0.0)
                            + div_term.scale(setup.mu + setup.lambda);
                    }
                    crate::lp::fft_nd(&mut buf, g, d, true);
                    buf
                })
                .collect();

            // nonlinear right-hand sides in physical space
            let mut rhs_a = vec![complex(0.0, 0.0); m];
            let mut rhs_u: Vec<Vec<C64>> = vec![vec![complex(0.0, 0.0); m]; d];
            for i in 0..m {
                let rho = setup.rho_ref + a_phys[i].re;
                let mut div_u = 0.0;
                for ax in 0..d {
                    div_u += grad_u[ax][ax][i].re;
                }
                let mut adv_a = 0.0;
                for ax in 0..d {
                    adv_a += u_phys[ax][i].re * grad_a[ax][i].re;
                }
                rhs_a[i] = complex(-adv_a - rho * div_u, 0.0);
                let dp_over_rho = (setup.pressure.dp)(rho) / rho;
                for ci in 0..d {
                    let mut adv = 0.0;
                    for ax in 0..d {
                        adv += u_phys[ax][i].re * grad_u[ci][ax][i].re;
                    }
                    let visc_corr = (1.0 / rho - 1.0 / setup.rho_ref) * visc[ci][i].re;
                    rhs_u[ci][i] =
                        complex(-adv - dp_over_rho * grad_a[ci][i].re + visc_corr, 0.0);
                }
            }
            // to Fourier, dealias
            crate::lp::fft_nd(&mut rhs_a, g, d, false);
            for r in rhs_u.iter_mut() {
                crate::lp::fft_nd(r, g, d, false);
            }
            let scale = 1.0 / m as f64;
            for flat in 0..m {
                let keep = !opts.dealias || dealias_keep[flat];
                let w = if keep { scale } else { 0.0 };
                rhs_a[flat] = rhs_a[flat].scale(w);
                for r in rhs_u.iter_mut() {
                    r[flat] = r[flat].scale(w);
                }
            }
            // advance: explicit density, semi-implicit velocity
            for flat in 0..m {
                let a_new = state.coeff(0, flat) + rhs_a[flat].scale(dt);
                state.set_coeff(0, flat, a_new);
            }
            for flat in 0..m {
                // split u* into xi-parallel and perpendicular parts
                let ustar: Vec<C64> = (0..d)
                    .map(|ci| state.coeff(1 + ci, flat) + rhs_u[ci][flat].scale(dt))
                    .collect();
                if xi2[flat] == 0.0 {
                    for (ci, z) in ustar.iter().enumerate() {
                        state.set_coeff(1 + ci, flat, *z);
                    }
                    continue;
                }
                let mut dot = complex(0.0, 0.0);
                for ci in 0..d {
                    dot += ustar[ci] * complex(xi[flat][ci], 0.0);
                }
                let par_factor = 1.0 / (1.0 + dt * nu * xi2[flat] / setup.rho_ref);
                let perp_factor = 1.0 / (1.0 + dt * setup.mu * xi2[flat] / setup.rho_ref);
                for ci in 0..d {
                    let par = dot * complex(xi[flat][ci] / xi2[flat], 0.0);
                    let perp = ustar[ci] - par;
                    state.set_coeff(1 + ci, flat, par.scale(par_factor) + perp.scale(perp_factor));
                }
            }
            state.enforce_reality();
            t += dt;
            let ratio = state.l2_norm() / init_l2;
            growth = growth.max(ratio);
            if ratio > opts.blowup_factor {
                return Err(SimError::BlowupDetected { time: t, ratio });
            }
        }
        out_times.push(t_out);
        out_fields.push(state.clone());
    }
    Ok(NonlinearRun { times: out_times, trajectory: out_fields, growth_ratio: growth })
}

/// Hybrid smallness gauge used by the nonlinear stepper's precondition:
/// low-frequency `d/2 - 1` norm plus high-frequency `d/2` norm.
pub fn besov_hybrid_ns(field: &SpectralField) -> f64 {
    let d = field.d as f64;
    let hn = crate::lp::besov_norm_hybrid(field, d / 2.0 - 1.0, d / 2.0, BesovSum::L1, 0);
    let split = low_high_split(field, 0);
    hn.total + split.residual_norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RVec;
    use crate::lyapunov::{default_rho_grid, select_epsilons};
    use crate::zoo;

    fn toy_field_single_mode(k: i64, grid: usize, l: f64, v: (C64, C64)) -> SpectralField {
        let mut f = SpectralField::zeros(1, 2, grid, l, false);
        let g = grid as i64;
        let idx = (((k % g) + g) % g) as usize;
        f.set_coeff(0, idx, v.0);
        f.set_coeff(1, idx, v.1);
        f
    }

    #[test]
    fn zero_field_stays_zero() {
        let sys = zoo::make_toy1d();
        let f0 = SpectralField::zeros(1, 2, 32, 1.0, false);
        let traj = evolve_linear(&sys, &f0, &[0.0, 1.0, 5.0]).unwrap();
        for f in traj {
            assert_eq!(f.l2_norm(), 0.0);
        }
    }

    #[test]
    fn scalar_heat_kernel() {
        // n = 1 pure diffusion: vhat(t) = exp(-t rho^2) vhat0.
        let sys = zoo::make_pure_parabolic(1, 1);
        let mut f0 = SpectralField::zeros(1, 1, 32, 1.0, false);
        f0.set_coeff(0, 3, complex(1.0, 0.5)); // k = 3, rho = 3
        let traj = evolve_linear(&sys, &f0, &[0.4]).unwrap();
        let expect = complex(1.0, 0.5).scale((-0.4 * 9.0f64).exp());
        assert!((traj[0].coeff(0, 3) - expect).norm() < 1e-12);
    }

    #[test]
    fn toy_mode_decays_at_half_rate() {
        // rho = 1: envelope exp(-t/2).
        let sys = zoo::make_toy1d();
        let f0 = toy_field_single_mode(1, 32, 1.0, (complex(1.0, 0.0), complex(0.0, 0.0)));
        let times = [2.0, 6.0, 10.0];
        let traj = evolve_linear(&sys, &f0, &times).unwrap();
        for (f, &t) in traj.iter().zip(&times) {
            let amp = (f.coeff(0, 1).norm_sqr() + f.coeff(1, 1).norm_sqr()).sqrt();
            let envelope = (-t / 2.0).exp();
            // oscillatory prefactor is O(1); check the exponential scale
            assert!(amp < 3.0 * envelope, "t = {t}: {amp} vs {envelope}");
            assert!(amp > 0.1 * envelope, "t = {t}: {amp} vs {envelope}");
        }
    }

    #[test]
    fn semigroup_property() {
        let sys = zoo::make_toy1d();
        let mut f0 = SpectralField::zeros(1, 2, 64, 2.0, false);
        for (i, k) in [(1usize, 0.7), (5, -0.3), (20, 0.1)] {
            f0.set_coeff(0, i, complex(k, 0.2));
            f0.set_coeff(1, i, complex(-0.1, k));
        }
        let one = evolve_linear(&sys, &f0, &[0.7]).unwrap().remove(0);
        let two = evolve_linear(&sys, &one, &[0.5]).unwrap().remove(0);
        let direct = evolve_linear(&sys, &f0, &[1.2]).unwrap().remove(0);
        let mut err: f64 = 0.0;
        for c in 0..2 {
            for flat in 0..f0.modes() {
                err = err.max((two.coeff(c, flat) - direct.coeff(c, flat)).norm());
            }
        }
        assert!(err < 1e-10, "semigroup defect {err}");
    }

    #[test]
    fn reality_is_preserved() {
        let sys = zoo::make_barotropic_ns_default(2);
        let f0 = SpectralField::from_physical_fn(2, 3, 32, 2.0, |x, c| {
            let s = (x[0] / 2.0).sin() + (x[1]).cos();
            match c {
                0 => 0.3 * s,
                1 => 0.1 * (x[0] / 2.0).cos(),
                _ => -0.2 * s,
            }
        });
        assert!(f0.hermitian_defect() < 1e-12);
        let traj = evolve_linear(&sys, &f0, &[0.3, 1.7]).unwrap();
        for f in traj {
            assert!(f.hermitian_defect() <= 1e-12, "defect {}", f.hermitian_defect());
        }
    }

    #[test]
    fn parabolic_mode_literal_value() {
        // toy system, mode xi = 2, V = (1, 1): W = 1 + i/2.
        let sys = zoo::make_toy1d();
        let f = toy_field_single_mode(2, 32, 1.0, (complex(1.0, 0.0), complex(1.0, 0.0)));
        let w = parabolic_mode_field(&sys, &f).unwrap();
        assert!((w.coeff(0, 2) - complex(1.0, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn parabolic_mode_trivial_when_multiplier_vanishes() {
        // V1 = 0 and S22 = 0 leave W = V2.
        let sys = zoo::make_toy1d();
        let f = toy_field_single_mode(3, 32, 1.0, (complex(0.0, 0.0), complex(0.4, -0.7)));
        let w = parabolic_mode_field(&sys, &f).unwrap();
        assert!((w.coeff(0, 3) - complex(0.4, -0.7)).norm() < 1e-14);
    }

    #[test]
    fn parabolic_residual_vanishes_on_linear_flow() {
        let sys = zoo::make_toy1d();
        let mut f0 = SpectralField::zeros(1, 2, 64, 2.0, false);
        for (i, k) in [(1usize, 0.7), (7, -0.3), (25, 0.2)] {
            f0.set_coeff(0, i, complex(k, -0.1));
            f0.set_coeff(1, i, complex(0.3, k));
        }
        let times = [0.0, 0.5, 2.0];
        let traj = evolve_linear(&sys, &f0, &times).unwrap();
        let res = parabolic_residual(&sys, &traj).unwrap();
        for r in res {
            assert!(r <= 1e-10, "residual {r}");
        }
    }

    #[test]
    fn parabolic_residual_zero_field() {
        let sys = zoo::make_toy1d();
        let f0 = SpectralField::zeros(1, 2, 16, 1.0, false);
        let res = parabolic_residual(&sys, &[f0]).unwrap();
        assert_eq!(res[0], 0.0);
    }

    #[test]
    fn parabolic_residual_pure_diffusion() {
        // n1 = 0: W = V2 and the equation reduces to the heat equation.
        let sys = zoo::make_pure_parabolic(1, 2);
        let mut f0 = SpectralField::zeros(1, 2, 32, 1.0, false);
        f0.set_coeff(0, 2, complex(0.7, 0.1));
        f0.set_coeff(1, 5, complex(-0.2, 0.4));
        let traj = evolve_linear(&sys, &f0, &[0.0, 0.3]).unwrap();
        let res = parabolic_residual(&sys, &traj).unwrap();
        for r in res {
            assert!(r <= 1e-10);
        }
    }

    #[test]
    fn functional_series_zero_field() {
        let sys = zoo::make_toy1d();
        let sym = evaluate_symbols(&sys, &RVec::from_vec(vec![1.0])).unwrap();
        let params = select_epsilons(&sym, 1, 2, 1.0, &default_rho_grid()).unwrap();
        let f0 = SpectralField::zeros(1, 2, 16, 1.0, false);
        let table = functional_time_series(&sys, &[f0.clone(), f0], &[0.0, 1.0], &params, None, 0)
            .unwrap();
        for row in table.rows {
            assert_eq!(row.lyapunov, 0.0);
            assert_eq!(row.v_low + row.v1_high + row.v2_high + row.w_high, 0.0);
        }
    }

    #[test]
    fn functional_series_monotone_on_linear_flow() {
        let sys = zoo::make_toy1d();
        let sym = evaluate_symbols(&sys, &RVec::from_vec(vec![1.0])).unwrap();
        let params = select_epsilons(&sym, 1, 2, 1.0, &default_rho_grid()).unwrap();
        let mut f0 = SpectralField::zeros(1, 2, 64, 4.0, false);
        for (i, k) in [(1usize, 0.9), (3, -0.4), (9, 0.2), (30, 0.05)] {
            f0.set_coeff(0, i, complex(k, 0.1));
            f0.set_coeff(1, i, complex(-0.2, k));
        }
        f0.enforce_reality();
        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
        let traj = evolve_linear(&sys, &f0, &times).unwrap();
        let table = functional_time_series(&sys, &traj, &times, &params, None, 0).unwrap();
        for w in table.rows.windows(2) {
            assert!(
                w[1].lyapunov <= w[0].lyapunov * (1.0 + 1e-9),
                "t = {}: {} -> {}",
                w[1].time,
                w[0].lyapunov,
                w[1].lyapunov
            );
        }
    }

    #[test]
    fn single_low_mode_matches_spectral_rate() {
        let sys = zoo::make_toy1d();
        let sym = evaluate_symbols(&sys, &RVec::from_vec(vec![1.0])).unwrap();
        let params = select_epsilons(&sym, 1, 2, 1.0, &default_rho_grid()).unwrap();
        // k = 1 on a box of scale 8: rho = 1/8, spectral rate = rho^2 / 2
        let mut f0 = SpectralField::zeros(1, 2, 64, 8.0, false);
        f0.set_coeff(0, 1, complex(1.0, 0.0));
        f0.enforce_reality();
        let rho: f64 = 1.0 / 8.0;
        let rate = crate::lyapunov::spectral_decay_rate(&sys, &RVec::from_vec(vec![1.0]), rho)
            .unwrap();
        let t_end = 1.5 / rate;
        let times: Vec<f64> = (0..200).map(|i| i as f64 * t_end / 199.0).collect();
        let traj = evolve_linear(&sys, &f0, &times).unwrap();
        let table = functional_time_series(&sys, &traj, &times, &params, None, 0).unwrap();
        // the block functional sums square roots of quadratic forms, so it
        // tracks the amplitude envelope exp(-rate t); regress ln L on t to
        // average out the acoustic oscillation
        let pts: Vec<(f64, f64)> =
            table.rows.iter().map(|r| (r.time, r.lyapunov.ln())).collect();
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let ml = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
        let observed = -sxy / sxx;
        assert!((observed - rate).abs() <= 0.05 * rate, "observed {observed} vs {rate}");
    }

    #[test]
    fn fit_exact_power_law() {
        let series: Vec<(f64, f64)> = (1..60).map(|i| (i as f64, 1.0 / i as f64)).collect();
        let (slope, err) = fit_decay_exponent(&series, (1.0, 60.0)).unwrap();
        assert!((slope + 1.0).abs() < 1e-6);
        assert!(err < 1e-6);
    }

    #[test]
    fn fit_constant_series_is_flat() {
        let series: Vec<(f64, f64)> = (1..40).map(|i| (i as f64, 2.5)).collect();
        let (slope, _) = fit_decay_exponent(&series, (1.0, 40.0)).unwrap();
        assert!(slope.abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_degenerate_windows() {
        let series = vec![(1.0, 1.0), (2.0, 0.5)];
        assert!(matches!(
            fit_decay_exponent(&series, (1.0, 2.0)),
            Err(SimError::DegenerateWindow(_))
        ));
        assert!(matches!(
            fit_decay_exponent(&series, (-1.0, 2.0)),
            Err(SimError::DegenerateWindow(_))
        ));
    }

    #[test]
    fn nonlinear_preserves_steady_state() {
        let setup = NsSetup {
            mu: 1.0,
            lambda: 0.0,
            pressure: PressureLaw::power(1.0, 2.0),
            rho_ref: 1.0,
        };
        let f0 = SpectralField::zeros(2, 3, 32, 1.0, true);
        let run = evolve_nonlinear_ns(&setup, &f0, &[0.1, 0.2], &NonlinearOptions::default())
            .unwrap();
        for f in &run.trajectory {
            assert!(f.l2_norm() <= 1e-12);
        }
    }

    #[test]
    fn nonlinear_matches_linear_for_tiny_data() {
        let setup = NsSetup {
            mu: 1.0,
            lambda: 0.0,
            pressure: PressureLaw::power(1.0, 2.0),
            rho_ref: 1.0,
        };
        let sys = zoo::make_barotropic_ns_default(2);
        let amp = 1e-6;
        let f0 = SpectralField::from_physical_fn(2, 3, 32, 1.0, |x, c| match c {
            0 => amp * (x[0]).cos(),
            1 => amp * (x[1]).sin(),
            _ => 0.0,
        });
        let times = [0.2];
        let opts = NonlinearOptions { dt: 2e-3, ..Default::default() };
        let nl = evolve_nonlinear_ns(&setup, &f0, &times, &opts).unwrap();
        let lin = evolve_linear(&sys, &f0, &times).unwrap();
        let mut err: f64 = 0.0;
        for c in 0..3 {
            for flat in 0..f0.modes() {
                err = err.max((nl.trajectory[0].coeff(c, flat) - lin[0].coeff(c, flat)).norm());
            }
        }
        // first-order consistency: error of the size of the neglected terms
        // (quadratic in the amplitude) plus O(dt) time-stepping error times
        // the amplitude
        assert!(err <= amp * 5e-2, "nonlinear vs linear deviation {err}");
    }

    #[test]
    fn nonlinear_small_data_stays_bounded() {
        let setup = NsSetup {
            mu: 1.0,
            lambda: 0.0,
            pressure: PressureLaw::power(1.0, 2.0),
            rho_ref: 1.0,
        };
        let f0 = SpectralField::from_physical_fn(2, 3, 32, 1.0, |x, c| match c {
            0 => 0.02 * (x[0]).cos() * (x[1]).sin(),
            1 => 0.02 * (x[1]).cos(),
            _ => -0.02 * (x[0]).sin(),
        });
        let times = [0.5, 1.0, 2.0];
        let opts = NonlinearOptions { dt: 2e-3, ..Default::default() };
        let run = evolve_nonlinear_ns(&setup, &f0, &times, &opts).unwrap();
        assert!(run.growth_ratio <= 2.0, "growth {}", run.growth_ratio);
    }
}
