//! FFT-based dyadic decomposition and hybrid Besov semi-norms on periodic
//! grids.
//!
//! Fields live in Fourier space: an `n_comp`-component complex coefficient
//! array over integer wavevectors `k` with physical frequency `xi = k / L`
//! on a box of period `2 pi L` per axis. Homogeneous Littlewood-Paley
//! blocks below the box scale are lumped into a reported residual.

use crate::linalg::{complex, C64};
use rustfft::FftPlanner;
use std::io::{Read, Write};
use std::ops::Range;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("block index {j} outside resolvable range [{j_min}, {j_max}]")]
    BlockOutOfRange { j: i32, j_min: i32, j_max: i32 },
    #[error("field dimensions do not match: {0}")]
    FieldMismatch(String),
    #[error("malformed field file: {0}")]
    MalformedField(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

// ---------------------------------------------------------------------------
// Smooth cutoffs
// ---------------------------------------------------------------------------

/// The radial cutoff pair: `chi` equal to one on `B(0, 3/4)`, supported in
/// `B(0, 4/3)`, and the annulus bump `phi(xi) = chi(xi/2) - chi(xi)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CutoffPair;

/// Inner and outer support radii of `chi`.
pub const CHI_INNER: f64 = 0.75;
pub const CHI_OUTER: f64 = 4.0 / 3.0;
/// The annulus `supp phi = [3/4, 8/3]`.
pub const PHI_INNER: f64 = 0.75;
pub const PHI_OUTER: f64 = 8.0 / 3.0;

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Classical smooth step `g(t) / (g(t) + g(1-t))`: exactly 0 for `t <= 0`
/// and exactly 1 for `t >= 1`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = bump(t);
    a / (a + bump(1.0 - t))
}

pub fn build_cutoffs() -> CutoffPair {
    CutoffPair
}

impl CutoffPair {
    /// Radial low-pass profile at radius `r = |xi|`.
    pub fn chi(&self, r: f64) -> f64 {
        smooth_step((CHI_OUTER - r.abs()) / (CHI_OUTER - CHI_INNER))
    }

    /// Annulus profile `chi(r/2) - chi(r)`.
    pub fn phi(&self, r: f64) -> f64 {
        self.chi(r / 2.0) - self.chi(r)
    }

    /// Dyadic block weight `phi(2^{-j} r)`.
    pub fn phi_block(&self, j: i32, r: f64) -> f64 {
        self.phi(r * (-j as f64).exp2())
    }

    /// Low-pass weight `chi(2^{-j} r)`.
    pub fn chi_block(&self, j: i32, r: f64) -> f64 {
        self.chi(r * (-j as f64).exp2())
    }
}

// ---------------------------------------------------------------------------
// Spectral fields
// ---------------------------------------------------------------------------

/// An `n_comp`-component complex field on a periodic grid, stored as Fourier
/// coefficients `u(x) = sum_k uhat(k) exp(i k.x / L)`.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub d: usize,
    pub n_comp: usize,
    /// Per-axis resolution (a power of two).
    pub grid: usize,
    /// Box scale `L`; the physical period is `2 pi L` per axis.
    pub box_length: f64,
    /// Marks fields of real physical data (Hermitian-symmetric coefficients).
    pub real_data: bool,
    coeffs: Vec<C64>,
}

impl SpectralField {
    pub fn zeros(d: usize, n_comp: usize, grid: usize, box_length: f64, real_data: bool) -> Self {
        assert!(d >= 1 && grid.is_power_of_two() && box_length > 0.0);
        let len = n_comp * grid.pow(d as u32);
        Self { d, n_comp, grid, box_length, real_data, coeffs: vec![C64::new(0.0, 0.0); len] }
    }

    /// Number of modes per component.
    pub fn modes(&self) -> usize {
        self.grid.pow(self.d as u32)
    }

    pub fn coeff(&self, comp: usize, flat: usize) -> C64 {
        self.coeffs[comp * self.modes() + flat]
    }

    pub fn set_coeff(&mut self, comp: usize, flat: usize, value: C64) {
        let m = self.modes();
        self.coeffs[comp * m + flat] = value;
    }

    pub fn component_slice(&self, comp: usize) -> &[C64] {
        let m = self.modes();
        &self.coeffs[comp * m..(comp + 1) * m]
    }

    pub fn component_slice_mut(&mut self, comp: usize) -> &mut [C64] {
        let m = self.modes();
        &mut self.coeffs[comp * m..(comp + 1) * m]
    }

    /// Integer wavevector of a flat mode index (FFT ordering per axis).
    pub fn wavevector(&self, flat: usize) -> Vec<i64> {
        let g = self.grid as i64;
        let mut k = vec![0i64; self.d];
        let mut rest = flat as i64;
        for ax in (0..self.d).rev() {
            let idx = rest % g;
            rest /= g;
            k[ax] = if idx < g / 2 { idx } else { idx - g };
        }
        k
    }

    /// Physical frequency magnitude `|k| / L` of a mode.
    pub fn rho(&self, flat: usize) -> f64 {
        let k = self.wavevector(flat);
        let s: f64 = k.iter().map(|&x| (x * x) as f64).sum();
        s.sqrt() / self.box_length
    }

    /// Flat index of the mode with opposite wavevector.
    pub fn opposite_mode(&self, flat: usize) -> usize {
        let g = self.grid;
        let mut rest = flat;
        let mut idx = vec![0usize; self.d];
        for ax in (0..self.d).rev() {
            idx[ax] = rest % g;
            rest /= g;
        }
        let mut out = 0usize;
        for ax in 0..self.d {
            let neg = (g - idx[ax]) % g;
            out = out * g + neg;
        }
        out
    }

    /// Largest resolvable frequency magnitude per axis, `grid / (2 L)`.
    pub fn xi_max(&self) -> f64 {
        self.grid as f64 / (2.0 * self.box_length)
    }

    /// Smallest dyadic index whose annulus is fully above the box scale.
    pub fn j_min(&self) -> i32 {
        (3.0 / (4.0 * self.box_length)).log2().ceil() as i32
    }

    /// Largest dyadic index whose annulus intersects the resolvable band.
    pub fn j_max(&self) -> i32 {
        (2.0 * self.grid as f64 / (3.0 * self.box_length)).log2().floor() as i32
    }

    /// Plancherel `L^2(box)` norm over all components.
    pub fn l2_norm(&self) -> f64 {
        let measure = (2.0 * std::f64::consts::PI * self.box_length).powi(self.d as i32);
        (self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() * measure).sqrt()
    }

    /// Copy of a contiguous component range.
    pub fn restrict(&self, comps: Range<usize>) -> SpectralField {
        assert!(comps.end <= self.n_comp);
        let m = self.modes();
        let mut out =
            SpectralField::zeros(self.d, comps.len(), self.grid, self.box_length, self.real_data);
        out.coeffs.copy_from_slice(&self.coeffs[comps.start * m..comps.end * m]);
        out
    }

    /// Worst deviation from Hermitian symmetry `uhat(-k) = conj(uhat(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.modes();
        let mut worst: f64 = 0.0;
        for comp in 0..self.n_comp {
            for flat in 0..m {
                let opp = self.opposite_mode(flat);
                if opp < flat {
                    continue;
                }
                let a = self.coeffs[comp * m + flat];
                let b = self.coeffs[comp * m + opp];
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }

    /// Symmetrize coefficients so the physical field is exactly real.
    pub fn enforce_reality(&mut self) {
        let m = self.modes();
        for comp in 0..self.n_comp {
            for flat in 0..m {
                let opp = self.opposite_mode(flat);
                if opp < flat {
                    continue;
                }
                let a = self.coeffs[comp * m + flat];
                let b = self.coeffs[comp * m + opp];
                let avg = (a + b.conj()).scale(0.5);
                self.coeffs[comp * m + flat] = avg;
                self.coeffs[comp * m + opp] = avg.conj();
            }
        }
        self.real_data = true;
    }

    /// Build a field by sampling a physical-space function on the grid and
    /// transforming. `f(x, comp)` receives coordinates in `[0, 2 pi L)^d`.
    pub fn from_physical_fn<F>(
        d: usize,
        n_comp: usize,
        grid: usize,
        box_length: f64,
        f: F,
    ) -> SpectralField
    where
        F: Fn(&[f64], usize) -> f64,
    {
        let mut field = SpectralField::zeros(d, n_comp, grid, box_length, true);
        let m = field.modes();
        let step = 2.0 * std::f64::consts::PI * box_length / grid as f64;
        let mut x = vec![0.0; d];
        for comp in 0..n_comp {
            let mut buf: Vec<C64> = Vec::with_capacity(m);
            for flat in 0..m {
                let mut rest = flat;
                for ax in (0..d).rev() {
                    x[ax] = (rest % grid) as f64 * step;
                    rest /= grid;
                }
                buf.push(complex(f(&x, comp), 0.0));
            }
            fft_nd(&mut buf, grid, d, false);
            let scale = 1.0 / m as f64;
            for (dst, src) in field.component_slice_mut(comp).iter_mut().zip(&buf) {
                *dst = src.scale(scale);
            }
        }
        field
    }

    /// Physical samples of one component (row-major over axes).
    pub fn to_physical(&self, comp: usize) -> Vec<C64> {
        let mut buf: Vec<C64> = self.component_slice(comp).to_vec();
        fft_nd(&mut buf, self.grid, self.d, true);
        buf
    }
}

/// In-place d-dimensional FFT on a row-major cube of side `grid`.
/// Unnormalized in both directions (the callers carry the 1/N).
pub(crate) fn fft_nd(buf: &mut [C64], grid: usize, d: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft =
        if inverse { planner.plan_fft_inverse(grid) } else { planner.plan_fft_forward(grid) };
    let total = buf.len();
    assert_eq!(total, grid.pow(d as u32));
    let mut line = vec![C64::new(0.0, 0.0); grid];
    for ax in 0..d {
        // stride between consecutive entries along `ax`
        let stride = grid.pow((d - 1 - ax) as u32);
        let lines = total / grid;
        for l in 0..lines {
            // Decompose the line index into the non-ax coordinates.
            let block = l / stride;
            let offset = l % stride;
            let start = block * stride * grid + offset;
            for i in 0..grid {
                line[i] = buf[start + i * stride];
            }
            fft.process(&mut line);
            for i in 0..grid {
                buf[start + i * stride] = line[i];
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Blocks, norms, splits
// ---------------------------------------------------------------------------

/// Apply the dyadic block multiplier `phi(2^{-j} |xi|)` coefficient-wise.
pub fn dyadic_block(field: &SpectralField, j: i32) -> Result<SpectralField, LpError> {
    let (j_min, j_max) = (field.j_min(), field.j_max());
    if j < j_min || j > j_max {
        return Err(LpError::BlockOutOfRange { j, j_min, j_max });
    }
    let cut = build_cutoffs();
    let mut out = field.clone();
    let m = field.modes();
    let weights: Vec<f64> = (0..m).map(|flat| cut.phi_block(j, field.rho(flat))).collect();
    for comp in 0..field.n_comp {
        let slice = out.component_slice_mut(comp);
        for (flat, w) in weights.iter().enumerate() {
            slice[flat] = slice[flat].scale(*w);
        }
    }
    Ok(out)
}

/// `L^2` norms of every resolvable dyadic block.
pub fn block_l2_norms(field: &SpectralField) -> Vec<(i32, f64)> {
    let cut = build_cutoffs();
    let m = field.modes();
    let measure = (2.0 * std::f64::consts::PI * field.box_length).powi(field.d as i32);
    let rhos: Vec<f64> = (0..m).map(|f| field.rho(f)).collect();
    (field.j_min()..=field.j_max())
        .map(|j| {
            let mut acc = 0.0;
            for comp in 0..field.n_comp {
                let slice = field.component_slice(comp);
                for (flat, z) in slice.iter().enumerate() {
                    let w = cut.phi_block(j, rhos[flat]);
                    if w != 0.0 {
                        acc += (w * w) * z.norm_sqr();
                    }
                }
            }
            (j, (acc * measure).sqrt())
        })
        .collect()
}

/// Summation mode of a Besov semi-norm: `l^1` or `l^infty` over blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesovSum {
    L1,
    LInf,
}

#[derive(Debug, Clone, Copy)]
pub struct HybridNorm {
    pub low: f64,
    pub high: f64,
    pub total: f64,
}

/// Hybrid Besov semi-norm: regularity `s_low` on blocks `j <= split_j`,
/// `s_high` above.
pub fn besov_norm_hybrid(
    field: &SpectralField,
    s_low: f64,
    s_high: f64,
    r: BesovSum,
    split_j: i32,
) -> HybridNorm {
    let mut low = 0.0f64;
    let mut high = 0.0f64;
    for (j, norm) in block_l2_norms(field) {
        let (s, acc) = if j <= split_j { (s_low, &mut low) } else { (s_high, &mut high) };
        let term = (j as f64 * s).exp2() * norm;
        match r {
            BesovSum::L1 => *acc += term,
            BesovSum::LInf => *acc = acc.max(term),
        }
    }
    let total = match r {
        BesovSum::L1 => low + high,
        BesovSum::LInf => low.max(high),
    };
    HybridNorm { low, high, total }
}

#[derive(Debug, Clone)]
pub struct SplitField {
    pub low: SpectralField,
    pub high: SpectralField,
    /// Sub-resolvable content (below the lowest dyadic block, including the
    /// mean mode).
    pub residual: SpectralField,
    /// `L^2` norm of the residual, for auditing the torus approximation.
    pub residual_norm: f64,
}

/// Split a field into low frequencies (`j <= split_j`), high frequencies
/// (`j > split_j`) and the sub-resolvable residual. The three multipliers
/// sum to one exactly, so `low + high + residual` reconstructs the field.
pub fn low_high_split(field: &SpectralField, split_j: i32) -> SplitField {
    let cut = build_cutoffs();
    let mut low = field.clone();
    let mut high = field.clone();
    let mut residual = field.clone();
    let m = field.modes();
    let j_min = field.j_min();
    for flat in 0..m {
        let rho = field.rho(flat);
        // chi telescoping: sum_{j_min <= j <= N0} phi(2^{-j} rho)
        //   = chi(2^{-(N0+1)} rho) - chi(2^{-j_min} rho).
        let m_res = cut.chi_block(j_min, rho);
        let m_low = cut.chi_block(split_j + 1, rho) - m_res;
        let m_high = 1.0 - cut.chi_block(split_j + 1, rho);
        for comp in 0..field.n_comp {
            let z = field.coeff(comp, flat);
            low.set_coeff(comp, flat, z.scale(m_low));
            high.set_coeff(comp, flat, z.scale(m_high));
            residual.set_coeff(comp, flat, z.scale(m_res));
        }
    }
    let residual_norm = residual.l2_norm();
    SplitField { low, high, residual, residual_norm }
}

// ---------------------------------------------------------------------------
// Binary field format
// ---------------------------------------------------------------------------

// Layout: little-endian u64 d, u64 n_comp, u64 grid, f64 box_length,
// u64 reality flag, then per component the row-major coefficients as
// (re, im) f64 pairs.

pub fn write_field(field: &SpectralField, path: &Path) -> Result<(), LpError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(&(field.d as u64).to_le_bytes())?;
    w.write_all(&(field.n_comp as u64).to_le_bytes())?;
    w.write_all(&(field.grid as u64).to_le_bytes())?;
    w.write_all(&field.box_length.to_le_bytes())?;
    w.write_all(&(field.real_data as u64).to_le_bytes())?;
    for z in &field.coeffs {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field(path: &Path) -> Result<SpectralField, LpError> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut u64buf = [0u8; 8];
    let mut read_u64 = |r: &mut dyn Read| -> Result<u64, LpError> {
        r.read_exact(&mut u64buf)?;
        Ok(u64::from_le_bytes(u64buf))
    };
    let d = read_u64(&mut r)? as usize;
    let n_comp = read_u64(&mut r)? as usize;
    let grid = read_u64(&mut r)? as usize;
    let mut f64buf = [0u8; 8];
    r.read_exact(&mut f64buf)?;
    let box_length = f64::from_le_bytes(f64buf);
    r.read_exact(&mut f64buf)?;
    let real_data = u64::from_le_bytes(f64buf) != 0;
    if d == 0 || d > 4 || !grid.is_power_of_two() || !(box_length > 0.0) {
        return Err(LpError::MalformedField(format!(
            "implausible header: d={d}, grid={grid}, L={box_length}"
        )));
    }
    let mut field = SpectralField::zeros(d, n_comp, grid, box_length, real_data);
    let mut bytes = vec![0u8; 16 * field.coeffs.len()];
    r.read_exact(&mut bytes)?;
    for (i, chunk) in bytes.chunks_exact(16).enumerate() {
        let re = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
        field.coeffs[i] = complex(re, im);
    }
    Ok(field)
}
