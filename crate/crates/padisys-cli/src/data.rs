//! Initial-data presets for the simulation command.

use crate::config::SimSection;
use crate::CliError;
use padisys::linalg::complex;
use padisys::lp::SpectralField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Build the initial field named by the config, deterministically in the
/// seed.
pub fn build_initial(
    sim: &SimSection,
    d: usize,
    n_comp: usize,
    grid: usize,
    box_length: f64,
    seed: u64,
) -> Result<SpectralField, CliError> {
    match sim.initial.as_str() {
        "gaussian" => {
            let w = sim.width;
            if w <= 0.0 {
                return Err(CliError::Config("gaussian width must be positive".into()));
            }
            let amp = sim.amplitude;
            let center = std::f64::consts::PI * box_length;
            Ok(SpectralField::from_physical_fn(d, n_comp, grid, box_length, |x, _| {
                let r2: f64 = x.iter().map(|&xi| (xi - center) * (xi - center)).sum();
                amp * (-r2 / (2.0 * w * w)).exp()
            }))
        }
        "single-mode" => {
            let mode: Vec<i64> = match &sim.mode {
                Some(m) => m.clone(),
                None => {
                    let mut m = vec![0i64; d];
                    m[0] = 1;
                    m
                }
            };
            if mode.len() != d {
                return Err(CliError::Config(format!(
                    "mode has {} entries for a {d}-dimensional grid",
                    mode.len()
                )));
            }
            if mode.iter().all(|&k| k == 0) {
                return Err(CliError::Config("single-mode wavevector must be nonzero".into()));
            }
            let g = grid as i64;
            let mut flat = 0usize;
            for &k in &mode {
                if k.abs() >= g / 2 {
                    return Err(CliError::Config(format!(
                        "mode component {k} outside the resolvable band of a {grid} grid"
                    )));
                }
                flat = flat * grid + (((k % g) + g) % g) as usize;
            }
            let mut f = SpectralField::zeros(d, n_comp, grid, box_length, false);
            for c in 0..n_comp {
                f.set_coeff(c, flat, complex(sim.amplitude, 0.0));
            }
            f.enforce_reality();
            Ok(f)
        }
        "random-band" => {
            let band = sim.band.clone().unwrap_or_else(|| vec![0.5, 2.0]);
            if band.len() != 2 || !(band[0] >= 0.0 && band[1] > band[0]) {
                return Err(CliError::Config("band must be [lo, hi] with 0 <= lo < hi".into()));
            }
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut f = SpectralField::zeros(d, n_comp, grid, box_length, false);
            let m = f.modes();
            for c in 0..n_comp {
                for flat in 0..m {
                    let rho = f.rho(flat);
                    if rho >= band[0] && rho <= band[1] {
                        let re: f64 = rng.gen_range(-1.0..1.0);
                        let im: f64 = rng.gen_range(-1.0..1.0);
                        f.set_coeff(c, flat, complex(sim.amplitude * re, sim.amplitude * im));
                    }
                }
            }
            f.enforce_reality();
            Ok(f)
        }
        "zero" => Ok(SpectralField::zeros(d, n_comp, grid, box_length, true)),
        other => Err(CliError::Config(format!("unknown initial-data preset `{other}`"))),
    }
}
