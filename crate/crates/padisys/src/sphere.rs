//! Deterministic near-uniform sampling of unit spheres.
//!
//! The structural assumptions and the SK condition quantify over the whole
//! sphere; finite sweeps over these point sets are the numerical surrogate.

use crate::linalg::RVec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Default direction counts per spatial dimension.
pub fn default_count(d: usize) -> usize {
    match d {
        0 | 1 => 2,
        2 => 64,
        _ => 256,
    }
}

/// Deterministic sample of the unit sphere in `R^dim`.
///
/// * `dim = 1`: `{-1, +1}` regardless of `count`
/// * `dim = 2`: uniformly spaced angles
/// * `dim = 3`: Fibonacci spiral
/// * `dim > 3`: signed basis vectors plus fixed-seed normalized Gaussians
pub fn unit_sphere(dim: usize, count: usize) -> Vec<RVec> {
    assert!(dim >= 1, "sphere dimension must be at least 1");
    match dim {
        1 => vec![RVec::from_vec(vec![-1.0]), RVec::from_vec(vec![1.0])],
        2 => (0..count.max(1))
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * (k as f64) / (count.max(1) as f64);
                RVec::from_vec(vec![th.cos(), th.sin()])
            })
            .collect(),
        3 => fibonacci_sphere(count.max(1)),
        _ => {
            let mut pts = signed_basis(dim);
            let mut rng = ChaCha8Rng::seed_from_u64(0x5048_4552); // fixed: reproducible sweeps
            while pts.len() < 2 * dim + count {
                let v = RVec::from_fn(dim, |_, _| {
                    // Box-Muller from uniform draws keeps us independent of
                    // rand_distr.
                    let u1: f64 = rng.gen_range(1e-12..1.0);
                    let u2: f64 = rng.gen_range(0.0..1.0);
                    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                });
                let n = v.norm();
                if n > 1e-8 {
                    pts.push(v / n);
                }
            }
            pts
        }
    }
}

/// `unit_sphere` with the signed coordinate axes prepended. Quadratic-form
/// minimizers of the model systems sit on the axes, so including them makes
/// sampled ellipticity constants exact there.
pub fn unit_sphere_with_axes(dim: usize, count: usize) -> Vec<RVec> {
    if dim == 1 {
        return unit_sphere(1, count);
    }
    let mut pts = signed_basis(dim);
    pts.extend(unit_sphere(dim, count));
    pts
}

fn signed_basis(dim: usize) -> Vec<RVec> {
    let mut pts = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        for sign in [1.0, -1.0] {
            let mut v = RVec::zeros(dim);
            v[i] = sign;
            pts.push(v);
        }
    }
    pts
}

fn fibonacci_sphere(count: usize) -> Vec<RVec> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let th = 2.0 * std::f64::consts::PI * (k as f64) / golden;
            RVec::from_vec(vec![r * th.cos(), r * th.sin(), z])
        })
        .collect()
}
