//! Numerical toolkit for symmetric hyperbolic systems with a partially
//! diffusive second-order part.
//!
//! The crate assembles frequency symbols of such systems from their
//! coefficient matrices, decides strict dissipativity through the
//! Shizuta-Kawashima/Kalman rank machinery, certifies frequency-wise
//! hypocoercive Lyapunov functionals, and evolves the linearized dynamics
//! exactly per Fourier mode on periodic grids. Littlewood-Paley blocks and
//! hybrid low/high Besov semi-norms measure the resulting decay.
//!
//! Module map:
//! * [`system`] — system descriptions and frequency symbols, structural checks
//! * [`sk`] — Kalman rank test, eigenvector oracle, sphere sweeps
//! * [`lyapunov`] — Lyapunov functional certification and decay envelopes
//! * [`lp`] — dyadic blocks, hybrid Besov norms, field storage and IO
//! * [`sim`] — per-mode semigroup evolution, parabolic mode, decay fits
//! * [`zoo`] — concrete model constructors (toy, barotropic flow, MHD)

pub mod linalg;
pub mod lp;
pub mod lyapunov;
pub mod sim;
pub mod sk;
pub mod sphere;
pub mod system;
pub mod zoo;

pub use linalg::{C64, CMat, CVec, RMat, RVec};
