//! Typed configuration for the batch commands: a flat TOML document with
//! sections `[model]`, `[sphere]`, `[rho_grid]`, `[grid]`, `[sim]` and
//! `[lyapunov]`. One config drives one command.

use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelSection,
    #[serde(default)]
    pub sphere: SphereSection,
    #[serde(default)]
    pub rho_grid: RhoGridSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub lyapunov: LyapunovSection,
}

/// `name` picks a registered model; every other key is a numeric parameter
/// forwarded to the model constructor.
#[derive(Debug, Deserialize)]
pub struct ModelSection {
    pub name: String,
    #[serde(flatten)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereSection {
    /// Direction count; 0 means the per-dimension default.
    #[serde(default)]
    pub count: usize,
}

impl Default for SphereSection {
    fn default() -> Self {
        Self { count: 0 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoGridSection {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    /// Direction for the envelope sweep; defaults to the first axis.
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
}

impl Default for RhoGridSection {
    fn default() -> Self {
        Self { min: 1e-3, max: 1e3, points: 61, direction: None }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub resolution: usize,
    pub box_length: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { resolution: 64, box_length: 8.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    /// Final simulated time; 0 picks the decay-fit horizon of the box.
    #[serde(default)]
    pub t_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_spacing")]
    pub spacing: String,
    /// Initial data preset: "gaussian", "single-mode" or "random-band".
    #[serde(default = "default_initial")]
    pub initial: String,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Gaussian width in physical units.
    #[serde(default = "default_width")]
    pub width: f64,
    /// Wavevector of the single-mode preset.
    #[serde(default)]
    pub mode: Option<Vec<i64>>,
    /// Frequency band `[lo, hi]` of the random preset.
    #[serde(default)]
    pub band: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    /// Run the nonlinear barotropic stepper instead of the linear flow.
    #[serde(default)]
    pub nonlinear: bool,
    /// Internal step of the nonlinear stepper.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Split index between low and high frequencies.
    #[serde(default)]
    pub split_j: i32,
}

fn default_samples() -> usize {
    25
}
fn default_spacing() -> String {
    "log".into()
}
fn default_initial() -> String {
    "gaussian".into()
}
fn default_amplitude() -> f64 {
    1.0
}
fn default_width() -> f64 {
    2.0
}
fn default_dt() -> f64 {
    1e-2
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            t_max: 0.0,
            samples: default_samples(),
            spacing: default_spacing(),
            initial: default_initial(),
            amplitude: default_amplitude(),
            width: default_width(),
            mode: None,
            band: None,
            seed: 0,
            nonlinear: false,
            dt: default_dt(),
            split_j: 0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovSection {
    #[serde(default = "default_a")]
    pub a: i32,
    #[serde(default = "default_b")]
    pub b: i32,
    /// Positivity scale; 0 selects the natural scale of the diffusion
    /// symbol.
    #[serde(default)]
    pub kappa: f64,
    /// Directions certified jointly.
    #[serde(default = "default_directions")]
    pub directions: usize,
}

fn default_a() -> i32 {
    1
}
fn default_b() -> i32 {
    2
}
fn default_directions() -> usize {
    8
}

impl Default for LyapunovSection {
    fn default() -> Self {
        Self { a: default_a(), b: default_b(), kappa: 0.0, directions: default_directions() }
    }
}

impl Config {
    pub fn from_str(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}
