//! Experiment configuration: JSON with strict key checking and full defaults.

use serde::{Deserialize, Serialize};

fn d_family() -> String {
    "srw".into()
}
fn d_n_grid() -> Vec<u64> {
    vec![400, 2500, 10_000]
}
fn d_eps_grid() -> Vec<f64> {
    vec![0.3, 0.5]
}
fn d_lambda_grid() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn d_horizon() -> f64 {
    1.0
}
fn d_samples() -> usize {
    20_000
}
fn d_seed() -> u64 {
    1
}
fn d_alpha() -> f64 {
    0.01
}
fn d_se_multiplier() -> f64 {
    3.0
}
fn d_t_cap() -> f64 {
    6.0
}
fn d_reference_n() -> u64 {
    250_000
}
fn d_ks_samples() -> usize {
    2_000
}
fn d_cap_steps() -> u64 {
    1 << 22
}
fn d_paths() -> usize {
    8
}
fn d_probe_n_grid() -> Vec<u64> {
    vec![100, 400]
}
fn d_probe_samples() -> usize {
    200
}
fn d_eta() -> f64 {
    0.2
}
fn d_delta_grid() -> Vec<f64> {
    vec![0.05, 0.1, 0.2]
}

/// Resolved experiment parameters. Unknown keys in the file are rejected;
/// every field has a default, so `{}` is a valid config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Process family: `srw` (scaled lazy simple random walk) or `custom`
    /// (point mass on an excursion read from `excursion_file`).
    #[serde(default = "d_family")]
    pub family: String,
    /// Scales `n` the experiment runs at.
    #[serde(default = "d_n_grid")]
    pub n_grid: Vec<u64>,
    /// Size thresholds ε.
    #[serde(default = "d_eps_grid")]
    pub eps_grid: Vec<f64>,
    /// Laplace arguments λ.
    #[serde(default = "d_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    /// Time window for path synthesis and path-wise probes.
    #[serde(default = "d_horizon")]
    pub horizon: f64,
    /// Monte-Carlo sample count for estimate-style checks.
    #[serde(default = "d_samples")]
    pub samples: usize,
    /// Base RNG seed (per-sample streams are derived from it).
    #[serde(default = "d_seed")]
    pub seed: u64,
    /// Kolmogorov-Smirnov significance level.
    #[serde(default = "d_alpha")]
    pub alpha: f64,
    /// Width, in standard errors, of the acceptance band around targets.
    #[serde(default = "d_se_multiplier")]
    pub se_multiplier: f64,
    /// Time budget after which a heavy-tailed excursion draw is censored.
    #[serde(default = "d_t_cap")]
    pub t_cap: f64,
    /// Reference scale the conditioned-law comparison is made against.
    #[serde(default = "d_reference_n")]
    pub reference_n: u64,
    /// Sample count per scale in the conditioned-law comparison.
    #[serde(default = "d_ks_samples")]
    pub ks_samples: usize,
    /// Hard step cap for individual excursion draws.
    #[serde(default = "d_cap_steps")]
    pub cap_steps: u64,
    /// Number of paths written per scale by `synthesize`.
    #[serde(default = "d_paths")]
    pub paths: usize,
    /// Scales for the per-path modulus probe (quadratic in breakpoints, so
    /// kept separate from `n_grid`).
    #[serde(default = "d_probe_n_grid")]
    pub probe_n_grid: Vec<u64>,
    /// Paths per scale in the modulus probe and counterexample demo.
    #[serde(default = "d_probe_samples")]
    pub probe_samples: usize,
    /// Oscillation level η in the modulus probe.
    #[serde(default = "d_eta")]
    pub eta: f64,
    /// Modulus window widths δ.
    #[serde(default = "d_delta_grid")]
    pub delta_grid: Vec<f64>,
    /// Excursion path file for the `custom` family (CSV + JSON sidecar).
    #[serde(default)]
    pub excursion_file: Option<String>,
    /// Holding rate at the anchor for the `custom` family.
    #[serde(default)]
    pub holding_rate: Option<f64>,
    /// Mass scale for the `custom` family.
    #[serde(default)]
    pub mass_scale: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config is valid")
    }
}

impl ExperimentConfig {
    /// Validates cross-field invariants not expressible through serde.
    pub fn validate(&self) -> Result<(), String> {
        if self.family != "srw" && self.family != "custom" {
            return Err(format!("unknown family `{}` (expected srw or custom)", self.family));
        }
        if self.family == "custom" && self.excursion_file.is_none() {
            return Err("family `custom` requires `excursion_file`".into());
        }
        if self.horizon <= 0.0 || !self.horizon.is_finite() {
            return Err("horizon must be positive and finite".into());
        }
        if self.n_grid.is_empty() || self.n_grid.iter().any(|&n| n == 0) {
            return Err("n_grid must be nonempty with positive scales".into());
        }
        if self.eps_grid.iter().any(|&e| e <= 0.0) {
            return Err("eps_grid entries must be positive".into());
        }
        if self.lambda_grid.iter().any(|&l| l <= 0.0) {
            return Err("lambda_grid entries must be positive".into());
        }
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err("alpha must lie in (0, 1)".into());
        }
        if self.se_multiplier <= 0.0 {
            return Err("se_multiplier must be positive".into());
        }
        if self.t_cap <= 0.0 {
            return Err("t_cap must be positive".into());
        }
        Ok(())
    }

    /// The provenance header written at the top of every report: the full
    /// resolved config as one JSON line, plus the effective seed.
    pub fn provenance(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("# config {json}\n# seed {}\n", self.seed)
    }
}
