//! Experiment configuration: every tolerance, threshold and budget used by
//! the estimators, probes and checkers lives in one serializable record.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Weight-sum tolerance for probability measures.
    pub weight_sum: f64,
    /// Mass tolerance for mollified densities.
    pub density_mass: f64,
    /// Negative convolution round-off silently clipped below this magnitude.
    pub clip_silent: f64,
    /// Negative convolution round-off above this magnitude is an error.
    pub clip_fail: f64,
    /// Relative slack floor for chain and bilinear inequalities.
    pub slack_rel: f64,
    /// Relative slack floor for Hausdorff–Young trials.
    pub hy_rel: f64,
    /// Absolute tolerance for equality steps (identities, oracles).
    pub identity_abs: f64,
    /// RMS log-residual above which a fit is flagged unreliable.
    pub fit_residual_flag: f64,
    /// Growth slope below which a sweep cell is bounded.
    pub tau_bounded: f64,
    /// Growth slope above which a sweep cell is growing.
    pub tau_growing: f64,
    /// Allowed shortfall in `α(μ) >= α(μ^{*n})/n`.
    pub regularity_transfer_margin: f64,
    /// Partial-sum slope above which a Fourier L^s sum is diverging.
    pub fourier_sum_slope: f64,
    /// Allowed excess of the autocorrelation exponent over γ.
    pub autocorrelation_margin: f64,
    /// Knapp exponent below which the necessary condition is violated.
    pub knapp_violation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            weight_sum: 1e-12,
            density_mass: 1e-10,
            clip_silent: 1e-10,
            clip_fail: 1e-8,
            slack_rel: 1e-8,
            hy_rel: 1e-10,
            identity_abs: 1e-10,
            fit_residual_flag: 0.2,
            tau_bounded: 0.05,
            tau_growing: 0.10,
            regularity_transfer_margin: 0.1,
            fourier_sum_slope: 0.1,
            autocorrelation_margin: 0.1,
            knapp_violation: -0.05,
        }
    }
}

/// Settings of the alternating Hölder-alignment norm iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            restarts: 8,
            max_iters: 500,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    pub max_atoms: usize,
    pub max_matrix_entries: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_atoms: 1 << 22,
            max_matrix_entries: 1 << 24,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub probe: ProbeConfig,
    pub budgets: Budgets,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            tolerances: Tolerances::default(),
            probe: ProbeConfig::default(),
            budgets: Budgets::default(),
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    /// SHA-256 over the canonical JSON encoding, excluding the output
    /// directory (which does not influence results).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out_dir = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Deterministic 64-bit seed mixing (SplitMix64 finalizer).
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h ^= p.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(h << 6).wrapping_add(h >> 2);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}

/// Stable 64-bit digest of a string (FNV-1a), for seeding from labels.
pub fn label_seed(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_out_dir_but_not_seed() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.out_dir = Some("/tmp/x".into());
        assert_eq!(a.hash(), b.hash());
        b.seed = 7;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn partial_config_fills_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"seed": 3, "probe": {"restarts": 2}}"#).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.probe.restarts, 2);
        assert_eq!(c.probe.max_iters, 500);
        assert_eq!(c.tolerances.tau_bounded, 0.05);
    }

    #[test]
    fn seed_mixing_is_order_sensitive() {
        assert_ne!(mix_seed(&[1, 2]), mix_seed(&[2, 1]));
        assert_eq!(mix_seed(&[1, 2]), mix_seed(&[1, 2]));
    }
}
