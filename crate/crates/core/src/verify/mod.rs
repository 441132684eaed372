//! Checkers for the inequalities behind the restriction theorem, evaluated
//! on concrete discrete instances.
//!
//! Norms on the torus grid use normalized cell volume `N^{-dim}`; sums over
//! the dual grid use counting measure. Every inequality of the finite group
//! then holds exactly, so any negative slack beyond round-off is a bug.

mod bilinear;
mod chain;
mod hausdorff_young;
mod knapp;
mod trends;
mod suite;

pub use bilinear::check_bilinear;
pub use chain::{check_dual_chain, materialized_pair_convolution, ChainInstance, ChainReport, OracleComparison};
pub use hausdorff_young::{check_hausdorff_young_grid, check_hausdorff_young_lattice};
pub use knapp::{fejer_bump, knapp_test, KnappReport};
pub use trends::{check_regularity_transfer, check_fourier_sums, check_autocorrelation_growth, greedy_packing, RegularityTransferReport, FourierSumReport, AutocorrelationGrowthReport};
pub use suite::{run_suite, Instance, Suite, SuiteParams, SuiteReport};

pub use crate::regularity::exponent_identity;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::grid::{self, Grid};
use crate::norms::uniform_lp;

/// One evaluated inequality `lhs <= rhs` (or identity `lhs = rhs`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub identity: bool,
    pub holds: bool,
}

impl InequalityCheck {
    /// `lhs <= rhs` up to `rel · max(|lhs|, |rhs|, 1)`.
    pub fn inequality(name: &str, lhs: f64, rhs: f64, rel: f64) -> InequalityCheck {
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        let slack = rhs - lhs;
        InequalityCheck {
            name: name.to_string(),
            lhs,
            rhs,
            slack,
            identity: false,
            holds: slack.is_finite() && slack >= -rel * scale,
        }
    }

    /// `lhs = rhs` up to `rel · max(|lhs|, |rhs|, 1)`.
    pub fn identity(name: &str, lhs: f64, rhs: f64, rel: f64) -> InequalityCheck {
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        let slack = rhs - lhs;
        InequalityCheck {
            name: name.to_string(),
            lhs,
            rhs,
            slack,
            identity: true,
            holds: slack.is_finite() && slack.abs() <= rel * scale,
        }
    }
}

/// Coefficients `f̂(k) = N^{-dim} Σ_x f(x) e^{-2πi<k,x>/N}` of a grid density.
pub(crate) fn coefficients(values: &[Complex64], g: Grid) -> Vec<Complex64> {
    let mut a = values.to_vec();
    grid::forward(&mut a, g);
    let v = g.volume_factor();
    a.iter_mut().for_each(|x| *x /= v);
    a
}

/// Density with the given coefficients: `f(x) = Σ_k c(k) e^{2πi<k,x>/N}`.
pub(crate) fn synthesize(coeffs: &[Complex64], g: Grid) -> Vec<Complex64> {
    let mut a = coeffs.to_vec();
    grid::inverse(&mut a, g);
    let v = g.volume_factor();
    a.iter_mut().for_each(|x| *x *= v);
    a
}

/// `‖f‖_{L^p}` over the grid with normalized cell volume.
pub(crate) fn grid_norm(values: &[f64], g: Grid, p: f64) -> f64 {
    uniform_lp(values, 1.0 / g.volume_factor(), p)
}

pub(crate) fn moduli(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|c| c.norm()).collect()
}

/// Complex Gaussian samples, rescaled onto the disc of radius `clip` where
/// they exceed it.
pub(crate) fn random_complex(len: usize, seed: u64, clip: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let z = Complex64::new(re, im);
            if z.norm() > clip {
                z * (clip / z.norm())
            } else {
                z
            }
        })
        .collect()
}
