//! Empirical regularity exponents (ball growth α, Fourier decay β,
//! Billingsley-point growth γ) and exact exponent calculators.

mod ranges;

use serde::{Deserialize, Serialize};

use crate::balls::{all_ball_masses, ball_mass_at, max_ball_mass};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::fit::{loglog, FitWindow, LineFit};
use crate::measure::DiscreteMeasure;
use crate::spectral::Spectrum;

pub use ranges::{
    exponent_identity, knapp_bound, mockenhaupt_p0, near_half_range, stein_tomas, theorem_range,
    ExponentParams, ExponentRange,
};

/// A fitted power law over a series of scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleFit {
    pub scales: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: LineFit,
    pub unreliable: bool,
}

impl ScaleFit {
    fn new(scales: Vec<f64>, values: Vec<f64>, window: FitWindow, tol: &Tolerances) -> Result<ScaleFit> {
        let fit = loglog(&scales, &values, window)?;
        let unreliable = fit.residual > tol.fit_residual_flag;
        Ok(ScaleFit {
            scales,
            values,
            fit,
            unreliable,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub alpha_hat: f64,
    /// Scale window `(min r, max r)` the estimate is based on.
    pub window: (f64, f64),
    /// Largest ball mass per scale.
    pub max_mass: ScaleFit,
    /// Constant `C` in `μ(B) <= C r^α` at the fitted exponent.
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub beta_hat: f64,
    /// Estimate from annulus averages of `|μ̂|^2`.
    pub beta_hat_average: f64,
    pub sup: ScaleFit,
    pub average: ScaleFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub gamma_hat: f64,
    /// Arg-max centre at the finest scale, as a grid index vector.
    pub center: Vec<usize>,
    pub max_mass: Vec<f64>,
    /// Ball masses around `center`.
    pub at_center: ScaleFit,
}

/// Aggregate of whichever estimators were run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub alpha_hat: Option<f64>,
    pub beta_hat: Option<f64>,
    pub gamma_hat: Option<f64>,
    pub alpha: Option<AlphaEstimate>,
    pub beta: Option<BetaEstimate>,
    pub gamma: Option<GammaEstimate>,
}

/// Dyadic radii `2^{-2}, …, 8/N`. Radii below eight cells are left out:
/// there the extra centre cell of a closed ball biases the slope.
pub fn default_scales(n: usize) -> Vec<f64> {
    let top = n.trailing_zeros() as i32 - 3;
    (2..=top).map(|j| 2f64.powi(-j)).collect()
}

fn check_scales(mu: &DiscreteMeasure, scales: &[f64]) -> Result<()> {
    if scales.len() < 3 {
        return Err(Error::TooFewPoints { got: scales.len(), need: 3 });
    }
    let n = mu.n() as f64;
    for &r in scales {
        let dyadic = r > 0.0 && r.log2().fract() == 0.0;
        if !dyadic || r <= 1.0 / n || r > 0.25 {
            return Err(Error::InvalidArgument(format!(
                "scale {r} must be dyadic and lie in (1/N, 1/4] with N = {n}"
            )));
        }
    }
    Ok(())
}

/// Sorts scales from coarse to fine.
fn ordered(scales: &[f64]) -> Vec<f64> {
    let mut s = scales.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// `α̂`: slope of `log max_x μ(B(x, r))` against `log r`.
pub fn ahlfors_alpha(mu: &DiscreteMeasure, scales: &[f64], tol: &Tolerances) -> Result<AlphaEstimate> {
    check_scales(mu, scales)?;
    let scales = ordered(scales);
    let w = mu.dense();
    let g = mu.grid();
    let masses: Vec<f64> = scales
        .iter()
        .map(|&r| max_ball_mass(&w, g, r * g.n as f64).0)
        .collect();
    let fit = ScaleFit::new(scales.clone(), masses, FitWindow::DropEnds, tol)?;
    let alpha_hat = fit.fit.slope;
    let constant = fit
        .scales
        .iter()
        .zip(&fit.values)
        .map(|(r, m)| m / r.powf(alpha_hat))
        .fold(0.0, f64::max);
    Ok(AlphaEstimate {
        alpha_hat,
        window: (*scales.last().unwrap(), scales[0]),
        max_mass: fit,
        constant,
    })
}

/// `β̂`: negative slope of `log sup_{|k| ∈ annulus} |μ̂(k)|^2` against
/// `log |k|` over annuli `[b^i, b^{i+1})` inside `|k| <= K`. Each annulus
/// contributes the frequency where its supremum is attained; the average
/// variant uses the geometric mid-radius.
pub fn fourier_beta(spec: &Spectrum, base: f64, tol: &Tolerances) -> Result<BetaEstimate> {
    if spec.k_max < 16 {
        return Err(Error::InvalidArgument(format!("need K >= 16, got {}", spec.k_max)));
    }
    if !(base > 1.0) {
        return Err(Error::InvalidArgument(format!("annulus base {base} must exceed 1")));
    }
    let mut edges = vec![1.0f64];
    while edges.last().unwrap() * base <= spec.k_max as f64 + 1e-9 {
        let next = edges.last().unwrap() * base;
        edges.push(next);
    }
    let count = edges.len() - 1;
    if count < 3 {
        return Err(Error::TooFewPoints { got: count, need: 3 });
    }
    let mut sup = vec![0.0f64; count];
    let mut sup_at = vec![0.0f64; count];
    let mut sum = vec![0.0f64; count];
    let mut num = vec![0usize; count];
    for (k, c) in spec.iter() {
        let radius = ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
        if radius < 1.0 || radius >= edges[count] {
            continue;
        }
        let a = edges.partition_point(|&e| e <= radius) - 1;
        let v = c.norm_sqr();
        if v > sup[a] {
            sup[a] = v;
            sup_at[a] = radius;
        }
        sum[a] += v;
        num[a] += 1;
    }
    let radii: Vec<f64> = (0..count).map(|i| (edges[i] * edges[i + 1]).sqrt()).collect();
    for i in 0..count {
        if sup[i] == 0.0 {
            return Err(Error::ZeroAnnulus(edges[i]));
        }
    }
    let avg: Vec<f64> = sum.iter().zip(&num).map(|(s, &n)| s / n as f64).collect();
    let sup_fit = ScaleFit::new(sup_at, sup, FitWindow::DropEnds, tol)?;
    let avg_fit = ScaleFit::new(radii, avg, FitWindow::DropEnds, tol)?;
    Ok(BetaEstimate {
        beta_hat: -sup_fit.fit.slope,
        beta_hat_average: -avg_fit.fit.slope,
        sup: sup_fit,
        average: avg_fit,
    })
}

/// `γ̂`: growth exponent of `μ(B(x₀, r))` at the centre `x₀` maximizing the
/// ball mass at the finest scale.
pub fn billingsley_gamma(mu: &DiscreteMeasure, scales: &[f64], tol: &Tolerances) -> Result<GammaEstimate> {
    check_scales(mu, scales)?;
    let scales = ordered(scales);
    let w = mu.dense();
    let g = mu.grid();
    let cells = |r: f64| r * g.n as f64;
    let max_mass: Vec<f64> = scales.iter().map(|&r| max_ball_mass(&w, g, cells(r)).0).collect();
    let finest = cells(*scales.last().unwrap());
    let (best, _) = max_ball_mass(&w, g, finest);
    // among maximizing centres prefer the heaviest cell, then the first
    let x0 = all_ball_masses(&w, g, finest)
        .iter()
        .enumerate()
        .filter(|(_, &m)| m >= best * (1.0 - 1e-12))
        .fold((usize::MAX, -1.0), |acc, (i, _)| if w[i] > acc.1 { (i, w[i]) } else { acc })
        .0;
    let at: Vec<f64> = scales.iter().map(|&r| ball_mass_at(&w, g, x0, cells(r))).collect();
    let fit = ScaleFit::new(scales, at, FitWindow::DropEnds, tol)?;
    Ok(GammaEstimate {
        gamma_hat: fit.fit.slope,
        center: g.index_vec(x0),
        max_mass,
        at_center: fit,
    })
}
