use serde::{Deserialize, Serialize};

use crate::balls::ball_mass_at;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::fit::{loglog, FitWindow, LineFit};
use crate::grid::Grid;
use crate::measure::DiscreteMeasure;
use crate::regularity::{ahlfors_alpha, AlphaEstimate};
use crate::spectral::{autocorrelation, convolve_power_with, Spectrum};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityTransferReport {
    pub n: u32,
    pub alpha_mu: AlphaEstimate,
    pub alpha_conv: AlphaEstimate,
    /// `α̂(μ^{*n}) / n - margin`.
    pub required: f64,
    pub passed: bool,
}

/// If `μ^{*n}` is `α`-regular then `μ` is `α/n`-regular: compares
/// `α̂(μ)` against `α̂(μ^{*n})/n` with the configured margin.
pub fn check_regularity_transfer(mu: &DiscreteMeasure, n: u32, scales: &[f64], tol: &Tolerances) -> Result<RegularityTransferReport> {
    let conv = convolve_power_with(mu, n, tol)?;
    let alpha_mu = ahlfors_alpha(mu, scales, tol)?;
    let alpha_conv = ahlfors_alpha(&conv, scales, tol)?;
    let required = alpha_conv.alpha_hat / n as f64 - tol.regularity_transfer_margin;
    Ok(RegularityTransferReport {
        n,
        passed: alpha_mu.alpha_hat >= required,
        alpha_mu,
        alpha_conv,
        required,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierSumReport {
    pub gamma: f64,
    pub s: f64,
    /// `2 dim / γ`; divergence is predicted for `s` below it.
    pub critical_s: f64,
    pub k_values: Vec<usize>,
    pub partial_sums: Vec<f64>,
    pub fit: LineFit,
    pub diverging: bool,
    /// Classification agrees with the prediction.
    pub consistent: bool,
}

/// Partial sums `Σ_{|k| <= K} |μ̂(k)|^s` over the listed cut-offs; a log-log
/// slope above the configured threshold reads as divergence.
pub fn check_fourier_sums(spec: &Spectrum, gamma: f64, s: f64, k_values: &[usize], tol: &Tolerances) -> Result<FourierSumReport> {
    if !(gamma > 0.0 && gamma < spec.dim as f64) {
        return Err(Error::InvalidArgument(format!("gamma {gamma} must lie in (0, {})", spec.dim)));
    }
    if !(s > 0.0) || s.is_infinite() {
        return Err(Error::InvalidArgument(format!("s {s} must be positive and finite")));
    }
    if k_values.len() < 3 || k_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("need at least three increasing cut-offs".into()));
    }
    if *k_values.last().unwrap() > spec.k_max {
        return Err(Error::InvalidArgument(format!(
            "cut-off {} exceeds the spectrum's K = {}",
            k_values.last().unwrap(),
            spec.k_max
        )));
    }
    let mut terms: Vec<(f64, f64)> = spec
        .iter()
        .map(|(k, c)| (((k[0] * k[0] + k[1] * k[1]) as f64).sqrt(), c.norm().powf(s)))
        .collect();
    terms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut partial_sums = Vec::with_capacity(k_values.len());
    let mut acc = 0.0;
    let mut it = terms.iter().peekable();
    for &k in k_values {
        while let Some(&&(radius, v)) = it.peek() {
            if radius > k as f64 + 1e-9 {
                break;
            }
            acc += v;
            it.next();
        }
        partial_sums.push(acc);
    }
    let ks: Vec<f64> = k_values.iter().map(|&k| k as f64).collect();
    let fit = loglog(&ks, &partial_sums, FitWindow::All)?;
    let diverging = fit.slope > tol.fourier_sum_slope;
    let critical_s = 2.0 * spec.dim as f64 / gamma;
    Ok(FourierSumReport {
        gamma,
        s,
        critical_s,
        k_values: k_values.to_vec(),
        partial_sums,
        consistent: diverging == (s < critical_s),
        fit,
        diverging,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingRecord {
    pub epsilon: f64,
    /// Number of disjoint balls of radius `ε/2` centred on atoms.
    pub balls: usize,
    /// `Σ_j μ(B_j)^2`, a lower bound for `μ*μ̃(B(0, ε))`.
    pub lower_bound: f64,
    pub autocorrelation_mass: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutocorrelationGrowthReport {
    pub gamma: f64,
    pub epsilons: Vec<f64>,
    pub masses: Vec<f64>,
    pub fit: LineFit,
    pub packings: Vec<PackingRecord>,
    pub passed: bool,
}

/// Greedy left-to-right packing of disjoint balls of radius `h` cells
/// centred on atoms. Returns the chosen centres.
pub fn greedy_packing(mu: &DiscreteMeasure, h: usize) -> Vec<usize> {
    let g = mu.grid();
    let mut chosen: Vec<usize> = Vec::new();
    for &(i, _) in mu.atoms() {
        if chosen.iter().all(|&c| g.torus_distance(c, i) > 2.0 * h as f64 + 1e-9) {
            chosen.push(i);
        }
    }
    chosen
}

fn cells(g: Grid, r: f64) -> f64 {
    r * g.n as f64
}

/// `μ*μ̃(B(0, ε))` across scales with its fitted exponent; passes when the
/// exponent stays below `γ + margin` and every packing lower bound holds.
pub fn check_autocorrelation_growth(mu: &DiscreteMeasure, gamma: f64, epsilons: &[f64], tol: &Tolerances) -> Result<AutocorrelationGrowthReport> {
    if epsilons.len() < 3 {
        return Err(Error::TooFewPoints {
            got: epsilons.len(),
            need: 3,
        });
    }
    let g = mu.grid();
    let ac = autocorrelation(mu)?.dense();
    let w = mu.dense();
    let mut eps = epsilons.to_vec();
    eps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let masses: Vec<f64> = eps.iter().map(|&e| ball_mass_at(&ac, g, 0, cells(g, e))).collect();
    let fit = loglog(&eps, &masses, FitWindow::DropEnds)?;
    let packings: Vec<PackingRecord> = eps
        .iter()
        .zip(&masses)
        .map(|(&e, &m)| {
            let h = (cells(g, e) / 2.0 + 1e-9).floor() as usize;
            let centres = greedy_packing(mu, h);
            let lower_bound: f64 = centres.iter().map(|&c| ball_mass_at(&w, g, c, h as f64).powi(2)).sum();
            PackingRecord {
                epsilon: e,
                balls: centres.len(),
                lower_bound,
                autocorrelation_mass: m,
                holds: lower_bound <= m * (1.0 + tol.slack_rel) + tol.slack_rel,
            }
        })
        .collect();
    let passed = fit.slope <= gamma + tol.autocorrelation_margin && packings.iter().all(|p| p.holds);
    Ok(AutocorrelationGrowthReport {
        gamma,
        epsilons: eps,
        masses,
        fit,
        packings,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{cantor, dirac, uniform};
    use crate::regularity::default_scales;
    use crate::spectral::{fourier, FourierMethod};

    #[test]
    fn regularity_transfer_examples() {
        let t = Tolerances::default();
        let u = uniform(1, 1024).unwrap();
        let r = check_regularity_transfer(&u, 2, &default_scales(1024), &t).unwrap();
        assert!(r.passed && (r.alpha_conv.alpha_hat - 1.0).abs() < 0.05);
        let d = dirac(1, 1024, &[3]).unwrap();
        let r = check_regularity_transfer(&d, 2, &default_scales(1024), &t).unwrap();
        assert!(r.passed && r.alpha_mu.alpha_hat.abs() < 1e-9);
    }

    #[test]
    fn fourier_sums_of_dirac_always_diverge() {
        let d = dirac(1, 256, &[0]).unwrap();
        let spec = fourier(&d, 128, FourierMethod::Fft).unwrap();
        for s in [1.0, 4.0, 16.0] {
            let r = check_fourier_sums(&spec, 0.5, s, &[8, 16, 32, 64], &Tolerances::default()).unwrap();
            assert!(r.diverging && (r.fit.slope - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn autocorrelation_growth_uniform_and_dirac() {
        let t = Tolerances::default();
        let u = uniform(1, 1024).unwrap();
        let r = check_autocorrelation_growth(&u, 1.0, &default_scales(1024), &t).unwrap();
        assert!((r.fit.slope - 1.0).abs() < 0.05 && r.passed, "{r:?}");
        let d = dirac(1, 1024, &[3]).unwrap();
        let r = check_autocorrelation_growth(&d, 0.0, &default_scales(1024), &t).unwrap();
        assert!(r.fit.slope.abs() < 1e-9 && r.passed);
    }

    #[test]
    fn packing_is_disjoint_and_maximal() {
        let mu = cantor(4, &[0, 1, 3], 4).unwrap();
        let g = mu.grid();
        let c = greedy_packing(&mu, 3);
        for (i, a) in c.iter().enumerate() {
            for b in &c[i + 1..] {
                assert!(g.torus_distance(*a, *b) > 6.0);
            }
        }
        for &(i, _) in mu.atoms() {
            assert!(c.iter().any(|&x| g.torus_distance(x, i) <= 6.0));
        }
    }
}
