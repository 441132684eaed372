use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::fit::{loglog, FitWindow, LineFit};
use crate::measure::DiscreteMeasure;
use crate::norms::{uniform_lp, weighted_lp};
use crate::probe::lattice_points;
use crate::regularity::{billingsley_gamma, GammaEstimate};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnappReport {
    pub p: Exponent,
    pub q: Exponent,
    pub amplitude: f64,
    pub gamma: GammaEstimate,
    pub radii: Vec<f64>,
    /// Lattice half-widths `L ≈ 1/r` of the test functions.
    pub half_widths: Vec<usize>,
    pub ratios: Vec<f64>,
    pub fit: LineFit,
    /// `γ̂/q - dim/p'`.
    pub predicted: f64,
    /// The ratio grows as `r → 0`: no uniform restriction constant.
    pub violated: bool,
}

/// Fejér kernel `Σ_{|x| <= L} (1 - |x|/(L+1)) e^{-2πixt}`.
fn fejer_kernel(half_width: usize, t: f64) -> f64 {
    let m = (half_width + 1) as f64;
    let s = (std::f64::consts::PI * t).sin();
    if s.abs() < 1e-12 {
        // t is (numerically) an integer
        return m;
    }
    let num = (std::f64::consts::PI * m * t).sin();
    num * num / (s * s * m)
}

/// Lattice function `amplitude · Π_i (1 - |x_i|/(L+1)) e^{2πi<x, x₀>}` on
/// `[-L, L]^dim`; its transform is a Fejér bump of width `~1/L` at `x₀`.
pub fn fejer_bump(dim: usize, half_width: usize, center: &[f64], amplitude: f64) -> Vec<Complex64> {
    let m = (half_width + 1) as f64;
    lattice_points(dim, half_width)
        .into_iter()
        .map(|x| {
            let mut a = amplitude;
            let mut phase = 0.0;
            for i in 0..dim {
                a *= 1.0 - (x[i].abs() as f64) / m;
                phase += x[i] as f64 * center[i];
            }
            Complex64::from_polar(a, 2.0 * std::f64::consts::PI * phase)
        })
        .collect()
}

/// Ratio `‖f̂‖_{L^q(μ)} / ‖f‖_{ℓ^p}` for Fejér bumps concentrating at the
/// Billingsley centre as `r → 0`, with its fitted exponent in `r`.
pub fn knapp_test(
    mu: &DiscreteMeasure,
    p: Exponent,
    q: Exponent,
    radii: &[f64],
    amplitude: f64,
    tol: &Tolerances,
) -> Result<KnappReport> {
    p.require_lebesgue("p")?;
    q.require_lebesgue("q")?;
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(Error::InvalidArgument(format!("amplitude {amplitude} must be positive")));
    }
    let gamma = billingsley_gamma(mu, radii, tol)?;
    let g = mu.grid();
    let dim = g.dim;
    let center: Vec<f64> = gamma.center.iter().map(|&c| c as f64 / g.n as f64).collect();
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let atoms: Vec<[f64; 2]> = mu
        .atoms()
        .iter()
        .map(|a| {
            let c = g.coords(a.0);
            [c[0] as f64 / g.n as f64, c[1] as f64 / g.n as f64]
        })
        .collect();
    let weights: Vec<f64> = mu.atoms().iter().map(|a| a.1).collect();
    let mut half_widths = Vec::with_capacity(radii.len());
    let mut ratios = Vec::with_capacity(radii.len());
    for &r in &radii {
        let l = (1.0 / r).round().max(1.0) as usize;
        // ℓ^p norm of the triangle profile (a product in dimension 2)
        let profile: Vec<f64> = (0..=2 * l)
            .map(|i| 1.0 - (i as f64 - l as f64).abs() / (l + 1) as f64)
            .collect();
        let one_axis = uniform_lp(&profile, 1.0, p.to_f64());
        let f_norm = amplitude * one_axis.powi(dim as i32);
        let values: Vec<f64> = atoms
            .iter()
            .map(|a| (0..dim).map(|i| fejer_kernel(l, a[i] - center[i])).product::<f64>() * amplitude)
            .collect();
        half_widths.push(l);
        ratios.push(weighted_lp(&values, &weights, q.to_f64()) / f_norm);
    }
    let fit = loglog(&radii, &ratios, FitWindow::DropEnds)?;
    let predicted = gamma.gamma_hat / q.to_f64() - dim as f64 / p.conj().to_f64();
    Ok(KnappReport {
        p,
        q,
        amplitude,
        violated: fit.slope < tol.knapp_violation,
        gamma,
        radii,
        half_widths,
        ratios,
        fit,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{cantor, uniform};
    use crate::regularity::default_scales;

    #[test]
    fn closed_form_matches_direct_sum() {
        let center = [0.3125];
        let f = fejer_bump(1, 6, &center, 1.0);
        for t in [0.0, 0.1, 0.3125, 0.77] {
            let direct: Complex64 = lattice_points(1, 6)
                .iter()
                .zip(&f)
                .map(|(x, v)| v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * x[0] as f64 * t))
                .sum();
            assert!((direct.re - fejer_kernel(6, t - center[0])).abs() < 1e-12);
            assert!(direct.im.abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_two_two_is_flat() {
        let u = uniform(1, 1024).unwrap();
        let two = Exponent::int(2);
        let r = knapp_test(&u, two, two, &default_scales(1024), 1.0, &Tolerances::default()).unwrap();
        assert!(r.fit.slope.abs() <= 0.05 && r.predicted.abs() < 0.05 && !r.violated, "{r:?}");
    }

    #[test]
    fn amplitude_does_not_matter() {
        let mu = cantor(4, &[0, 3], 5).unwrap();
        let radii: Vec<f64> = (1..=4).map(|j| 4f64.powi(-j)).collect();
        let p = Exponent::new(4, 3);
        let q = Exponent::int(4);
        let a = knapp_test(&mu, p, q, &radii, 1.0, &Tolerances::default()).unwrap();
        let b = knapp_test(&mu, p, q, &radii, 1234.5, &Tolerances::default()).unwrap();
        assert!((a.fit.slope - b.fit.slope).abs() < 1e-9);
    }
}
