//! Fourier coefficients of measures, convolution powers and grid
//! `L^r` density norms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::{self, Twiddles};
use crate::measure::{Constructor, DiscreteMeasure};

/// Coefficients `μ̂(k)` for `k ∈ [-K, K]^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub dim: usize,
    pub k_max: usize,
    pub coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn side(&self) -> usize {
        2 * self.k_max + 1
    }

    fn offset(&self, k: &[i64]) -> Option<usize> {
        let km = self.k_max as i64;
        if k.len() != self.dim || k.iter().any(|&c| c < -km || c > km) {
            return None;
        }
        let side = self.side();
        let a = (k[0] + km) as usize;
        Some(if self.dim == 1 {
            a
        } else {
            a * side + (k[1] + km) as usize
        })
    }

    pub fn get(&self, k: &[i64]) -> Option<Complex64> {
        self.offset(k).map(|o| self.coeffs[o])
    }

    /// Iterates `(k, μ̂(k))` with `k` padded to two components.
    pub fn iter(&self) -> impl Iterator<Item = ([i64; 2], Complex64)> + '_ {
        let km = self.k_max as i64;
        let side = self.side();
        let dim = self.dim;
        self.coeffs.iter().enumerate().map(move |(o, &c)| {
            let k = if dim == 1 {
                [o as i64 - km, 0]
            } else {
                [(o / side) as i64 - km, (o % side) as i64 - km]
            };
            (k, c)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourierMethod {
    /// FFT when `K <= N/2`, direct sums otherwise.
    Auto,
    Fft,
    Direct,
}

fn dense_complex(mu: &DiscreteMeasure) -> Vec<Complex64> {
    let mut a = vec![Complex64::new(0.0, 0.0); mu.grid().len()];
    for &(i, w) in mu.atoms() {
        a[i] = Complex64::new(w, 0.0);
    }
    a
}

/// All `N^dim` coefficients `μ̂(k)`, `k ∈ Z_N^dim`, in grid order.
pub fn full_fourier(mu: &DiscreteMeasure) -> Vec<Complex64> {
    let mut a = dense_complex(mu);
    grid::forward(&mut a, mu.grid());
    a
}

/// `μ̂(k) = Σ_j w_j e^{-2πi<k, j/N>}` on `[-K, K]^dim`.
pub fn fourier(mu: &DiscreteMeasure, k_max: usize, method: FourierMethod) -> Result<Spectrum> {
    let g = mu.grid();
    let use_fft = match method {
        FourierMethod::Fft => {
            if 2 * k_max > g.n {
                return Err(Error::InvalidArgument(format!(
                    "FFT path needs K <= N/2 (K={k_max}, N={})",
                    g.n
                )));
            }
            true
        }
        FourierMethod::Direct => false,
        FourierMethod::Auto => 2 * k_max <= g.n,
    };
    let km = k_max as i64;
    let side = 2 * k_max + 1;
    let count = side.pow(g.dim as u32);
    let ks = (0..count).map(move |o| {
        if g.dim == 1 {
            [o as i64 - km, 0]
        } else {
            [(o / side) as i64 - km, (o % side) as i64 - km]
        }
    });
    let coeffs: Vec<Complex64> = if use_fft {
        let full = full_fourier(mu);
        ks.map(|k| full[g.wrap(&k[..g.dim])]).collect()
    } else {
        let tw = Twiddles::new(g.n);
        let atoms: Vec<([usize; 2], f64)> =
            mu.atoms().iter().map(|&(i, w)| (g.coords(i), w)).collect();
        ks.map(|k| {
            atoms
                .iter()
                .map(|(c, w)| *w * tw.at(-(k[0] * c[0] as i64 + k[1] * c[1] as i64)))
                .sum()
        })
        .collect()
    };
    Ok(Spectrum {
        dim: g.dim,
        k_max,
        coeffs,
    })
}

fn clip_to_weights(values: &[Complex64], clip_fail: f64) -> Result<Vec<f64>> {
    // entries at or below this magnitude are FFT noise on empty cells
    const NOISE_FLOOR: f64 = 1e-13;
    values
        .iter()
        .map(|v| {
            let x = v.re;
            if x < -clip_fail {
                Err(Error::ClipExceeded { magnitude: -x })
            } else if x <= NOISE_FLOOR {
                Ok(0.0)
            } else {
                Ok(x)
            }
        })
        .collect()
}

/// Circular convolution `μ * ν` of two measures on the same grid.
pub fn convolve(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if mu.grid() != nu.grid() {
        return Err(Error::InvalidArgument("convolution needs matching grids".into()));
    }
    let g = mu.grid();
    let c = grid::circular_convolve(&dense_complex(mu), &dense_complex(nu), g);
    let w = clip_to_weights(&c, Tolerances::default().clip_fail)?;
    DiscreteMeasure::from_dense(
        g,
        &w,
        mu.derived_meta(Constructor::Custom {
            label: "convolution".into(),
        }),
    )
}

pub fn convolve_power(mu: &DiscreteMeasure, n: u32) -> Result<DiscreteMeasure> {
    convolve_power_with(mu, n, &Tolerances::default())
}

/// `μ^{*n}` by FFT: transform, pointwise `n`-th power, inverse transform,
/// clip negative round-off and renormalize.
pub fn convolve_power_with(mu: &DiscreteMeasure, n: u32, tol: &Tolerances) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::InvalidArgument("convolution power needs n >= 1".into()));
    }
    let meta = mu.derived_meta(Constructor::ConvolutionPower {
        n,
        of: Box::new(mu.meta().constructor.clone()),
    });
    if n == 1 {
        return Ok(mu.clone().with_meta(meta));
    }
    let g = mu.grid();
    let mut a = full_fourier(mu);
    for v in a.iter_mut() {
        *v = v.powu(n);
    }
    grid::inverse(&mut a, g);
    let w = clip_to_weights(&a, tol.clip_fail)?;
    DiscreteMeasure::from_dense(g, &w, meta)
}

/// `μ * μ̃`, weights `Σ_{x - y = t} w_x w_y`.
pub fn autocorrelation(mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    let g = mu.grid();
    let mut a = full_fourier(mu);
    for v in a.iter_mut() {
        *v = Complex64::new(v.norm_sqr(), 0.0);
    }
    grid::inverse(&mut a, g);
    let w = clip_to_weights(&a, Tolerances::default().clip_fail)?;
    DiscreteMeasure::from_dense(
        g,
        &w,
        mu.derived_meta(Constructor::Autocorrelation {
            of: Box::new(mu.meta().constructor.clone()),
        }),
    )
}

/// Grid proxy for `||μ||_{L^r}`: weights are read as the density
/// `W_j N^dim` on cells of volume `N^{-dim}`.
pub fn density_norm(mu: &DiscreteMeasure, r: Exponent) -> Result<f64> {
    r.require_lebesgue("r")?;
    let vf = mu.grid().volume_factor();
    let max_density = mu.max_weight() * vf;
    match r {
        Exponent::Infinite => Ok(max_density),
        Exponent::Finite(_) => {
            let rf = r.to_f64();
            if max_density == 0.0 {
                return Ok(0.0);
            }
            let s: f64 = mu
                .atoms()
                .iter()
                .map(|&(_, w)| (w * vf / max_density).powf(rf))
                .sum::<f64>()
                / vf;
            Ok(max_density * s.powf(1.0 / rf))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flatness {
    pub max_offzero: f64,
    pub mean_offzero: f64,
    /// `max_offzero / mean_offzero`, or 0 when there is no off-zero mass.
    pub ratio: f64,
}

/// Statistics of `μ * μ̃` away from the zero difference.
pub fn flatness(mu: &DiscreteMeasure) -> Result<Flatness> {
    let ac = autocorrelation(mu)?;
    let cells = mu.grid().len();
    let off: Vec<f64> = ac.atoms().iter().filter(|a| a.0 != 0).map(|a| a.1).collect();
    let total: f64 = off.iter().sum();
    if cells < 2 || total == 0.0 {
        return Ok(Flatness {
            max_offzero: 0.0,
            mean_offzero: 0.0,
            ratio: 0.0,
        });
    }
    let max = off.iter().copied().fold(0.0, f64::max);
    let mean = total / (cells - 1) as f64;
    Ok(Flatness {
        max_offzero: max,
        mean_offzero: mean,
        ratio: max / mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{cantor, circle, dirac, uniform, Metadata};

    fn two_atoms(n: usize, a: usize, b: usize) -> DiscreteMeasure {
        DiscreteMeasure::normalized(
            crate::grid::Grid::new(1, n).unwrap(),
            vec![(a, 0.5), (b, 0.5)],
            Metadata::new(Constructor::Custom { label: "pair".into() }),
        )
        .unwrap()
    }

    #[test]
    fn dirac_transform_is_one() {
        let d = dirac(1, 64, &[0]).unwrap();
        for method in [FourierMethod::Fft, FourierMethod::Direct] {
            let s = fourier(&d, 32, method).unwrap();
            assert!(s.coeffs.iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-14));
        }
    }

    #[test]
    fn half_period_pair() {
        let m = two_atoms(64, 0, 32);
        let s = fourier(&m, 32, FourierMethod::Fft).unwrap();
        for (k, c) in s.iter() {
            let expect = (1.0 + if k[0] % 2 == 0 { 1.0 } else { -1.0 }) / 2.0;
            assert!((c.re - expect).abs() < 1e-14 && c.im.abs() < 1e-14);
        }
    }

    #[test]
    fn fft_and_direct_agree() {
        let c = circle(64, 0.3).unwrap();
        let a = fourier(&c, 32, FourierMethod::Fft).unwrap();
        let b = fourier(&c, 32, FourierMethod::Direct).unwrap();
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((x - y).norm() < 1e-10);
        }
        assert!(fourier(&c, 33, FourierMethod::Fft).is_err());
        // direct path accepts K beyond N/2 and is N-periodic
        let d = fourier(&cantor(4, &[0, 3], 2).unwrap(), 20, FourierMethod::Direct).unwrap();
        assert!((d.get(&[17]).unwrap() - d.get(&[1]).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn power_of_binomial_pair() {
        let m = two_atoms(64, 0, 1);
        let c = convolve_power(&m, 2).unwrap();
        let want = [(0usize, 0.25), (1, 0.5), (2, 0.25)];
        assert_eq!(c.len(), 3);
        for ((i, w), (j, v)) in c.atoms().iter().zip(want) {
            assert_eq!(*i, j);
            assert!((w - v).abs() < 1e-15);
        }
    }

    #[test]
    fn dirac_sums() {
        let a = dirac(1, 32, &[5]).unwrap();
        let b = dirac(1, 32, &[30]).unwrap();
        let c = convolve(&a, &b).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.atoms()[0].0, 3);
    }

    #[test]
    fn power_one_is_identity() {
        let m = cantor(4, &[0, 3], 3).unwrap();
        assert_eq!(convolve_power(&m, 1).unwrap().atoms(), m.atoms());
        assert!(convolve_power(&m, 0).is_err());
    }

    #[test]
    fn density_norm_examples() {
        let u = uniform(1, 256).unwrap();
        for r in [Exponent::one(), Exponent::new(3, 2), Exponent::int(2), Exponent::INF] {
            assert!((density_norm(&u, r).unwrap() - 1.0).abs() < 1e-12);
        }
        let d = dirac(2, 16, &[1, 2]).unwrap();
        assert_eq!(density_norm(&d, Exponent::INF).unwrap(), 256.0);
        assert!(density_norm(&d, Exponent::new(1, 2)).is_err());
    }

    #[test]
    fn flatness_examples() {
        let f = flatness(&uniform(1, 128).unwrap()).unwrap();
        assert!((f.ratio - 1.0).abs() < 1e-9);
        let f = flatness(&dirac(1, 128, &[3]).unwrap()).unwrap();
        assert_eq!(f.ratio, 0.0);
    }
}
