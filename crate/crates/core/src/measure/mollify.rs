use serde::{Deserialize, Serialize};

use super::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Dense density on the torus grid with respect to normalized cell volume
/// `N^{-dim}`: `Σ values · N^{-dim} = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifiedDensity {
    pub grid: Grid,
    /// Kernel half-width in grid cells.
    pub epsilon: f64,
    pub values: Vec<f64>,
}

impl MollifiedDensity {
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.grid.volume_factor()
    }

    /// `∫ F dμ_ε` for a function sampled on the grid.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.values.iter().zip(f).map(|(m, x)| m * x).sum::<f64>() / self.grid.volume_factor()
    }

    /// Cell weights `values · N^{-dim}` (sum to one).
    pub fn cell_weights(&self) -> Vec<f64> {
        let v = self.grid.volume_factor();
        self.values.iter().map(|x| x / v).collect()
    }
}

/// One-dimensional triangular kernel `(1 - |t|/ε)_+` on integer offsets,
/// normalized to unit sum. Returned as `(offset, weight)` pairs.
pub fn triangle_kernel(epsilon: f64) -> Vec<(i64, f64)> {
    let reach = epsilon.ceil() as i64;
    let mut k: Vec<(i64, f64)> = (-reach..=reach)
        .map(|t| (t, (1.0 - (t as f64).abs() / epsilon).max(0.0)))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    let s: f64 = k.iter().map(|p| p.1).sum();
    for p in k.iter_mut() {
        p.1 /= s;
    }
    k
}

/// Circular convolution of the atom weights with the triangular
/// (Fejér-type) kernel of half-width `epsilon` cells, as a density.
pub fn mollify(mu: &DiscreteMeasure, epsilon: f64) -> Result<MollifiedDensity> {
    if !(epsilon >= 1.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be >= 1 cell")));
    }
    let g = mu.grid();
    let kernel = triangle_kernel(epsilon);
    let mut cells = vec![0.0; g.len()];
    for &(i, w) in mu.atoms() {
        let c = g.coords(i);
        if g.dim == 1 {
            for &(t, k) in &kernel {
                cells[g.wrap(&[c[0] as i64 + t])] += w * k;
            }
        } else {
            for &(t0, k0) in &kernel {
                for &(t1, k1) in &kernel {
                    cells[g.wrap(&[c[0] as i64 + t0, c[1] as i64 + t1])] += w * k0 * k1;
                }
            }
        }
    }
    let vf = g.volume_factor();
    Ok(MollifiedDensity {
        grid: g,
        epsilon,
        values: cells.into_iter().map(|x| x * vf).collect(),
    })
}
