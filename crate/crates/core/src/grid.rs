//! Torus grid geometry and dense FFT helpers.
//!
//! A grid of resolution `n` in dimension `dim` has `n^dim` cells; cell
//! `(i0, i1)` has linear index `i0 * n + i1` and sits at `(i0/n, i1/n)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on dense grid cells (`n^dim`).
pub const MAX_GRID_CELLS: usize = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub n: usize,
}

impl Grid {
    pub fn new(dim: usize, n: usize) -> Result<Grid> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidArgument(format!("dim must be 1 or 2, got {dim}")));
        }
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "resolution must be a power of two, got {n}"
            )));
        }
        let cells = n.checked_pow(dim as u32).unwrap_or(usize::MAX);
        if cells > MAX_GRID_CELLS {
            return Err(Error::BudgetExceeded {
                name: "grid_cells",
                requested: cells,
                limit: MAX_GRID_CELLS,
            });
        }
        Ok(Grid { dim, n })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `n^dim` as a float, the reciprocal of the cell volume.
    pub fn volume_factor(&self) -> f64 {
        (self.n as f64).powi(self.dim as i32)
    }

    pub fn coords(&self, linear: usize) -> [usize; 2] {
        if self.dim == 1 {
            [linear, 0]
        } else {
            [linear / self.n, linear % self.n]
        }
    }

    pub fn linear(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.dim || coords.iter().any(|&c| c >= self.n) {
            return Err(Error::IndexOutOfRange {
                index: coords.to_vec(),
                n: self.n,
            });
        }
        Ok(if self.dim == 1 {
            coords[0]
        } else {
            coords[0] * self.n + coords[1]
        })
    }

    /// Linear index of `coords` reduced modulo `n` (accepts negatives).
    pub fn wrap(&self, coords: &[i64]) -> usize {
        let n = self.n as i64;
        let c0 = coords[0].rem_euclid(n) as usize;
        if self.dim == 1 {
            c0
        } else {
            c0 * self.n + coords[1].rem_euclid(n) as usize
        }
    }

    pub fn index_vec(&self, linear: usize) -> Vec<usize> {
        self.coords(linear)[..self.dim].to_vec()
    }

    /// Wrap-around distance between two cells, in cells (Euclidean in dim 2).
    pub fn torus_distance(&self, a: usize, b: usize) -> f64 {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let mut s = 0.0;
        for axis in 0..self.dim {
            let d = ca[axis].abs_diff(cb[axis]);
            let d = d.min(self.n - d) as f64;
            s += d * d;
        }
        s.sqrt()
    }
}

/// Table of `e^{2πi t/n}` for `t in 0..n`.
#[derive(Clone, Debug)]
pub struct Twiddles {
    n: usize,
    table: Vec<Complex64>,
}

impl Twiddles {
    pub fn new(n: usize) -> Twiddles {
        let table = (0..n)
            .map(|t| {
                let (s, c) = (2.0 * PI * t as f64 / n as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        Twiddles { n, table }
    }

    /// `e^{2πi t/n}` for any integer `t`.
    #[inline]
    pub fn at(&self, t: i64) -> Complex64 {
        self.table[t.rem_euclid(self.n as i64) as usize]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

fn fft_axis(data: &mut [Complex64], grid: Grid, inverse: bool) {
    let n = grid.n;
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    if grid.dim == 1 {
        fft.process(data);
        return;
    }
    // rows are contiguous
    fft.process(data);
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            column[r] = data[r * n + c];
        }
        fft.process(&mut column);
        for r in 0..n {
            data[r * n + c] = column[r];
        }
    }
}

/// Unnormalized forward DFT: `F(k) = Σ_j a_j e^{-2πi<k,j>/n}`.
pub fn forward(data: &mut [Complex64], grid: Grid) {
    debug_assert_eq!(data.len(), grid.len());
    fft_axis(data, grid, false);
}

/// Inverse DFT including the `1/n^dim` factor.
pub fn inverse(data: &mut [Complex64], grid: Grid) {
    debug_assert_eq!(data.len(), grid.len());
    fft_axis(data, grid, true);
    let scale = 1.0 / grid.volume_factor();
    for v in data.iter_mut() {
        *v *= scale;
    }
}

pub fn to_complex(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Circular convolution of two dense grids (plain sums, no volume factor).
pub fn circular_convolve(a: &[Complex64], b: &[Complex64], grid: Grid) -> Vec<Complex64> {
    let mut fa = a.to_vec();
    let mut fb = b.to_vec();
    forward(&mut fa, grid);
    forward(&mut fb, grid);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inverse(&mut fa, grid);
    fa
}
