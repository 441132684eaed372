use num_complex::Complex64;

use crate::config::Budgets;
use crate::error::{Error, Result};
use crate::grid::Twiddles;
use crate::measure::DiscreteMeasure;
use crate::norms::weighted_lp;

/// Dense pairing of dual-lattice points `x ∈ [-X, X]^dim` with the atoms
/// `ξ_j = j/N` of a measure: `e(x, j) = exp(2πi<x, ξ_j>)`.
///
/// The restriction `R f(ξ_j) = Σ_x f(x) e^{-2πi<x, ξ_j>}` is the conjugate
/// transpose; the extension is `E g = e · (w ⊙ g)`.
#[derive(Clone, Debug)]
pub struct ExtensionOperator {
    dim: usize,
    x_max: usize,
    lattice: Vec<[i64; 2]>,
    weights: Vec<f64>,
    entries: Vec<Complex64>,
}

/// Lattice points of `[-X, X]^dim` in lexicographic order.
pub fn lattice_points(dim: usize, x_max: usize) -> Vec<[i64; 2]> {
    let x = x_max as i64;
    if dim == 1 {
        (-x..=x).map(|a| [a, 0]).collect()
    } else {
        (-x..=x).flat_map(|a| (-x..=x).map(move |b| [a, b])).collect()
    }
}

impl ExtensionOperator {
    pub fn assemble(mu: &DiscreteMeasure, x_max: usize, budgets: &Budgets) -> Result<ExtensionOperator> {
        let g = mu.grid();
        let rows = (2 * x_max + 1).pow(g.dim as u32);
        let cols = mu.len();
        if cols > budgets.max_atoms {
            return Err(Error::BudgetExceeded {
                name: "max_atoms",
                requested: cols,
                limit: budgets.max_atoms,
            });
        }
        let size = rows.saturating_mul(cols);
        if size > budgets.max_matrix_entries {
            return Err(Error::BudgetExceeded {
                name: "max_matrix_entries",
                requested: size,
                limit: budgets.max_matrix_entries,
            });
        }
        let tw = Twiddles::new(g.n);
        let lattice = lattice_points(g.dim, x_max);
        let atoms: Vec<[usize; 2]> = mu.atoms().iter().map(|a| g.coords(a.0)).collect();
        let mut entries = Vec::with_capacity(size);
        for x in &lattice {
            for c in &atoms {
                entries.push(tw.at(x[0] * c[0] as i64 + x[1] * c[1] as i64));
            }
        }
        Ok(ExtensionOperator {
            dim: g.dim,
            x_max,
            lattice,
            weights: mu.atoms().iter().map(|a| a.1).collect(),
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x_max(&self) -> usize {
        self.x_max
    }

    pub fn rows(&self) -> usize {
        self.lattice.len()
    }

    pub fn cols(&self) -> usize {
        self.weights.len()
    }

    pub fn lattice(&self) -> &[[i64; 2]] {
        &self.lattice
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols() + col]
    }

    /// `(R f)_j = Σ_x conj(e(x, j)) f(x)`.
    pub fn restrict(&self, f: &[Complex64]) -> Vec<Complex64> {
        let cols = self.cols();
        let mut out = vec![Complex64::new(0.0, 0.0); cols];
        for (row, &fx) in self.entries.chunks_exact(cols).zip(f) {
            if fx == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, e) in out.iter_mut().zip(row) {
                *o += e.conj() * fx;
            }
        }
        out
    }

    /// Unweighted `z(x) = Σ_j e(x, j) y_j`; the extension is
    /// `extend_raw(w ⊙ g)`.
    pub fn extend_raw(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.entries
            .chunks_exact(self.cols())
            .map(|row| row.iter().zip(y).map(|(e, v)| e * v).sum())
            .collect()
    }

    /// `(E g)(x) = Σ_j w_j g_j e^{2πi<x, ξ_j>}`.
    pub fn extend(&self, g: &[Complex64]) -> Vec<Complex64> {
        let y: Vec<Complex64> = g.iter().zip(&self.weights).map(|(v, w)| v * *w).collect();
        self.extend_raw(&y)
    }

    /// `‖R f‖_{L^q(μ)} / ‖f‖_{ℓ^p}`.
    pub fn rayleigh(&self, f: &[Complex64], p: f64, q: f64) -> f64 {
        let u = self.restrict(f);
        let num = weighted_lp(&abs(&u), &self.weights, q);
        let den = weighted_lp(&abs(f), &vec![1.0; f.len()], p);
        num / den
    }

    pub(crate) fn rayleigh_fn(&self) -> impl Fn(&[Complex64]) -> f64 + '_ {
        move |f| self.rayleigh(f, 2.0, 2.0)
    }

    /// Zero-pads a witness from a smaller lattice `[-X', X']^dim`.
    pub fn embed(&self, f: &[Complex64], from_x_max: usize) -> Result<Vec<Complex64>> {
        if from_x_max > self.x_max || f.len() != (2 * from_x_max + 1).pow(self.dim as u32) {
            return Err(Error::InvalidArgument("witness does not fit the lattice".into()));
        }
        let small = lattice_points(self.dim, from_x_max);
        let side = (2 * self.x_max + 1) as i64;
        let xm = self.x_max as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows()];
        for (x, v) in small.iter().zip(f) {
            let o = if self.dim == 1 {
                x[0] + xm
            } else {
                (x[0] + xm) * side + x[1] + xm
            };
            out[o as usize] = *v;
        }
        Ok(out)
    }
}

pub(crate) fn abs(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|c| c.norm()).collect()
}
