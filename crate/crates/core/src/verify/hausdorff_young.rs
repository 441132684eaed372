use num_complex::Complex64;

use super::{coefficients, grid_norm, moduli, InequalityCheck};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::Grid;
use crate::norms::uniform_lp;

fn require_s(s: Exponent) -> Result<()> {
    if s < Exponent::int(2) {
        return Err(Error::InvalidArgument(format!("Hausdorff-Young needs s >= 2, got {s}")));
    }
    Ok(())
}

/// `‖f̂‖_{ℓ^s} <= ‖f‖_{L^{s'}}` for a density on the torus grid; equality
/// at `s = 2`.
pub fn check_hausdorff_young_grid(g: Grid, density: &[Complex64], s: Exponent, rel: f64) -> Result<InequalityCheck> {
    require_s(s)?;
    if density.len() != g.len() {
        return Err(Error::InvalidArgument("density does not match the grid".into()));
    }
    let c = coefficients(density, g);
    let lhs = uniform_lp(&moduli(&c), 1.0, s.to_f64());
    let rhs = grid_norm(&moduli(density), g, s.conj().to_f64());
    Ok(if s == Exponent::int(2) {
        InequalityCheck::identity("hausdorff_young", lhs, rhs, rel)
    } else {
        InequalityCheck::inequality("hausdorff_young", lhs, rhs, rel)
    })
}

/// `‖f̂‖_{L^s(T^dim)} <= ‖f‖_{ℓ^{s'}}` for `f` on the lattice `[-X, X]^dim`.
/// The transform is sampled on the smallest dyadic grid with more than
/// `2X + 1` points per axis, where the sampled norm is the norm on the
/// corresponding finite group (exact at `s = 2`).
pub fn check_hausdorff_young_lattice(
    dim: usize,
    x_max: usize,
    f: &[Complex64],
    s: Exponent,
    rel: f64,
) -> Result<InequalityCheck> {
    require_s(s)?;
    let side = 2 * x_max + 1;
    if f.len() != side.pow(dim as u32) {
        return Err(Error::InvalidArgument("lattice vector has the wrong length".into()));
    }
    let n = (side + 1).next_power_of_two();
    let g = Grid::new(dim, n)?;
    let mut a = vec![Complex64::new(0.0, 0.0); g.len()];
    let x = x_max as i64;
    for (i, v) in f.iter().enumerate() {
        let idx = if dim == 1 {
            g.wrap(&[i as i64 - x])
        } else {
            g.wrap(&[(i / side) as i64 - x, (i % side) as i64 - x])
        };
        a[idx] = *v;
    }
    crate::grid::forward(&mut a, g);
    let lhs = grid_norm(&moduli(&a), g, s.to_f64());
    let rhs = uniform_lp(&moduli(f), 1.0, s.conj().to_f64());
    Ok(if s == Exponent::int(2) {
        InequalityCheck::identity("hausdorff_young", lhs, rhs, rel)
    } else {
        InequalityCheck::inequality("hausdorff_young", lhs, rhs, rel)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::random_complex;

    #[test]
    fn parseval_and_sup_bound() {
        let g = Grid::new(1, 64).unwrap();
        let f = random_complex(64, 3, 10.0);
        let c = check_hausdorff_young_grid(g, &f, Exponent::int(2), 1e-10).unwrap();
        assert!(c.holds && c.slack.abs() < 1e-10);
        let pos: Vec<Complex64> = (0..64).map(|i| Complex64::new(1.0 + (i % 5) as f64, 0.0)).collect();
        let c = check_hausdorff_young_grid(g, &pos, Exponent::INF, 1e-10).unwrap();
        assert!(c.slack.abs() < 1e-12);
        let c = check_hausdorff_young_lattice(1, 7, &random_complex(15, 1, 10.0), Exponent::int(2), 1e-10).unwrap();
        assert!(c.holds && c.slack.abs() < 1e-10);
    }

    #[test]
    fn rejects_small_s() {
        let g = Grid::new(1, 8).unwrap();
        assert!(check_hausdorff_young_grid(g, &[Complex64::new(1.0, 0.0); 8], Exponent::new(3, 2), 1e-10).is_err());
    }
}
