use num_complex::Complex64;

use super::{coefficients, grid_norm, moduli, synthesize, InequalityCheck};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::measure::{mollify, DiscreteMeasure};
use crate::norms::weighted_lp;

/// `‖fμ_ε * gμ_ε‖_{L^p} <= ‖μ_ε*μ_ε‖_∞^{1/p'} ‖f‖_{L^p(μ_ε)} ‖g‖_{L^p(μ_ε)}`
/// for functions sampled on the measure's grid.
pub fn check_bilinear(
    mu: &DiscreteMeasure,
    f: &[Complex64],
    g_vals: &[Complex64],
    p: Exponent,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<InequalityCheck> {
    p.require_lebesgue("p")?;
    let grid = mu.grid();
    if f.len() != grid.len() || g_vals.len() != grid.len() {
        return Err(Error::InvalidArgument("f and g must be sampled on the measure's grid".into()));
    }
    let dens = mollify(mu, epsilon)?;
    let d = &dens.values;
    let cell_w = dens.cell_weights();
    let times = |v: &[Complex64]| -> Vec<Complex64> { v.iter().zip(d).map(|(a, b)| a * *b).collect() };
    let fc = coefficients(&times(f), grid);
    let gc = coefficients(&times(g_vals), grid);
    let prod: Vec<Complex64> = fc.iter().zip(&gc).map(|(a, b)| a * b).collect();
    let conv = synthesize(&prod, grid);
    let pf = p.to_f64();
    let lhs = grid_norm(&moduli(&conv), grid, pf);
    let dc: Vec<Complex64> = d.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let dd = coefficients(&dc, grid);
    let dd_sq: Vec<Complex64> = dd.iter().map(|v| v * v).collect();
    let dd_sup = synthesize(&dd_sq, grid).iter().map(|v| v.re).fold(0.0, f64::max);
    let rhs = dd_sup.powf(p.conj().recip().to_f64())
        * weighted_lp(&moduli(f), &cell_w, pf)
        * weighted_lp(&moduli(g_vals), &cell_w, pf);
    Ok(InequalityCheck::inequality("bilinear", lhs, rhs, tol.slack_rel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::cantor;
    use crate::verify::random_complex;

    #[test]
    fn p_one_is_an_equality_for_nonnegative_functions() {
        let mu = cantor(4, &[0, 3], 3).unwrap();
        let f: Vec<Complex64> = (0..64).map(|i| Complex64::new(1.0 + (i % 3) as f64, 0.0)).collect();
        let c = check_bilinear(&mu, &f, &f, Exponent::one(), 2.0, &Tolerances::default()).unwrap();
        assert!(c.holds && c.slack.abs() < 1e-10 * c.rhs, "{c:?}");
    }

    #[test]
    fn random_instances_hold() {
        let mu = cantor(4, &[0, 1, 3], 3).unwrap();
        for seed in 0..10 {
            let f = random_complex(64, seed, 10.0);
            let g = random_complex(64, seed + 100, 10.0);
            for p in [Exponent::one(), Exponent::new(4, 3), Exponent::int(3), Exponent::INF] {
                assert!(check_bilinear(&mu, &f, &g, p, 1.5, &Tolerances::default()).unwrap().holds);
            }
        }
    }
}
