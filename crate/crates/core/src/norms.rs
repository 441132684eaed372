//! Weighted `L^p` norms with `p ∈ [1, ∞]` evaluated stably (scaled by the
//! largest magnitude before powering).

/// `(Σ_i w_i |v_i|^p)^{1/p}`; for `p = ∞`, `max |v_i|` over `w_i > 0`.
pub fn weighted_lp(values: &[f64], weights: &[f64], p: f64) -> f64 {
    debug_assert_eq!(values.len(), weights.len());
    let peak = values
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(v, _)| v.abs())
        .fold(0.0, f64::max);
    if p.is_infinite() || peak == 0.0 {
        return peak;
    }
    let s: f64 = values
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(v, w)| w * (v.abs() / peak).powf(p))
        .sum();
    peak * s.powf(1.0 / p)
}

/// `(Σ_i c |v_i|^p)^{1/p}` with a common cell weight `c`.
pub fn uniform_lp(values: &[f64], cell: f64, p: f64) -> f64 {
    let peak = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if p.is_infinite() || peak == 0.0 {
        return peak;
    }
    let s: f64 = values.iter().map(|v| (v.abs() / peak).powf(p)).sum();
    peak * (cell * s).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_norms() {
        let v = [3.0, -4.0];
        assert!((uniform_lp(&v, 1.0, 2.0) - 5.0).abs() < 1e-12);
        assert_eq!(uniform_lp(&v, 1.0, f64::INFINITY), 4.0);
        assert!((uniform_lp(&v, 1.0, 1.0) - 7.0).abs() < 1e-12);
        assert_eq!(weighted_lp(&v, &[1.0, 0.0], f64::INFINITY), 3.0);
        assert!((weighted_lp(&v, &[0.5, 0.5], 1.0) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn large_exponents_do_not_overflow() {
        let v = [1e200, 1e200];
        let n = uniform_lp(&v, 1.0, 8.0);
        assert!((n / 1e200 - 2f64.powf(1.0 / 8.0)).abs() < 1e-12);
    }
}
