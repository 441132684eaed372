use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::config::ProbeConfig;

const BASIS: usize = 48;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted Rayleigh–Ritz on Krylov spaces of a Hermitian positive
/// semidefinite operator, started from `start`. Returns the top Ritz vector
/// (unit norm) after the Ritz value stops improving by more than `cfg.tol`.
pub(super) fn top_ritz_vector(
    gram: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    start: &[Complex64],
    cfg: &ProbeConfig,
) -> Vec<Complex64> {
    let dim = start.len();
    let mut v = start.to_vec();
    let s = norm(&v);
    if s == 0.0 || dim == 0 {
        return v;
    }
    v.iter_mut().for_each(|x| *x /= s);
    let size = BASIS.min(dim);
    let mut last = f64::NEG_INFINITY;
    for _ in 0..cfg.max_iters.div_ceil(size).max(1) {
        let mut basis: Vec<Vec<Complex64>> = vec![v.clone()];
        let mut images: Vec<Vec<Complex64>> = Vec::with_capacity(size);
        while images.len() < basis.len() {
            let av = gram(basis.last().unwrap());
            if basis.len() < size {
                let mut w = av.clone();
                // two passes of Gram–Schmidt keep the basis orthonormal
                for _ in 0..2 {
                    for b in &basis {
                        let c = dot(b, &w);
                        w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                    }
                }
                let nw = norm(&w);
                if nw > 1e-10 * norm(&av).max(f64::MIN_POSITIVE) {
                    w.iter_mut().for_each(|x| *x /= nw);
                    basis.push(w);
                }
            }
            images.push(av);
        }
        let k = basis.len();
        let h = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &images[j]));
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h);
        let (top, value) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &l)| if l > acc.1 { (i, l) } else { acc });
        let y = eig.eigenvectors.column(top);
        let mut next = vec![Complex64::new(0.0, 0.0); dim];
        for (b, c) in basis.iter().zip(y.iter()) {
            next.iter_mut().zip(b).for_each(|(x, bv)| *x += c * bv);
        }
        let nn = norm(&next);
        next.iter_mut().for_each(|x| *x /= nn);
        v = next;
        if value <= last * (1.0 + cfg.tol) || k < size {
            break;
        }
        last = value;
    }
    v
}
