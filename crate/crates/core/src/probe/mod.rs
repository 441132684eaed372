//! Discrete restriction operator and lower bounds for its `ℓ^p → L^q(μ)`
//! norm by alternating Hölder-extremal alignment.

mod krylov;
mod operator;
mod sweep;

pub use operator::{lattice_points, ExtensionOperator};
pub use sweep::{classify, sweep, Classification, SweepGrid, SweepOverlay, SweepRow};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{label_seed, mix_seed, Budgets, ProbeConfig};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::fit::{loglog, FitWindow, LineFit};
use crate::measure::DiscreteMeasure;
use crate::norms::weighted_lp;
use operator::abs;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub p: Exponent,
    pub q: Exponent,
    pub x_max: usize,
    /// Exact Rayleigh quotient of `witness`.
    pub norm_lower_bound: f64,
    pub witness: Vec<Complex64>,
    /// Best quotient after each iteration of the winning start.
    pub trace: Vec<f64>,
    pub restarts_used: usize,
    pub converged: bool,
}

/// A linear map with weighted norms on both sides, given through its action
/// and its plain conjugate transpose.
struct WeightedMap<'a> {
    input_weights: &'a [f64],
    output_weights: &'a [f64],
    apply: &'a (dyn Fn(&[Complex64]) -> Vec<Complex64> + Sync),
    adjoint: &'a (dyn Fn(&[Complex64]) -> Vec<Complex64> + Sync),
}

struct StartOutcome {
    ratio: f64,
    witness: Vec<Complex64>,
    trace: Vec<f64>,
    converged: bool,
}

impl WeightedMap<'_> {
    fn ratio(&self, f: &[Complex64], p: f64, q: f64) -> f64 {
        let u = (self.apply)(f);
        weighted_lp(&abs(&u), self.output_weights, q) / weighted_lp(&abs(f), self.input_weights, p)
    }

    /// Element of the unit ball of `L^{q'}(c)` norming `u` in `L^q(c)`,
    /// multiplied by `c` so that it can be fed to the plain adjoint.
    fn dual_of_output(&self, u: &[Complex64], q: f64) -> Vec<Complex64> {
        let c = self.output_weights;
        if q.is_infinite() {
            let mut best = (0.0, 0);
            for (i, v) in u.iter().enumerate() {
                if c[i] > 0.0 && v.norm() > best.0 {
                    best = (v.norm(), i);
                }
            }
            let mut y = vec![Complex64::new(0.0, 0.0); u.len()];
            y[best.1] = phase(u[best.1]);
            return y;
        }
        let peak = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
        u.iter()
            .zip(c)
            .map(|(v, w)| {
                if peak == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                phase(*v) * (v.norm() / peak).powf(q - 1.0) * *w
            })
            .collect()
    }

    /// Hölder-extremal unit vector of `ℓ^p(a)` for the functional
    /// `f ↦ Re Σ f conj(z)`.
    fn extremal_input(&self, z: &[Complex64], p: f64) -> Vec<Complex64> {
        let a = self.input_weights;
        let zeta: Vec<Complex64> = z.iter().zip(a).map(|(v, w)| if *w > 0.0 { v / *w } else { Complex64::new(0.0, 0.0) }).collect();
        let mut f = vec![Complex64::new(0.0, 0.0); z.len()];
        if p == 1.0 {
            let mut best = (0.0, 0);
            for (i, v) in zeta.iter().enumerate() {
                if v.norm() > best.0 {
                    best = (v.norm(), i);
                }
            }
            f[best.1] = phase(zeta[best.1]) / a[best.1];
            return f;
        }
        if p.is_infinite() {
            for (o, v) in f.iter_mut().zip(&zeta) {
                *o = phase(*v);
            }
            return f;
        }
        let pc = p / (p - 1.0);
        let peak = zeta.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return f;
        }
        for (o, v) in f.iter_mut().zip(&zeta) {
            *o = phase(*v) * (v.norm() / peak).powf(pc - 1.0);
        }
        let nrm = weighted_lp(&abs(&f), a, p);
        for v in f.iter_mut() {
            *v /= nrm;
        }
        f
    }

    fn run(&self, start: Vec<Complex64>, p: f64, q: f64, cfg: &ProbeConfig) -> StartOutcome {
        let mut best_ratio = self.ratio(&start, p, q);
        let mut best = start.clone();
        if !best_ratio.is_finite() {
            best_ratio = 0.0;
        }
        let mut trace = vec![best_ratio];
        let mut f = start;
        let mut prev = best_ratio;
        let mut converged = false;
        for _ in 0..cfg.max_iters {
            let u = (self.apply)(&f);
            let y = self.dual_of_output(&u, q);
            let z = (self.adjoint)(&y);
            let next = self.extremal_input(&z, p);
            let r = self.ratio(&next, p, q);
            if !r.is_finite() {
                break;
            }
            if r > best_ratio {
                best_ratio = r;
                best.clone_from(&next);
            }
            trace.push(best_ratio);
            f = next;
            if (r - prev).abs() <= cfg.tol * r.abs().max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
            prev = r;
        }
        StartOutcome {
            ratio: best_ratio,
            witness: best,
            trace,
            converged,
        }
    }

    /// Runs every start (in parallel) and keeps the best; ties go to the
    /// earliest start so the outcome does not depend on scheduling.
    fn maximize(&self, starts: Vec<Vec<Complex64>>, p: f64, q: f64, cfg: &ProbeConfig) -> Result<StartOutcome> {
        let outcomes: Vec<StartOutcome> = starts.into_par_iter().map(|s| self.run(s, p, q, cfg)).collect();
        let mut it = outcomes.into_iter();
        let mut best = it.next().ok_or_else(|| Error::InvalidArgument("no starting vectors".into()))?;
        for o in it {
            if o.ratio > best.ratio {
                best = o;
            }
        }
        if best.ratio <= 0.0 {
            return Err(Error::NonFinite("norm iteration"));
        }
        Ok(best)
    }
}

fn phase(v: Complex64) -> Complex64 {
    let r = v.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        v / r
    }
}

fn gaussian_start(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect()
}

fn start_seed(cfg: &ProbeConfig, tag: &str, p: Exponent, q: Exponent, x_max: usize, restart: usize) -> u64 {
    mix_seed(&[
        cfg.seed,
        label_seed(tag),
        label_seed(&p.key()),
        label_seed(&q.key()),
        x_max as u64,
        restart as u64,
    ])
}

fn check_exponents(p: Exponent, q: Exponent) -> Result<()> {
    p.require_lebesgue("p")?;
    q.require_lebesgue("q")
}

/// Lower bound for `‖R‖_{ℓ^p → L^q(μ)}` with a witness.
///
/// Starts: the zero-padded `warm` witness (if any), the unit vector at the
/// origin, then `cfg.restarts` complex Gaussian vectors.
pub fn restriction_norm(
    op: &ExtensionOperator,
    p: Exponent,
    q: Exponent,
    cfg: &ProbeConfig,
    warm: Option<(&[Complex64], usize)>,
) -> Result<ProbeResult> {
    check_exponents(p, q)?;
    let ones = vec![1.0; op.rows()];
    let apply = |f: &[Complex64]| op.restrict(f);
    let adjoint = |y: &[Complex64]| op.extend_raw(y);
    let map = WeightedMap {
        input_weights: &ones,
        output_weights: op.weights(),
        apply: &apply,
        adjoint: &adjoint,
    };
    let mut starts = Vec::with_capacity(cfg.restarts + 2);
    if let Some((w, from)) = warm {
        starts.push(op.embed(w, from)?);
    }
    let mut origin = vec![Complex64::new(0.0, 0.0); op.rows()];
    origin[op.rows() / 2] = Complex64::new(1.0, 0.0);
    starts.push(origin);
    for k in 0..cfg.restarts {
        starts.push(gaussian_start(op.rows(), start_seed(cfg, "restrict", p, q, op.x_max(), k)));
    }
    let used = starts.len();
    let mut best = map.maximize(starts, p.to_f64(), q.to_f64(), cfg)?;
    if is_two(p) && is_two(q) {
        let w = op.weights();
        let gram = |f: &[Complex64]| {
            let u: Vec<Complex64> = op.restrict(f).into_iter().zip(w).map(|(v, wj)| v * *wj).collect();
            op.extend_raw(&u)
        };
        let f = krylov::top_ritz_vector(&gram, &best.witness, cfg);
        refine(&mut best, f, op.rayleigh_fn());
    }
    Ok(ProbeResult {
        p,
        q,
        x_max: op.x_max(),
        norm_lower_bound: best.ratio,
        witness: best.witness,
        trace: best.trace,
        restarts_used: used,
        converged: best.converged,
    })
}

fn is_two(e: Exponent) -> bool {
    e == Exponent::int(2)
}

/// Replaces the best outcome when the candidate's exact quotient is larger.
fn refine(best: &mut StartOutcome, candidate: Vec<Complex64>, ratio: impl Fn(&[Complex64]) -> f64) {
    let r = ratio(&candidate);
    if r.is_finite() && r > best.ratio {
        best.ratio = r;
        best.witness = candidate;
        best.trace.push(r);
        best.converged = true;
    }
}

/// Lower bound for the adjoint `‖E‖_{L^p(μ) → ℓ^q}`; the witness lives on
/// the atoms.
pub fn extension_norm(op: &ExtensionOperator, p: Exponent, q: Exponent, cfg: &ProbeConfig) -> Result<ProbeResult> {
    check_exponents(p, q)?;
    let ones = vec![1.0; op.rows()];
    let w = op.weights();
    let apply = |g: &[Complex64]| op.extend(g);
    let adjoint = |z: &[Complex64]| {
        op.restrict(z)
            .into_iter()
            .zip(w)
            .map(|(v, wj)| v * *wj)
            .collect::<Vec<_>>()
    };
    let map = WeightedMap {
        input_weights: w,
        output_weights: &ones,
        apply: &apply,
        adjoint: &adjoint,
    };
    let mut starts = vec![vec![Complex64::new(1.0, 0.0); op.cols()]];
    for k in 0..cfg.restarts {
        starts.push(gaussian_start(op.cols(), start_seed(cfg, "extend", p, q, op.x_max(), k)));
    }
    let used = starts.len();
    let mut best = map.maximize(starts, p.to_f64(), q.to_f64(), cfg)?;
    if is_two(p) && is_two(q) {
        // iterate on h = sqrt(w) g, where the Gram operator is Hermitian
        let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let gram = |h: &[Complex64]| {
            let y: Vec<Complex64> = h.iter().zip(&sw).map(|(v, s)| v * *s).collect();
            op.restrict(&op.extend_raw(&y)).into_iter().zip(&sw).map(|(v, s)| v * *s).collect::<Vec<_>>()
        };
        let h0: Vec<Complex64> = best.witness.iter().zip(&sw).map(|(v, s)| v * *s).collect();
        let h = krylov::top_ritz_vector(&gram, &h0, cfg);
        let g: Vec<Complex64> = h.iter().zip(&sw).map(|(v, s)| if *s > 0.0 { v / *s } else { *v }).collect();
        refine(&mut best, g, |g| map.ratio(g, 2.0, 2.0));
    }
    Ok(ProbeResult {
        p,
        q,
        x_max: op.x_max(),
        norm_lower_bound: best.ratio,
        witness: best.witness,
        trace: best.trace,
        restarts_used: used,
        converged: best.converged,
    })
}

/// Norm estimates along an increasing list of truncations and the log-log
/// growth slope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthSeries {
    pub p: Exponent,
    pub q: Exponent,
    pub x_values: Vec<usize>,
    pub norms: Vec<f64>,
    pub fit: LineFit,
    pub monotone: bool,
}

pub fn growth_exponent(
    mu: &DiscreteMeasure,
    p: Exponent,
    q: Exponent,
    x_values: &[usize],
    cfg: &ProbeConfig,
    budgets: &Budgets,
) -> Result<GrowthSeries> {
    if x_values.len() < 4 {
        return Err(Error::TooFewPoints {
            got: x_values.len(),
            need: 4,
        });
    }
    if x_values.windows(2).any(|w| w[0] >= w[1]) || x_values[0] == 0 {
        return Err(Error::InvalidArgument("X values must be positive and increasing".into()));
    }
    let mut norms = Vec::with_capacity(x_values.len());
    let mut warm: Option<(Vec<Complex64>, usize)> = None;
    for &x in x_values {
        let op = ExtensionOperator::assemble(mu, x, budgets)?;
        let res = restriction_norm(&op, p, q, cfg, warm.as_ref().map(|(w, from)| (w.as_slice(), *from)))?;
        norms.push(res.norm_lower_bound);
        warm = Some((res.witness, x));
    }
    let xs: Vec<f64> = x_values.iter().map(|&x| x as f64).collect();
    let fit = loglog(&xs, &norms, FitWindow::All)?;
    let monotone = norms.windows(2).all(|w| w[1] >= w[0]);
    Ok(GrowthSeries {
        p,
        q,
        x_values: x_values.to_vec(),
        norms,
        fit,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{cantor, dirac, uniform};

    fn cfg() -> ProbeConfig {
        ProbeConfig {
            restarts: 3,
            max_iters: 200,
            tol: 1e-12,
            seed: 7,
        }
    }

    #[test]
    fn p_one_gives_one() {
        let mu = cantor(4, &[0, 3], 4).unwrap();
        let op = ExtensionOperator::assemble(&mu, 8, &Budgets::default()).unwrap();
        for q in [Exponent::one(), Exponent::int(2), Exponent::INF] {
            let r = restriction_norm(&op, Exponent::one(), q, &cfg(), None).unwrap();
            assert!((r.norm_lower_bound - 1.0).abs() < 1e-12, "{q}: {}", r.norm_lower_bound);
        }
    }

    #[test]
    fn dirac_closed_form() {
        let mu = dirac(1, 256, &[37]).unwrap();
        let op = ExtensionOperator::assemble(&mu, 10, &Budgets::default()).unwrap();
        for (p, q) in [(Exponent::new(4, 3), Exponent::int(2)), (Exponent::int(2), Exponent::int(3)), (Exponent::INF, Exponent::one())] {
            let r = restriction_norm(&op, p, q, &cfg(), None).unwrap();
            let expected = 21f64.powf(1.0 / p.conj().to_f64());
            assert!((r.norm_lower_bound - expected).abs() < 1e-10 * expected, "{p}: {} vs {expected}", r.norm_lower_bound);
        }
    }

    #[test]
    fn stored_witness_reproduces_the_bound() {
        let mu = cantor(4, &[0, 1, 3], 3).unwrap();
        let op = ExtensionOperator::assemble(&mu, 12, &Budgets::default()).unwrap();
        let r = restriction_norm(&op, Exponent::new(3, 2), Exponent::int(3), &cfg(), None).unwrap();
        let direct = op.rayleigh(&r.witness, 1.5, 3.0);
        assert!((direct - r.norm_lower_bound).abs() <= 1e-10 * direct);
    }

    #[test]
    fn uniform_at_two_two_is_flat() {
        let mu = uniform(1, 64).unwrap();
        let s = growth_exponent(&mu, Exponent::int(2), Exponent::int(2), &[2, 4, 8, 16], &cfg(), &Budgets::default()).unwrap();
        assert!(s.fit.slope.abs() < 0.05, "{:?}", s.norms);
        assert!(s.monotone);
    }

    #[test]
    fn two_two_duality() {
        let mu = cantor(4, &[0, 1, 3], 3).unwrap();
        let op = ExtensionOperator::assemble(&mu, 12, &Budgets::default()).unwrap();
        let two = Exponent::int(2);
        let r = restriction_norm(&op, two, two, &cfg(), None).unwrap();
        let e = extension_norm(&op, two, two, &cfg()).unwrap();
        assert!((r.norm_lower_bound - e.norm_lower_bound).abs() < 1e-8 * r.norm_lower_bound, "{} {} {} {}", r.norm_lower_bound, e.norm_lower_bound, r.trace.len(), e.trace.len());
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let mu = cantor(4, &[0, 3], 4).unwrap();
        let op = ExtensionOperator::assemble(&mu, 8, &Budgets::default()).unwrap();
        let a = restriction_norm(&op, Exponent::new(4, 3), Exponent::int(4), &cfg(), None).unwrap();
        let b = restriction_norm(&op, Exponent::new(4, 3), Exponent::int(4), &cfg(), None).unwrap();
        assert_eq!(a, b);
    }
}
