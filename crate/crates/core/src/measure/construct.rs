use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Constructor, DiscreteMeasure, FlatnessCertificate, Metadata};
use crate::error::{Error, Result};
use crate::grid::{self, Grid};

/// Default cap on constructed atom counts.
pub const DEFAULT_MAX_ATOMS: usize = 1 << 22;

pub fn dirac(dim: usize, n: usize, index: &[usize]) -> Result<DiscreteMeasure> {
    let g = Grid::new(dim, n)?;
    let i = g.linear(index)?;
    DiscreteMeasure::new(
        g,
        vec![(i, 1.0)],
        Metadata::new(Constructor::Dirac {
            index: index.to_vec(),
        }),
    )
}

/// Normalized counting measure on every grid cell.
pub fn uniform(dim: usize, n: usize) -> Result<DiscreteMeasure> {
    let g = Grid::new(dim, n)?;
    DiscreteMeasure::normalized(g, (0..g.len()).map(|i| (i, 1.0)), Metadata::new(Constructor::Uniform))
}

/// Uniform weights on the cells `start..start+len` (dim 1, wrapping).
pub fn interval(n: usize, start: usize, len: usize) -> Result<DiscreteMeasure> {
    let g = Grid::new(1, n)?;
    if len == 0 || len > n {
        return Err(Error::InvalidArgument(format!("interval length {len} not in 1..={n}")));
    }
    DiscreteMeasure::normalized(
        g,
        (0..len).map(|k| ((start + k) % n, 1.0)),
        Metadata::new(Constructor::Interval { start, len }),
    )
}

pub fn cantor(base: usize, digits: &[usize], stage: u32) -> Result<DiscreteMeasure> {
    cantor_with_budget(base, digits, stage, DEFAULT_MAX_ATOMS)
}

/// Uniform measure on the stage-`k` base-`b` Cantor set with digit set `D`:
/// `|D|^k` atoms at `Σ d_i b^{k-i}`, resolution `b^k`.
pub fn cantor_with_budget(
    base: usize,
    digits: &[usize],
    stage: u32,
    max_atoms: usize,
) -> Result<DiscreteMeasure> {
    if base < 2 || !base.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "cantor base must be a power of two >= 2, got {base}"
        )));
    }
    if stage == 0 {
        return Err(Error::InvalidArgument("cantor stage must be >= 1".into()));
    }
    let mut d = digits.to_vec();
    d.sort_unstable();
    d.dedup();
    if d.is_empty() || d.len() != digits.len() || d.iter().any(|&x| x >= base) {
        return Err(Error::InvalidArgument(format!(
            "digit set {digits:?} must be distinct values in [0, {base})"
        )));
    }
    let count = (d.len() as u128).pow(stage);
    if count > max_atoms as u128 {
        return Err(Error::BudgetExceeded {
            name: "max_atoms",
            requested: count.min(usize::MAX as u128) as usize,
            limit: max_atoms,
        });
    }
    let n = base
        .checked_pow(stage)
        .ok_or_else(|| Error::InvalidArgument("cantor resolution overflows".into()))?;
    let g = Grid::new(1, n)?;
    let mut idx = vec![0usize];
    for _ in 0..stage {
        idx = idx
            .iter()
            .flat_map(|&i| d.iter().map(move |&x| i * base + x))
            .collect();
    }
    let w = 1.0 / idx.len() as f64;
    let mut meta = Metadata::new(Constructor::Cantor {
        base,
        digits: d.clone(),
        stage,
    });
    meta.similarity_dimension = Some((d.len() as f64).ln() / (base as f64).ln());
    DiscreteMeasure::normalized(g, idx.into_iter().map(|i| (i, w)), meta)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomFlatParams {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// Flatness constant `C`.
    pub c: f64,
    pub max_retries: usize,
}

/// Difference counts `r_S(t) = #{(x, y) in S^2 : x - y = t mod N}` via FFT.
pub(crate) fn difference_counts(indices: &[usize], n: usize) -> Vec<u64> {
    let g = Grid { dim: 1, n };
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    for &i in indices {
        a[i] = Complex64::new(1.0, 0.0);
    }
    grid::forward(&mut a, g);
    for v in a.iter_mut() {
        *v = Complex64::new(v.norm_sqr(), 0.0);
    }
    grid::inverse(&mut a, g);
    a.iter().map(|v| v.re.round().max(0.0) as u64).collect()
}

fn certify(indices: &[usize], n: usize, retries: usize) -> FlatnessCertificate {
    let m = indices.len() as f64;
    let counts = difference_counts(indices, n);
    let max_offzero = counts.iter().skip(1).copied().max().unwrap_or(0);
    let scale = (m * m / n as f64).max(1.0) * (n as f64).ln();
    let off_total: u64 = counts.iter().skip(1).sum();
    let flatness_ratio = if off_total == 0 {
        0.0
    } else {
        max_offzero as f64 / (off_total as f64 / (n - 1) as f64)
    };
    FlatnessCertificate {
        max_offzero,
        scale,
        certificate_ratio: max_offzero as f64 / scale,
        flatness_ratio,
        retries,
    }
}

/// Uniform weights on a random `m`-subset of `Z_N`, resampled until
/// `max_{t≠0} r_S(t) <= C max(1, m^2/N) ln N`.
pub fn random_flat(params: &RandomFlatParams) -> Result<DiscreteMeasure> {
    let RandomFlatParams {
        n,
        m,
        seed,
        c,
        max_retries,
    } = *params;
    let g = Grid::new(1, n)?;
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!("need 1 <= m <= N, got m={m}, N={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = max_retries.max(1);
    let mut best: Option<(Vec<usize>, FlatnessCertificate)> = None;
    for attempt in 0..attempts {
        let mut s: Vec<usize> = sample(&mut rng, n, m).into_vec();
        s.sort_unstable();
        let cert = certify(&s, n, attempt);
        let accepted = cert.certificate_ratio <= c;
        let better = best
            .as_ref()
            .is_none_or(|(_, b)| cert.certificate_ratio < b.certificate_ratio);
        if accepted || better {
            best = Some((s, cert));
        }
        if accepted {
            break;
        }
    }
    let (s, cert) = best.expect("at least one attempt");
    let mut meta = Metadata::new(Constructor::RandomFlat {
        m,
        c,
        max_retries,
    });
    meta.seed = Some(seed);
    meta.similarity_dimension = Some((m as f64).ln() / (n as f64).ln());
    let accepted = cert.certificate_ratio <= c;
    let best_ratio = cert.certificate_ratio;
    meta.flatness = Some(cert);
    let w = 1.0 / m as f64;
    let measure = DiscreteMeasure::normalized(g, s.into_iter().map(|i| (i, w)), meta)?;
    if accepted {
        Ok(measure)
    } else {
        Err(Error::RetriesExhausted {
            retries: attempts,
            best_ratio,
            best: Box::new(measure),
        })
    }
}

/// Equal weights on the grid points nearest to `⌈2πρN⌉` equispaced points
/// of the circle of radius `ρ` centred at `(1/2, 1/2)`.
pub fn circle(n: usize, radius: f64) -> Result<DiscreteMeasure> {
    if !(radius > 0.0 && radius < 0.5) {
        return Err(Error::InvalidArgument(format!("radius {radius} not in (0, 1/2)")));
    }
    let g = Grid::new(2, n)?;
    let count = (2.0 * PI * radius * n as f64).ceil() as usize;
    let mut idx: Vec<usize> = (0..count)
        .map(|k| {
            let (s, c) = (2.0 * PI * k as f64 / count as f64).sin_cos();
            let x = ((0.5 + radius * c) * n as f64).round() as i64;
            let y = ((0.5 + radius * s) * n as f64).round() as i64;
            g.wrap(&[x, y])
        })
        .collect();
    idx.sort_unstable();
    idx.dedup();
    let mut meta = Metadata::new(Constructor::Circle { radius });
    meta.similarity_dimension = Some(1.0);
    DiscreteMeasure::normalized(g, idx.into_iter().map(|i| (i, 1.0)), meta)
}

impl Constructor {
    /// Rebuilds a stage-parameterized measure at resolution `n`.
    pub fn rebuild(&self, dim: usize, old_n: usize, n: usize, seed: Option<u64>) -> Result<DiscreteMeasure> {
        match self {
            Constructor::Dirac { index } => {
                if !n.is_multiple_of(old_n) && !old_n.is_multiple_of(n) {
                    return Err(Error::InvalidArgument("dirac index cannot be rescaled".into()));
                }
                let idx: Vec<usize> = index.iter().map(|&i| i * n / old_n).collect();
                dirac(dim, n, &idx)
            }
            Constructor::Uniform => uniform(dim, n),
            Constructor::Interval { start, len } => {
                interval(n, start * n / old_n, (len * n / old_n).max(1))
            }
            Constructor::Cantor { base, digits, stage: _ } => {
                let stage = (n as f64).ln() / (*base as f64).ln();
                let k = stage.round() as u32;
                if base.checked_pow(k) != Some(n) {
                    return Err(Error::InvalidArgument(format!(
                        "resolution {n} is not a power of the cantor base {base}"
                    )));
                }
                cantor(*base, digits, k)
            }
            Constructor::RandomFlat { m, c, max_retries } => {
                let scale = |x: usize| (x as f64 * (x as f64).ln()).sqrt();
                let m_new = ((*m as f64) * scale(n) / scale(old_n)).round().max(1.0) as usize;
                random_flat(&RandomFlatParams {
                    n,
                    m: m_new.min(n),
                    seed: seed.unwrap_or(0),
                    c: *c,
                    max_retries: *max_retries,
                })
            }
            Constructor::Circle { radius } => circle(n, *radius),
            other => Err(Error::InvalidArgument(format!(
                "constructor {:?} is not stage-parameterized",
                std::mem::discriminant(other)
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_examples() {
        let d = dirac(1, 256, &[0]).unwrap();
        assert_eq!(d.atoms(), &[(0, 1.0)]);
        let d = dirac(1, 256, &[128]).unwrap();
        assert_eq!(d.atoms(), &[(128, 1.0)]);
        assert!(dirac(1, 256, &[256]).is_err());
        assert!(dirac(2, 16, &[1]).is_err());
    }

    #[test]
    fn cantor_stage_two_digit_enumeration() {
        let m = cantor(4, &[0, 3], 2).unwrap();
        assert_eq!(m.n(), 16);
        assert_eq!(m.atoms(), &[(0, 0.25), (3, 0.25), (12, 0.25), (15, 0.25)]);
        assert_eq!(m.meta().similarity_dimension, Some(0.5));
    }

    #[test]
    fn cantor_full_digits_is_uniform() {
        for k in 1..8 {
            let m = cantor(2, &[0, 1], k).unwrap();
            assert_eq!(m.len(), 1 << k);
            assert!(m.atoms().iter().all(|a| a.1 == 1.0 / (1 << k) as f64));
            assert_eq!(m.meta().similarity_dimension, Some(1.0));
        }
    }

    #[test]
    fn cantor_errors() {
        assert!(cantor(3, &[0, 2], 2).is_err());
        assert!(cantor(4, &[], 2).is_err());
        assert!(cantor(4, &[0, 4], 2).is_err());
        assert!(cantor(4, &[0, 0], 2).is_err());
        assert!(matches!(
            cantor_with_budget(4, &[0, 1, 2], 6, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn random_flat_full_set_is_flat() {
        let m = random_flat(&RandomFlatParams {
            n: 64,
            m: 64,
            seed: 1,
            c: 4.0,
            max_retries: 10,
        })
        .unwrap();
        let cert = m.meta().flatness.clone().unwrap();
        assert_eq!(m.len(), 64);
        assert_eq!(cert.max_offzero, 64);
        assert_eq!(cert.flatness_ratio, 1.0);
    }

    #[test]
    fn random_flat_single_atom() {
        let m = random_flat(&RandomFlatParams {
            n: 64,
            m: 1,
            seed: 9,
            c: 4.0,
            max_retries: 1,
        })
        .unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.meta().flatness.as_ref().unwrap().max_offzero, 0);
    }

    #[test]
    fn random_flat_exhaustion_reports_best() {
        // C = 0 can never be met once m >= 2.
        let err = random_flat(&RandomFlatParams {
            n: 256,
            m: 20,
            seed: 3,
            c: 0.0,
            max_retries: 5,
        })
        .unwrap_err();
        match err {
            Error::RetriesExhausted { retries, best_ratio, best } => {
                assert_eq!(retries, 5);
                assert!(best_ratio > 0.0);
                assert_eq!(best.len(), 20);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn circle_mass_and_size() {
        let c = circle(256, 0.25).unwrap();
        assert!((c.total_mass() - 1.0).abs() < 1e-12);
        assert!(c.len() > 300 && c.len() <= 403);
        assert!(circle(256, 0.5).is_err());
    }

    #[test]
    fn rebuild_cantor_and_uniform() {
        let c = Constructor::Cantor {
            base: 4,
            digits: vec![0, 3],
            stage: 2,
        };
        assert_eq!(c.rebuild(1, 16, 256, None).unwrap().len(), 16);
        assert!(c.rebuild(1, 16, 128, None).is_err());
        assert_eq!(Constructor::Uniform.rebuild(1, 16, 32, None).unwrap().len(), 32);
        assert!(Constructor::Custom { label: "x".into() }.rebuild(1, 16, 32, None).is_err());
    }
}
