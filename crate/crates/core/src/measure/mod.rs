//! Discretized Borel probability measures on the torus `[0,1)^dim`.

mod construct;
mod io;
mod mollify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

pub use construct::{
    cantor, cantor_with_budget, circle, dirac, interval, random_flat, uniform, RandomFlatParams,
};
pub use io::MeasureFile;
pub use mollify::{mollify, MollifiedDensity};

pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// How a measure was produced. Stage-parameterized variants can be rebuilt
/// at another resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constructor {
    Dirac { index: Vec<usize> },
    Uniform,
    Interval { start: usize, len: usize },
    Cantor { base: usize, digits: Vec<usize>, stage: u32 },
    RandomFlat { m: usize, c: f64, max_retries: usize },
    Circle { radius: f64 },
    Reflect { of: Box<Constructor> },
    Confine { factor: usize, of: Box<Constructor> },
    ConvolutionPower { n: u32, of: Box<Constructor> },
    Autocorrelation { of: Box<Constructor> },
    Custom { label: String },
}

/// Per-instance flatness certificate of a random flat set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessCertificate {
    /// `max_{t != 0} r_S(t)`, the largest off-zero difference count.
    pub max_offzero: u64,
    /// `max(1, m^2/N) ln N`.
    pub scale: f64,
    /// `max_offzero / scale`; accepted when at most `C`.
    pub certificate_ratio: f64,
    /// Max-to-mean ratio of off-zero autocorrelation weights.
    pub flatness_ratio: f64,
    pub retries: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub constructor: Constructor,
    pub seed: Option<u64>,
    pub similarity_dimension: Option<f64>,
    pub flatness: Option<FlatnessCertificate>,
}

impl Metadata {
    pub fn new(constructor: Constructor) -> Metadata {
        Metadata {
            constructor,
            seed: None,
            similarity_dimension: None,
            flatness: None,
        }
    }

    fn derived(&self, constructor: Constructor) -> Metadata {
        Metadata {
            constructor,
            seed: self.seed,
            similarity_dimension: None,
            flatness: None,
        }
    }
}

/// Atom weights on a torus grid, summing to one.
///
/// Atoms are stored sparsely, sorted by linear grid index, without
/// duplicates and with strictly positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    grid: Grid,
    atoms: Vec<(usize, f64)>,
    meta: Metadata,
}

impl DiscreteMeasure {
    /// Validating constructor; weights are taken bit-for-bit.
    pub fn new(grid: Grid, atoms: Vec<(usize, f64)>, meta: Metadata) -> Result<DiscreteMeasure> {
        let mut atoms = atoms;
        atoms.sort_by_key(|a| a.0);
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument(format!(
                    "duplicate atom index {:?}",
                    grid.index_vec(w[0].0)
                )));
            }
        }
        let mut sum = 0.0;
        for &(i, w) in &atoms {
            if i >= grid.len() {
                return Err(Error::IndexOutOfRange {
                    index: vec![i],
                    n: grid.n,
                });
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidArgument(format!("invalid weight {w}")));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {sum}, not 1")));
        }
        atoms.retain(|a| a.1 > 0.0);
        Ok(DiscreteMeasure { grid, atoms, meta })
    }

    /// Merges duplicate indices, drops zero weights and renormalizes.
    pub fn normalized<I>(grid: Grid, atoms: I, meta: Metadata) -> Result<DiscreteMeasure>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, w) in atoms {
            if i >= grid.len() {
                return Err(Error::IndexOutOfRange {
                    index: vec![i],
                    n: grid.n,
                });
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidArgument(format!("invalid weight {w}")));
            }
            *merged.entry(i).or_insert(0.0) += w;
        }
        let sum: f64 = merged.values().sum();
        if !(sum > 0.0) {
            return Err(Error::InvalidArgument("measure has zero total mass".into()));
        }
        let atoms = merged
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|(i, w)| (i, w / sum))
            .collect();
        Ok(DiscreteMeasure { grid, atoms, meta })
    }

    /// Builds a measure from a dense nonnegative weight grid.
    pub fn from_dense(grid: Grid, weights: &[f64], meta: Metadata) -> Result<DiscreteMeasure> {
        DiscreteMeasure::normalized(
            grid,
            weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0.0)
                .map(|(i, &w)| (i, w)),
            meta,
        )
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn atoms(&self) -> &[(usize, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn meta(&self) -> &Metadata {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut Metadata {
        &mut self.meta
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn weight_at(&self, linear: usize) -> f64 {
        match self.atoms.binary_search_by_key(&linear, |a| a.0) {
            Ok(k) => self.atoms[k].1,
            Err(_) => 0.0,
        }
    }

    pub fn dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.grid.len()];
        for &(i, w) in &self.atoms {
            v[i] = w;
        }
        v
    }

    pub fn max_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).fold(0.0, f64::max)
    }

    /// The reflection `A ↦ μ(-A)`: index `j` maps to `-j mod N`.
    pub fn reflect(&self) -> DiscreteMeasure {
        let g = self.grid;
        let mut atoms: Vec<(usize, f64)> = self
            .atoms
            .iter()
            .map(|&(i, w)| {
                let c = g.coords(i);
                (g.wrap(&[-(c[0] as i64), -(c[1] as i64)]), w)
            })
            .collect();
        atoms.sort_by_key(|a| a.0);
        DiscreteMeasure {
            grid: g,
            atoms,
            meta: self.meta.derived(Constructor::Reflect {
                of: Box::new(self.meta.constructor.clone()),
            }),
        }
    }

    /// Re-embeds the measure into `[0, 1/F)^dim` with `F` the smallest power
    /// of two at least `2 n_max`, so that `n`-fold sums for `n <= n_max`
    /// never wrap around the torus. Indices are kept; the resolution grows
    /// by `F`.
    pub fn confine(&self, n_max: usize) -> Result<DiscreteMeasure> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be positive".into()));
        }
        let factor = (2 * n_max).next_power_of_two();
        let grid = Grid::new(self.grid.dim, self.grid.n * factor)?;
        let atoms = self
            .atoms
            .iter()
            .map(|&(i, w)| {
                let c = self.grid.coords(i);
                (grid.wrap(&[c[0] as i64, c[1] as i64]), w)
            })
            .collect::<Vec<_>>();
        let mut meta = self.meta.derived(Constructor::Confine {
            factor,
            of: Box::new(self.meta.constructor.clone()),
        });
        meta.similarity_dimension = self.meta.similarity_dimension;
        let mut atoms = atoms;
        atoms.sort_by_key(|a| a.0);
        Ok(DiscreteMeasure { grid, atoms, meta })
    }

    pub(crate) fn with_meta(mut self, meta: Metadata) -> DiscreteMeasure {
        self.meta = meta;
        self
    }

    pub(crate) fn derived_meta(&self, constructor: Constructor) -> Metadata {
        self.meta.derived(constructor)
    }
}
