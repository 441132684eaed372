use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::growth_exponent;
use crate::config::{Budgets, ProbeConfig, Tolerances};
use crate::error::Result;
use crate::exponent::Exponent;
use crate::measure::DiscreteMeasure;
use crate::regularity::ExponentRange;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Bounded,
    Growing,
    Inconclusive,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Bounded => "bounded",
            Classification::Growing => "growing",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

pub fn classify(slope: f64, tol: &Tolerances) -> Classification {
    if slope < tol.tau_bounded {
        Classification::Bounded
    } else if slope > tol.tau_growing {
        Classification::Growing
    } else {
        Classification::Inconclusive
    }
}

/// Reference regions drawn over the empirical map.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepOverlay {
    /// Admissible region of the convolution-power theorem.
    pub theorem: Option<ExponentRange>,
    /// Billingsley exponent estimate; the Knapp region is `q <= (γ/dim) p'`.
    pub gamma_hat: Option<f64>,
}

impl SweepOverlay {
    fn in_theorem(&self, p: Exponent, q: Exponent) -> Option<bool> {
        self.theorem.as_ref().map(|r| r.contains(p, q))
    }

    fn in_knapp(&self, dim: usize, p: Exponent, q: Exponent) -> Option<bool> {
        self.gamma_hat.map(|g| {
            let bound = g / dim as f64 * p.conj().to_f64();
            q.to_f64() <= bound || bound.is_infinite()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: Exponent,
    pub q: Exponent,
    pub norms: Vec<f64>,
    pub slope: f64,
    pub residual: f64,
    pub class: Classification,
    pub monotone: bool,
    pub in_theorem_region: Option<bool>,
    pub in_knapp_region: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub x_values: Vec<usize>,
    pub overlay: SweepOverlay,
    pub rows: Vec<SweepRow>,
}

fn flag(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

impl SweepGrid {
    pub fn csv_header(x_values: &[usize]) -> Vec<String> {
        let mut h = vec!["p".to_string(), "q".to_string()];
        h.extend(x_values.iter().map(|x| format!("norm_X{x}")));
        h.extend(["slope", "residual", "class", "in_theorem_region", "in_knapp_region"].map(String::from));
        h
    }

    pub fn csv_records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let mut rec = vec![r.p.key(), r.q.key()];
                rec.extend(r.norms.iter().map(|v| v.to_string()));
                rec.push(r.slope.to_string());
                rec.push(r.residual.to_string());
                rec.push(r.class.as_str().to_string());
                rec.push(flag(r.in_theorem_region).to_string());
                rec.push(flag(r.in_knapp_region).to_string());
                rec
            })
            .collect()
    }

    pub fn row(&self, p: Exponent, q: Exponent) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.p == p && r.q == q)
    }
}

/// Classifies every `(p, q)` cell by the growth slope of its norm series.
/// Rows come out in `p`-major order regardless of scheduling; `progress` is
/// called once per finished cell.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    mu: &DiscreteMeasure,
    p_grid: &[Exponent],
    q_grid: &[Exponent],
    x_values: &[usize],
    cfg: &ProbeConfig,
    tol: &Tolerances,
    budgets: &Budgets,
    overlay: SweepOverlay,
    progress: Option<&(dyn Fn(&SweepRow) + Sync)>,
) -> Result<SweepGrid> {
    let cells: Vec<(Exponent, Exponent)> = p_grid.iter().flat_map(|&p| q_grid.iter().map(move |&q| (p, q))).collect();
    let rows = cells
        .into_par_iter()
        .map(|(p, q)| {
            let s = growth_exponent(mu, p, q, x_values, cfg, budgets)?;
            let row = SweepRow {
                p,
                q,
                class: classify(s.fit.slope, tol),
                slope: s.fit.slope,
                residual: s.fit.residual,
                norms: s.norms,
                monotone: s.monotone,
                in_theorem_region: overlay.in_theorem(p, q),
                in_knapp_region: overlay.in_knapp(mu.dim(), p, q),
            };
            if let Some(cb) = progress {
                cb(&row);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid {
        x_values: x_values.to_vec(),
        overlay,
        rows,
    })
}
