use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least squares line through `(x, y)` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fitted points.
    pub residual: f64,
    pub points_used: usize,
}

/// Which points of an ordered scale series enter the fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitWindow {
    All,
    /// Drop the first and last point when at least three remain.
    DropEnds,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("fit inputs differ in length".into()));
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPoints { got: xs.len(), need: 2 });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("degenerate abscissae in fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    if !slope.is_finite() || !intercept.is_finite() {
        return Err(Error::NonFinite("least-squares fit"));
    }
    Ok(LineFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        points_used: xs.len(),
    })
}

/// Fits `log y` against `log x` over the selected window.
pub fn loglog(xs: &[f64], ys: &[f64], window: FitWindow) -> Result<LineFit> {
    let range = match window {
        FitWindow::DropEnds if xs.len() >= 5 => 1..xs.len() - 1,
        _ => 0..xs.len(),
    };
    let lx: Vec<f64> = xs[range.clone()].iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys[range].iter().map(|y| y.ln()).collect();
    if ly.iter().any(|v| !v.is_finite()) || lx.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("log-log fit input"));
    }
    ols(&lx, &ly)
}
