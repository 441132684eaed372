//! Masses of closed torus balls `B(x, r)` over all grid centres, by
//! circular sliding-window prefix sums (row-wise in dimension 2).

use rayon::prelude::*;

use crate::grid::Grid;

/// Half-widths of the ball of radius `radius_cells`, one per row offset
/// `dy ∈ [-h, h]` (a single entry in dimension 1).
fn row_half_widths(grid: Grid, radius_cells: f64) -> Vec<(i64, usize)> {
    let h = (radius_cells + 1e-9).floor() as i64;
    if grid.dim == 1 {
        return vec![(0, h as usize)];
    }
    let n = grid.n as i64;
    let offsets: Vec<i64> = if 2 * h + 1 >= n {
        // every row is within reach; visit each wrapped row once
        (0..n).map(|d| if d <= n / 2 { d } else { d - n }).filter(|d| d.abs() <= h).collect()
    } else {
        (-h..=h).collect()
    };
    offsets
        .into_iter()
        .map(|dy| {
            let w = (radius_cells * radius_cells - (dy * dy) as f64 + 1e-9).sqrt().floor();
            (dy, w as usize)
        })
        .collect()
}

/// Circular prefix sums of one row: `p[k] = Σ_{i<k} row[i]`, `k ∈ 0..=n`.
fn prefix(row: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(row.len() + 1);
    let mut s = 0.0;
    p.push(0.0);
    for &v in row {
        s += v;
        p.push(s);
    }
    p
}

/// Sum of `row[c-h ..= c+h]` (circular) from prefix sums.
fn window(p: &[f64], c: usize, h: usize) -> f64 {
    let n = p.len() - 1;
    if 2 * h + 1 >= n {
        return p[n];
    }
    let lo = c as i64 - h as i64;
    let hi = c + h;
    if lo < 0 {
        let lo = (lo + n as i64) as usize;
        (p[n] - p[lo]) + p[hi + 1]
    } else if hi >= n {
        (p[n] - p[lo as usize]) + p[hi + 1 - n]
    } else {
        p[hi + 1] - p[lo as usize]
    }
}

/// Row-wise window sums: `sums[row][c]` is the mass of `row[c-h..=c+h]`.
fn row_windows(weights: &[f64], grid: Grid, h: usize) -> Vec<Vec<f64>> {
    let n = grid.n;
    let rows = if grid.dim == 1 { 1 } else { n };
    (0..rows)
        .into_par_iter()
        .map(|r| {
            let p = prefix(&weights[r * n..(r + 1) * n]);
            (0..n).map(|c| window(&p, c, h)).collect()
        })
        .collect()
}

/// Ball masses `μ(B(x, r))` for every centre `x` on the grid, with the
/// radius given in cells.
pub fn all_ball_masses(weights: &[f64], grid: Grid, radius_cells: f64) -> Vec<f64> {
    let n = grid.n;
    let widths = row_half_widths(grid, radius_cells);
    if grid.dim == 1 {
        let h = widths[0].1;
        return row_windows(weights, grid, h).pop().unwrap_or_default();
    }
    // one table of row-window sums per distinct half-width
    let mut distinct: Vec<usize> = widths.iter().map(|w| w.1).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let tables: Vec<(usize, Vec<Vec<f64>>)> = distinct
        .iter()
        .map(|&h| (h, row_windows(weights, grid, h)))
        .collect();
    let lookup = |h: usize| &tables[tables.binary_search_by_key(&h, |t| t.0).unwrap()].1;
    (0..n)
        .into_par_iter()
        .flat_map_iter(|r0| {
            let mut out = vec![0.0; n];
            for &(dy, h) in &widths {
                let row = (r0 as i64 + dy).rem_euclid(n as i64) as usize;
                let t = &lookup(h)[row];
                for (o, v) in out.iter_mut().zip(t) {
                    *o += v;
                }
            }
            out
        })
        .collect()
}

/// Largest ball mass and the first centre attaining it.
pub fn max_ball_mass(weights: &[f64], grid: Grid, radius_cells: f64) -> (f64, usize) {
    let masses = all_ball_masses(weights, grid, radius_cells);
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, &m) in masses.iter().enumerate() {
        if m > best.0 {
            best = (m, i);
        }
    }
    best
}

/// Mass of the ball of radius `radius_cells` around one centre.
pub fn ball_mass_at(weights: &[f64], grid: Grid, center: usize, radius_cells: f64) -> f64 {
    let n = grid.n;
    let c = grid.coords(center);
    row_half_widths(grid, radius_cells)
        .into_iter()
        .map(|(dy, h)| {
            let h = h as i64;
            if 2 * h + 1 >= n as i64 {
                let row = if grid.dim == 1 { 0 } else { (c[0] as i64 + dy).rem_euclid(n as i64) as usize };
                let base = row * n;
                return weights[base..base + n].iter().sum::<f64>();
            }
            (-h..=h)
                .map(|dx| {
                    if grid.dim == 1 {
                        weights[grid.wrap(&[c[0] as i64 + dx])]
                    } else {
                        weights[grid.wrap(&[c[0] as i64 + dy, c[1] as i64 + dx])]
                    }
                })
                .sum::<f64>()
        })
        .sum()
}
