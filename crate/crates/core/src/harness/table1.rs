use serde::{Deserialize, Serialize};

use super::metrics::ideal_weights;
use crate::comparator::{oracle_weights, ComparatorConfig, Variant};
use crate::error::{Error, Result};

/// Published rows for `gt_half` and `gt`, `r = 1..=8`.
pub const PUBLISHED_GT_HALF: [f64; 8] = [0.38, 0.28, 0.15, 0.062, 0.027, 0.017, 0.026, 0.019];
pub const PUBLISHED_GT: [f64; 8] = [0.47, 0.39, 0.22, 0.10, 0.056, 0.034, 0.051, 0.036];

/// The grid `x = 0.05 s`, `-4 <= s <= 4`, compared against zero.
pub fn grid() -> Vec<f64> {
    (-4..=4).map(|s| 0.05 * s as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub r: u32,
    /// Mean error of the `gt_half` weight over the eight nonzero grid points.
    pub gt_half: f64,
    /// Same for `gt`.
    pub gt: f64,
    /// Means over all nine points, tie included.
    pub gt_half_all_points: f64,
    pub gt_all_points: f64,
    pub published_gt_half: Option<f64>,
    pub published_gt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Report {
    pub grid: Vec<f64>,
    pub rows: Vec<Table1Row>,
}

impl Table1Report {
    /// Largest distance to a published value over both rows.
    pub fn max_published_deviation(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|row| {
                [
                    row.published_gt_half.map(|p| (p - row.gt_half).abs()),
                    row.published_gt.map(|p| (p - row.gt).abs()),
                ]
            })
            .flatten()
            .fold(0.0, f64::max)
    }
}

fn grid_errors(variant: Variant, r: u32) -> Result<Vec<(f64, f64)>> {
    let cfg = ComparatorConfig::new(r, variant)?;
    grid()
        .into_iter()
        .map(|x| {
            let (w, _) = oracle_weights(x, 0.0, &cfg)?;
            let (ideal, _) = ideal_weights(variant, x, 0.0);
            Ok((x, (w - ideal).abs()))
        })
        .collect()
}

/// Oracle errors of the first weight of `select(x, 0)` against the exact
/// step function, per `r`.
///
/// The headline columns average over the nonzero grid points; at `x = 0`
/// both selections reproduce their tie rule exactly so the point carries
/// no information.
pub fn run_table1(r_values: &[u32]) -> Result<Table1Report> {
    if r_values.is_empty() {
        return Err(Error::InvalidArgument("no r values given".into()));
    }
    let mut rows = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let mut cols = [0.0; 4];
        for (k, variant) in [Variant::GtHalf, Variant::Gt].into_iter().enumerate() {
            let errs = grid_errors(variant, r)?;
            let off: Vec<f64> = errs.iter().filter(|(x, _)| *x != 0.0).map(|e| e.1).collect();
            cols[2 * k] = off.iter().sum::<f64>() / off.len() as f64;
            cols[2 * k + 1] = errs.iter().map(|e| e.1).sum::<f64>() / errs.len() as f64;
        }
        let idx = (r as usize).checked_sub(1).filter(|&i| i < 8);
        rows.push(Table1Row {
            r,
            gt_half: cols[0],
            gt_half_all_points: cols[1],
            gt: cols[2],
            gt_all_points: cols[3],
            published_gt_half: idx.map(|i| PUBLISHED_GT_HALF[i]),
            published_gt: idx.map(|i| PUBLISHED_GT[i]),
        });
    }
    Ok(Table1Report { grid: grid(), rows })
}
