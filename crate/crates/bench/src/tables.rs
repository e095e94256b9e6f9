//! Bound tables comparing our counting bound with Mathias's sandwich.

use std::path::Path;

use anyhow::Result;
use contrel_core::factor::{mathias_bounds, BoundReport};

use crate::experiment::write_file;
use crate::trace::fmt_f64;

pub const BOUNDS_HEADER: &str =
    "T,ours_upper,gamma_hat,mathias_lower,mathias_upper,gap_upper,gap_lower";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub report: BoundReport,
    pub ours_upper: f64,
    /// `ours_upper - mathias_upper`.
    pub gap_upper: f64,
    /// `ours_upper - mathias_lower`.
    pub gap_lower: f64,
}

/// Rows for each `T ≥ 2` in `horizons`, evaluated in parallel.
pub fn bounds_table(horizons: &[usize]) -> Vec<BoundRow> {
    use rayon::prelude::*;
    horizons
        .par_iter()
        .map(|&t| {
            let report = mathias_bounds(t);
            let ours = report.ours_upper.expect("bounds table needs T >= 2");
            BoundRow {
                report,
                ours_upper: ours,
                gap_upper: ours - report.mathias_upper,
                gap_lower: ours - report.mathias_lower,
            }
        })
        .collect()
}

pub fn write_bounds(horizons: &[usize], comments: &[String], path: &Path) -> Result<()> {
    let rows: Vec<Vec<String>> = bounds_table(horizons)
        .iter()
        .map(|r| {
            let mut v = vec![r.report.t.to_string()];
            v.extend(
                [
                    r.ours_upper,
                    r.report.gamma_hat,
                    r.report.mathias_lower,
                    r.report.mathias_upper,
                    r.gap_upper,
                    r.gap_lower,
                ]
                .map(fmt_f64),
            );
            v
        })
        .collect();
    write_file(path, comments, BOUNDS_HEADER, &rows)
}
