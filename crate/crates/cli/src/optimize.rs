use hcrpla::hybrid::{self, AnalysisOptions, GridCell, OptimizationGrid};
use hcrpla::SystemParams;
use serde::Serialize;

use crate::error::CliResult;
use crate::output::{csv_writer, finish_csv, fmt_num};

#[derive(Debug, Serialize)]
pub struct OptimizeReport {
    pub pilot_count: u32,
    pub grid_cells: usize,
    pub best: hcrpla::SecurityReport,
}

pub fn grid(params: &SystemParams, pilots: Option<Vec<u32>>, h_min: Option<Vec<f64>>) -> OptimizationGrid {
    let full = OptimizationGrid::full(params);
    OptimizationGrid::new(
        pilots.unwrap_or_else(|| full.pilot_counts().to_vec()),
        h_min.unwrap_or_else(|| full.h_min_values().to_vec()),
    )
}

pub fn run(params: &SystemParams, grid: &OptimizationGrid, opts: &AnalysisOptions) -> CliResult<(OptimizeReport, Vec<GridCell>)> {
    let result = hybrid::optimize_with(params, grid, opts)?;
    let report = OptimizeReport { pilot_count: result.best.pilot_count, grid_cells: result.cells.len(), best: result.best.report };
    Ok((report, result.cells))
}

pub fn cells_csv(n: u32, cells: &[GridCell]) -> CliResult<Vec<u8>> {
    let mut w = csv_writer();
    w.write_record(["pilot_count", "alpha", "h_min", "b_ch", "b_key", "b_tot"])?;
    for c in cells {
        w.write_record([
            c.pilot_count.to_string(),
            fmt_num(f64::from(c.pilot_count) / f64::from(n)),
            fmt_num(c.h_min),
            fmt_num(c.report.b_ch()),
            fmt_num(c.report.b_key()),
            fmt_num(c.report.b_tot()),
        ])?;
    }
    finish_csv(w)
}
