use hcrpla::cdsec::RateReport;
use hcrpla::chsec::ChannelGeometry;
use hcrpla::hybrid::{self, AnalysisOptions, HybridBreakdown};
use hcrpla::{ParamsConfig, SecurityReport, SystemParams};
use serde::Serialize;

use crate::error::CliResult;

#[derive(Debug, Serialize)]
pub struct ChannelSection {
    pub geometry: ChannelGeometry,
    pub report: SecurityReport,
}

#[derive(Debug, Serialize)]
pub struct CodingSection {
    pub rates: RateReport,
    pub report: SecurityReport,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub b_ch: f64,
    pub b_key: f64,
    pub b_hyb: f64,
}

/// Everything `analyze` reports for one operating point.
#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub params: ParamsConfig,
    pub hybrid: HybridBreakdown,
    pub baseline_ch: ChannelSection,
    pub baseline_cd: CodingSection,
    pub summary: Summary,
}

pub fn analyze(params: &SystemParams, opts: &AnalysisOptions) -> CliResult<AnalysisReport> {
    let hybrid = hybrid::hybrid_analysis(params, opts)?;
    if hybrid.geometry.boundary_effects_significant(params.edge()) {
        log::warn!(
            "sphere radius {:.3e} exceeds 0.1 of the cube edge {:.3e}; b_ch is optimistic",
            hybrid.geometry.radius,
            params.edge()
        );
    }
    let (geometry, ch_report) = hybrid::baseline_ch_geometry(params, opts)?;
    let (rates, cd_report) = hybrid::baseline_cd_rates(params)?;
    let summary = Summary { b_ch: hybrid.report.b_ch(), b_key: hybrid.report.b_key(), b_hyb: hybrid.report.b_tot() };
    Ok(AnalysisReport {
        params: params.to_config(),
        hybrid,
        baseline_ch: ChannelSection { geometry, report: ch_report },
        baseline_cd: CodingSection { rates, report: cd_report },
        summary,
    })
}
