use hcrpla::hybrid::{self, AnalysisOptions, OptimizationGrid};
use hcrpla::{ParamsConfig, SecurityReport, SystemParams};
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::output::{csv_writer, finish_csv, fmt_num};

pub const CSV_HEADER: [&str; 8] = ["swept_var", "value", "mechanism", "alpha_used", "h_min_used", "b_ch", "b_key", "b_tot"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SweptVariable {
    #[serde(rename = "h_min")]
    HMin,
    #[serde(rename = "lambda_ratio")]
    LambdaRatio,
    #[serde(rename = "lambda_B_dB")]
    LambdaBDb,
    #[serde(rename = "F")]
    Frames,
    #[serde(rename = "alpha")]
    Alpha,
}

impl SweptVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweptVariable::HMin => "h_min",
            SweptVariable::LambdaRatio => "lambda_ratio",
            SweptVariable::LambdaBDb => "lambda_B_dB",
            SweptVariable::Frames => "F",
            SweptVariable::Alpha => "alpha",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SweepMechanism {
    Ch,
    Cd,
    Hybrid,
    /// Hybrid optimized over every grid dimension except the swept one.
    HybridOpt,
}

impl SweepMechanism {
    fn label(self) -> &'static str {
        match self {
            SweepMechanism::Ch => "CH",
            SweepMechanism::Cd => "CD",
            SweepMechanism::Hybrid => "HYBRID",
            SweepMechanism::HybridOpt => "HYBRID_OPT",
        }
    }
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub points: u32,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweptVariable,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub linspace: Option<Linspace>,
    pub params: ParamsConfig,
    pub mechanisms: Vec<SweepMechanism>,
    #[serde(default)]
    pub description: Option<String>,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn value_list(&self) -> Result<Vec<f64>, String> {
        let values = match (&self.values, &self.linspace) {
            (Some(v), None) => v.clone(),
            (None, Some(l)) => linspace(l)?,
            _ => return Err("give exactly one of `values` and `linspace`".into()),
        };
        if values.is_empty() {
            return Err("value list is empty".into());
        }
        if self.mechanisms.is_empty() {
            return Err("mechanism list is empty".into());
        }
        Ok(values)
    }
}

fn linspace(l: &Linspace) -> Result<Vec<f64>, String> {
    match l.points {
        0 => Err("linspace needs at least one point".into()),
        1 => Ok(vec![l.start]),
        p => {
            let last = f64::from(p - 1);
            Ok((0..p).map(|i| if i == p - 1 { l.stop } else { l.start + (l.stop - l.start) * f64::from(i) / last }).collect())
        }
    }
}

/// Parameters at one swept value, validated.
pub fn apply(base: &SystemParams, var: SweptVariable, value: f64) -> hcrpla::Result<SystemParams> {
    match var {
        SweptVariable::HMin => base.with_h_min(value),
        SweptVariable::LambdaRatio => base.with_lambda_ratio(value),
        SweptVariable::LambdaBDb => base.with_lambda_b_db(value),
        SweptVariable::Frames => {
            if value.fract() != 0.0 || !(1.0..=f64::from(u32::MAX)).contains(&value) {
                return Err(hcrpla::Error::Domain { function: "F (positive integer)", value });
            }
            base.with_frames(value as u32)
        }
        SweptVariable::Alpha => {
            let mut cfg = base.to_config();
            cfg.alpha = Some(value);
            cfg.pilot_count = None;
            SystemParams::from_config(&cfg)
        }
    }
}

pub struct SweepRow {
    pub value: f64,
    pub mechanism: SweepMechanism,
    pub report: SecurityReport,
}

fn evaluate(params: &SystemParams, var: SweptVariable, mech: SweepMechanism, opts: &AnalysisOptions) -> hcrpla::Result<SecurityReport> {
    match mech {
        SweepMechanism::Ch => hybrid::baseline_ch_with(params, opts),
        SweepMechanism::Cd => hybrid::baseline_cd(params),
        SweepMechanism::Hybrid => hybrid::hybrid_bits_with(params, opts),
        SweepMechanism::HybridOpt => {
            let mut grid = OptimizationGrid::full(params);
            match var {
                SweptVariable::HMin => grid = grid.with_h_min(params.h_min()),
                SweptVariable::Alpha => grid = grid.with_pilot_count(params.pilot_count()),
                _ => {}
            }
            Ok(hybrid::optimize_with(params, &grid, opts)?.best.report)
        }
    }
}

/// Evaluates every (value, mechanism) pair; rows come back in input order.
pub fn run(spec: &SweepSpec, opts: &AnalysisOptions) -> CliResult<Vec<SweepRow>> {
    let values = spec.value_list().map_err(CliError::Usage)?;
    let base = SystemParams::from_config(&spec.params)
        .map_err(|e| CliError::Usage(format!("sweep params: {e}")))?;
    let points = values
        .iter()
        .map(|&v| apply(&base, spec.variable, v).map_err(|e| CliError::Usage(format!("{} = {v}: {e}", spec.variable.name()))))
        .collect::<CliResult<Vec<_>>>()?;
    let jobs: Vec<(f64, SystemParams, SweepMechanism)> = values
        .iter()
        .zip(&points)
        .flat_map(|(&v, p)| spec.mechanisms.iter().map(move |&m| (v, *p, m)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(value, params, mechanism)| {
            Ok(SweepRow { value, mechanism, report: evaluate(&params, spec.variable, mechanism, opts)? })
        })
        .collect::<hcrpla::Result<Vec<_>>>()?;
    Ok(rows)
}

pub fn to_csv(var: SweptVariable, rows: &[SweepRow]) -> CliResult<Vec<u8>> {
    let mut w = csv_writer();
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let r = &row.report;
        w.write_record([
            var.name().to_string(),
            fmt_num(row.value),
            row.mechanism.label().to_string(),
            fmt_num(r.alpha_used()),
            fmt_num(r.h_min_used()),
            fmt_num(r.b_ch()),
            fmt_num(r.b_key()),
            fmt_num(r.b_tot()),
        ])?;
    }
    finish_csv(w)
}
