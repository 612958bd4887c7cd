use std::fmt::Write as _;

use clap::ValueEnum;
use hcrpla::chsec::{self, ThresholdRule};
use hcrpla::mc::{self, TrialBatch, MIN_EXPECTED_EVENTS};
use hcrpla::specfun::chi_square_sf;
use hcrpla::SystemParams;

use crate::error::CliResult;
use crate::output::fmt_num;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    All,
    FalseAlarm,
    Attack,
    Pilot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Insufficient,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Insufficient => "INSUFFICIENT",
        }
    }
}

/// One line of the analytic versus empirical table. `low` and `high` are
/// the Wilson 3 sigma interval for rates and the 3 sigma band around the
/// reference for pilot moments.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub check: &'static str,
    pub trials: u64,
    pub count: Option<u64>,
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
    pub reference: f64,
    pub status: Status,
}

impl Row {
    fn from_batch(check: &'static str, batch: &TrialBatch, reference: f64, status: Status) -> Self {
        Row {
            check,
            trials: batch.trials,
            count: Some(batch.successes),
            estimate: batch.estimate,
            low: batch.wilson_3sigma_low,
            high: batch.wilson_3sigma_high,
            reference,
            status,
        }
    }

    fn band(check: &'static str, trials: u64, estimate: f64, reference: f64, half_width: f64) -> Self {
        let status = if (estimate - reference).abs() <= half_width { Status::Pass } else { Status::Fail };
        Row {
            check,
            trials,
            count: None,
            estimate,
            low: reference - half_width,
            high: reference + half_width,
            reference,
            status,
        }
    }
}

pub fn run(params: &SystemParams, rule: ThresholdRule, check: Check, trials: u64, seed: u64) -> CliResult<Vec<Row>> {
    let tau = chsec::threshold(params.p_fa(), params.frames(), rule)?;
    let f = params.frames();
    let mut rows = Vec::new();
    if matches!(check, Check::All | Check::FalseAlarm) {
        let batch = mc::measure_false_alarm(params, tau, trials, seed)?;
        let f = f64::from(f);
        let exact = chi_square_sf((2.0 * f).sqrt() * tau + f, params.frames())?;
        let status = if batch.contains(exact) { Status::Pass } else { Status::Fail };
        rows.push(Row::from_batch("false_alarm", &batch, exact, status));
    }
    if matches!(check, Check::All | Check::Attack) {
        let geometry = chsec::geometry(params, tau)?;
        if geometry.boundary_effects_significant(params.edge()) {
            log::warn!("sphere radius exceeds 0.1 of the cube edge; analytic P_succ overestimates the attack");
        }
        let analytic = geometry.log2_p_succ.exp2();
        let batch = mc::measure_attack_success(params, tau, trials, seed)?;
        let expected = analytic * trials as f64;
        let status = if batch.successes == 0 && expected < MIN_EXPECTED_EVENTS {
            Status::Insufficient
        } else if batch.contains(analytic) {
            Status::Pass
        } else {
            Status::Fail
        };
        rows.push(Row::from_batch("attack_success", &batch, analytic, status));
    }
    if matches!(check, Check::All | Check::Pilot) {
        let m = mc::simulate_pilot_estimation(params.h_max(), params.lambda_b(), params.pilot_count(), trials, seed)?;
        let var = m.expected_variance;
        let n = trials as f64;
        rows.push(Row::band("pilot_mean", trials, m.mean, params.h_max(), 3.0 * (var / n).sqrt()));
        rows.push(Row::band("pilot_variance", trials, m.variance, var, 3.0 * var * (2.0 / (n - 1.0)).sqrt()));
    }
    Ok(rows)
}

pub fn render(rows: &[Row], seed: u64) -> String {
    let mut out = String::new();
    writeln!(out, "# seed {seed}").unwrap();
    let header = ["check", "trials", "count", "estimate", "low_3sigma", "high_3sigma", "reference", "status"];
    let body: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            [
                r.check.to_string(),
                r.trials.to_string(),
                r.count.map_or_else(|| "-".to_string(), |c| c.to_string()),
                fmt_num(r.estimate),
                fmt_num(r.low),
                fmt_num(r.high),
                fmt_num(r.reference),
                r.status.label().to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for line in &body {
        for (w, cell) in widths.iter_mut().zip(line) {
            *w = (*w).max(cell.len());
        }
    }
    let mut push_line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        writeln!(out, "{}", padded.join("  ").trim_end()).unwrap();
    };
    push_line(header.to_vec());
    for line in &body {
        push_line(line.iter().map(String::as_str).collect());
    }
    out
}

/// First row that did not pass, if any.
pub fn first_problem(rows: &[Row]) -> Option<&Row> {
    rows.iter().find(|r| r.status != Status::Pass)
}
