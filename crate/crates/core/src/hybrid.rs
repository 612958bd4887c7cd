//! Hybrid mechanism: channel check plus wiretap key, the two single-mechanism
//! baselines, and a grid optimizer over pilot count and `h_min`.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::cdsec::{self, RateReport};
use crate::chsec::{self, ChannelGeometry, ThresholdRule};
use crate::error::{Error, Result};
use crate::params::{SecurityReport, SystemParams};
use crate::specfun::QuadratureSpec;

/// Knobs shared by every analysis entry point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub threshold: ThresholdRule,
    /// Fraction of the false alarm budget given to the channel check when
    /// both checks run; the rest goes to decoding.
    pub pfa_split: f64,
    pub quadrature: QuadratureSpec,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { threshold: ThresholdRule::Asymptotic, pfa_split: 0.5, quadrature: QuadratureSpec::default() }
    }
}

impl AnalysisOptions {
    fn check(&self) -> Result<()> {
        if self.pfa_split > 0.0 && self.pfa_split < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidProbability { name: "pfa_split", value: self.pfa_split })
        }
    }
}

/// Everything computed for one hybrid operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HybridBreakdown {
    pub p_fa_ch: f64,
    /// `None` when every symbol is a pilot and no codeword is sent.
    pub p_fa_cd: Option<f64>,
    pub geometry: ChannelGeometry,
    pub rates: RateReport,
    pub report: SecurityReport,
}

/// Hybrid analysis at the parameters as given.
///
/// With `1 <= alpha n <= n - 1` both checks run and the false alarm budget
/// is split. With `alpha n = n` no codeword is sent, only the channel check
/// runs, and it gets the whole budget.
pub fn hybrid_analysis(params: &SystemParams, opts: &AnalysisOptions) -> Result<HybridBreakdown> {
    opts.check()?;
    if params.pilot_count() == 0 {
        return Err(Error::NoPilots);
    }
    let (p_fa_ch, p_fa_cd) = if params.n_data() == 0 {
        (params.p_fa(), None)
    } else {
        (opts.pfa_split * params.p_fa(), Some((1.0 - opts.pfa_split) * params.p_fa()))
    };
    let geometry = channel_geometry(params, p_fa_ch, opts.threshold)?;
    let rates = cdsec::b_key_hybrid_with(params, p_fa_cd.unwrap_or(0.5), opts.quadrature)?;
    let report = SecurityReport::hybrid(geometry.b_ch, rates.b_key(), params.alpha(), params.h_min());
    Ok(HybridBreakdown { p_fa_ch, p_fa_cd, geometry, rates, report })
}

fn channel_geometry(params: &SystemParams, p_fa_ch: f64, rule: ThresholdRule) -> Result<ChannelGeometry> {
    chsec::geometry(params, chsec::threshold(p_fa_ch, params.frames(), rule)?)
}

/// `b_hyb = b_ch + b_key` at the parameters as given.
pub fn hybrid_bits(params: &SystemParams) -> Result<SecurityReport> {
    hybrid_bits_with(params, &AnalysisOptions::default())
}

pub fn hybrid_bits_with(params: &SystemParams, opts: &AnalysisOptions) -> Result<SecurityReport> {
    Ok(hybrid_analysis(params, opts)?.report)
}

/// Channel-only baseline: all pilots, `h_min = 0`, the full false alarm
/// budget on the channel check.
pub fn baseline_ch(params: &SystemParams) -> Result<SecurityReport> {
    baseline_ch_with(params, &AnalysisOptions::default())
}

pub fn baseline_ch_with(params: &SystemParams, opts: &AnalysisOptions) -> Result<SecurityReport> {
    Ok(baseline_ch_geometry(params, opts)?.1)
}

pub fn baseline_ch_geometry(params: &SystemParams, opts: &AnalysisOptions) -> Result<(ChannelGeometry, SecurityReport)> {
    let forced = params.with_pilot_count(params.n())?.with_h_min(0.0)?;
    let geometry = channel_geometry(&forced, params.p_fa(), opts.threshold)?;
    Ok((geometry, SecurityReport::channel(geometry.b_ch, 1.0, 0.0)))
}

/// Coding-only baseline: no pilots, amplitude fixed at `h_max`, the full
/// false alarm budget on decoding.
pub fn baseline_cd(params: &SystemParams) -> Result<SecurityReport> {
    Ok(baseline_cd_rates(params)?.1)
}

pub fn baseline_cd_rates(params: &SystemParams) -> Result<(RateReport, SecurityReport)> {
    let rates = cdsec::b_key_cd(params, params.p_fa())?;
    Ok((rates, SecurityReport::coding(rates.b_key(), 0.0, params.h_max())))
}

/// Cells searched by [`optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationGrid {
    pilot_counts: Vec<u32>,
    h_min_values: Vec<f64>,
}

impl OptimizationGrid {
    /// Every pilot count `1..=n` and 101 uniform `h_min` points on
    /// `[0, h_max]`.
    pub fn full(params: &SystemParams) -> Self {
        OptimizationGrid {
            pilot_counts: (1..=params.n()).collect(),
            h_min_values: (0..=100).map(|i| params.h_max() * f64::from(i) / 100.0).collect(),
        }
    }

    pub fn new(pilot_counts: Vec<u32>, h_min_values: Vec<f64>) -> Self {
        OptimizationGrid { pilot_counts, h_min_values }
    }

    /// Keeps `h_min` at the given value and searches pilot counts only.
    pub fn with_h_min(mut self, h_min: f64) -> Self {
        self.h_min_values = vec![h_min];
        self
    }

    pub fn with_pilot_count(mut self, pilots: u32) -> Self {
        self.pilot_counts = vec![pilots];
        self
    }

    pub fn pilot_counts(&self) -> &[u32] {
        &self.pilot_counts
    }

    pub fn h_min_values(&self) -> &[f64] {
        &self.h_min_values
    }

    pub fn len(&self) -> usize {
        self.pilot_counts.len() * self.h_min_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self, params: &SystemParams) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        if let Some(p) = self.pilot_counts.iter().find(|&&p| p == 0 || p > params.n()) {
            return Err(Error::InvalidGrid(format!("pilot count {p} outside 1..={}", params.n())));
        }
        if let Some(h) = self.h_min_values.iter().find(|&&h| !(0.0..=params.h_max()).contains(&h)) {
            return Err(Error::InvalidGrid(format!("h_min {h} outside [0, {}]", params.h_max())));
        }
        Ok(())
    }

    fn cells(&self) -> Vec<(u32, f64)> {
        self.pilot_counts
            .iter()
            .flat_map(|&p| self.h_min_values.iter().map(move |&h| (p, h)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCell {
    pub pilot_count: u32,
    pub h_min: f64,
    pub report: SecurityReport,
}

impl GridCell {
    /// Total order used to pick the optimum: larger `b_tot`, then fewer
    /// pilots, then larger `h_min`. `Greater` means preferred.
    fn preference(&self, other: &GridCell) -> Ordering {
        self.report
            .b_tot()
            .total_cmp(&other.report.b_tot())
            .then_with(|| other.pilot_count.cmp(&self.pilot_count))
            .then_with(|| self.h_min.total_cmp(&other.h_min))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub best: GridCell,
    /// All cells in grid order (pilot count major, `h_min` minor).
    pub cells: Vec<GridCell>,
}

/// Best hybrid report over the grid.
pub fn optimize(params: &SystemParams, grid: &OptimizationGrid) -> Result<SecurityReport> {
    Ok(optimize_with(params, grid, &AnalysisOptions::default())?.best.report)
}

/// Exhaustive grid search. Cells are evaluated in parallel; the winner
/// depends only on the set of cells, not on evaluation order.
pub fn optimize_with(params: &SystemParams, grid: &OptimizationGrid, opts: &AnalysisOptions) -> Result<OptimizationResult> {
    grid.check(params)?;
    let cells = grid
        .cells()
        .into_par_iter()
        .map(|(pilots, h_min)| {
            let point = params.with_pilot_count(pilots)?.with_h_min(h_min)?;
            Ok(GridCell { pilot_count: pilots, h_min, report: hybrid_bits_with(&point, opts)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = select_best(&cells).expect("grid is non-empty");
    Ok(OptimizationResult { best, cells })
}

fn select_best(cells: &[GridCell]) -> Option<GridCell> {
    cells.iter().copied().max_by(|a, b| a.preference(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamsConfig;
    use proptest::prelude::*;

    fn reference(db: f64, ratio: f64) -> SystemParams {
        SystemParams::from_config(&ParamsConfig {
            n: 10,
            frames: 100,
            alpha: None,
            pilot_count: Some(1),
            b_m: 600.0,
            p_fa: 1e-7,
            lambda_b_db: db,
            lambda_ratio: ratio,
            h_min: 0.5,
            h_max: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn pfa_is_split_in_halves() {
        let b = hybrid_analysis(&reference(30.0, 0.3), &AnalysisOptions::default()).unwrap();
        assert_eq!(b.p_fa_ch, 5e-8);
        assert_eq!(b.p_fa_cd, Some(5e-8));
        let direct = chsec::equivalent_key_bits(&reference(30.0, 0.3), 5e-8).unwrap();
        assert_eq!(b.geometry, direct);
        let rates = cdsec::b_key_hybrid(&reference(30.0, 0.3), 5e-8).unwrap();
        assert_eq!(b.report.b_key(), rates.b_key());
        assert_eq!(b.report.b_tot(), direct.b_ch + rates.b_key());
    }

    #[test]
    fn degenerate_range_leaves_only_coding() {
        let p = reference(50.0, 0.3).with_h_min(1.0).unwrap();
        let r = hybrid_bits(&p).unwrap();
        assert_eq!(r.b_ch(), 0.0);
        assert_eq!(r.b_tot(), r.b_key());
    }

    #[test]
    fn strong_eavesdropper_leaves_only_channel() {
        let p = reference(30.0, 0.99).with_h_min(0.2).unwrap();
        let r = hybrid_bits(&p).unwrap();
        assert_eq!(r.b_key(), 0.0);
        assert_eq!(r.b_tot(), r.b_ch());
    }

    #[test]
    fn all_pilot_cell_is_the_channel_baseline() {
        let p = reference(30.0, 0.6);
        let all = hybrid_analysis(&p.with_pilot_count(10).unwrap().with_h_min(0.0).unwrap(), &AnalysisOptions::default())
            .unwrap();
        assert_eq!(all.p_fa_cd, None);
        assert_eq!(all.report.b_tot(), baseline_ch(&p).unwrap().b_tot());
    }

    #[test]
    fn no_pilots_is_rejected() {
        let p = reference(30.0, 0.6).with_pilot_count(0).unwrap();
        assert_eq!(hybrid_bits(&p), Err(Error::NoPilots));
    }

    #[test]
    fn baselines_force_their_configuration() {
        let p = reference(30.0, 0.6);
        let ch = baseline_ch(&p).unwrap();
        assert_eq!((ch.alpha_used(), ch.h_min_used(), ch.b_key()), (1.0, 0.0, 0.0));
        let forced = p.with_pilot_count(10).unwrap().with_h_min(0.0).unwrap();
        assert_eq!(ch.b_ch(), chsec::equivalent_key_bits(&forced, 1e-7).unwrap().b_ch);
        let cd = baseline_cd(&p).unwrap();
        assert_eq!((cd.alpha_used(), cd.h_min_used(), cd.b_ch()), (0.0, 1.0, 0.0));
        assert_eq!(cd.b_key(), cdsec::b_key_cd(&p, 1e-7).unwrap().b_key());
    }

    #[test]
    fn channel_baseline_grows_with_snr_and_frames() {
        let low = baseline_ch(&reference(20.0, 0.3)).unwrap().b_tot();
        let high = baseline_ch(&reference(50.0, 0.3)).unwrap().b_tot();
        assert!(high > low);
        let mut prev = 0.0;
        for f in [1, 2, 5, 10, 50, 100, 500] {
            let b = baseline_ch(&reference(30.0, 0.3).with_frames(f).unwrap()).unwrap().b_tot();
            assert!(b >= prev, "F = {f}");
            prev = b;
        }
    }

    #[test]
    fn coding_baseline_vanishes_without_secrecy_gap() {
        let p = reference(30.0, 1.0);
        assert_eq!(baseline_cd(&p).unwrap().b_tot(), 0.0);
        let p = reference(30.0, 0.3).with_b_m(20_000).unwrap();
        assert_eq!(baseline_cd(&p).unwrap().b_tot(), 0.0);
    }

    #[test]
    fn single_cell_grid_is_hybrid_bits() {
        let p = reference(30.0, 0.3);
        let grid = OptimizationGrid::new(vec![3], vec![0.7]);
        let best = optimize(&p, &grid).unwrap();
        let direct = hybrid_bits(&p.with_pilot_count(3).unwrap().with_h_min(0.7).unwrap()).unwrap();
        assert_eq!(best, direct);
    }

    #[test]
    fn optimum_dominates_every_cell() {
        let p = reference(50.0, 0.3);
        let result = optimize_with(&p, &OptimizationGrid::full(&p), &AnalysisOptions::default()).unwrap();
        assert_eq!(result.cells.len(), 1010);
        for c in &result.cells {
            assert!(result.best.report.b_tot() >= c.report.b_tot());
        }
        assert!(result.best.h_min > 0.8);
    }

    #[test]
    fn grid_validation() {
        let p = reference(30.0, 0.3);
        assert!(optimize(&p, &OptimizationGrid::new(vec![], vec![0.5])).is_err());
        assert!(optimize(&p, &OptimizationGrid::new(vec![0], vec![0.5])).is_err());
        assert!(optimize(&p, &OptimizationGrid::new(vec![11], vec![0.5])).is_err());
        assert!(optimize(&p, &OptimizationGrid::new(vec![1], vec![1.5])).is_err());
    }

    #[test]
    fn ties_prefer_fewer_pilots_then_larger_h_min() {
        let r = SecurityReport::hybrid(1.0, 2.0, 0.0, 0.0);
        let cells = [
            GridCell { pilot_count: 3, h_min: 0.9, report: r },
            GridCell { pilot_count: 2, h_min: 0.1, report: r },
            GridCell { pilot_count: 2, h_min: 0.4, report: r },
        ];
        let best = select_best(&cells).unwrap();
        assert_eq!((best.pilot_count, best.h_min), (2, 0.4));
    }

    proptest! {
        #[test]
        fn selection_is_order_invariant(seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let p = reference(40.0, 0.45);
            let grid = OptimizationGrid::new(vec![1, 2, 5, 10], vec![0.0, 0.3, 0.8, 0.9, 1.0]);
            let result = optimize_with(&p, &grid, &AnalysisOptions::default()).unwrap();
            let mut shuffled = result.cells.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(select_best(&shuffled), Some(result.best));
            let mut pilots = grid.pilot_counts().to_vec();
            let mut hs = grid.h_min_values().to_vec();
            pilots.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 1));
            hs.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 2));
            let again = optimize_with(&p, &OptimizationGrid::new(pilots, hs), &AnalysisOptions::default()).unwrap();
            prop_assert_eq!(again.best, result.best);
        }
    }
}
