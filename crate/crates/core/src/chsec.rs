//! Channel-based challenge-response security.
//!
//! The verifier draws one amplitude per frame uniformly from
//! `[h_min, h_max]` and accepts the message when the pilot estimates fall in
//! a hypersphere around the drawn vector. An attacker who does not know the
//! draw guesses a point in the admissible set; the ratio of the sphere
//! volume to the set volume (`2^F` sign orthants of an `F`-cube with edge
//! `h_max - h_min`) is its success probability, and `-log2` of that is the
//! equivalent key length.
//!
//! Acceptance convention: the message is authentic iff `L <= tau`, so the
//! false alarm probability is `P(L > tau)`, which tends to `Q(tau)` for
//! large `F`.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::specfun::{self, chi_square_sf, log_gamma, q_inverse};

/// How the test threshold is derived from a false alarm budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    /// `tau = Q^-1(p)`, the large-F Gaussian limit.
    #[default]
    Asymptotic,
    /// Exact standardized chi-square quantile at the actual F.
    ExactChiSquare,
}

/// Sphere-in-cube geometry of the channel check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelGeometry {
    pub tau: f64,
    pub sigma_h_sq: f64,
    pub radius: f64,
    pub log2_v_sphere: f64,
    pub log2_v_cube: f64,
    pub log2_p_succ: f64,
    pub b_ch: f64,
}

impl ChannelGeometry {
    /// True when the sphere is large enough, relative to the cube edge, that
    /// the neglected boundary effects start to matter.
    pub fn boundary_effects_significant(&self, edge: f64) -> bool {
        edge > 0.0 && self.radius > 0.1 * edge
    }
}

/// Asymptotic Gaussian threshold, `Q^-1(p_fa_ch)`.
pub fn threshold_from_pfa(p_fa_ch: f64) -> Result<f64> {
    q_inverse(p_fa_ch)
}

/// Threshold with exact false alarm `p_fa_ch` at `frames` frames:
/// solves `chi2_sf(sqrt(2F) tau + F; F) = p_fa_ch`.
pub fn threshold_from_pfa_exact(p_fa_ch: f64, frames: u32) -> Result<f64> {
    if !(p_fa_ch > 0.0 && p_fa_ch < 1.0) {
        return Err(Error::Domain { function: "threshold_from_pfa_exact", value: p_fa_ch });
    }
    if frames == 0 {
        return Err(Error::ZeroCount { name: "F" });
    }
    let f = f64::from(frames);
    let scale = (2.0 * f).sqrt();
    let excess = |tau: f64| chi_square_sf((scale * tau + f).max(0.0), frames).map(|p| p - p_fa_ch);

    // tau below -sqrt(F/2) maps to x < 0, where the survival is 1.
    let lo = -(f / 2.0).sqrt();
    let mut hi = q_inverse(p_fa_ch)?.abs() + 1.0;
    while excess(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Convergence("threshold_from_pfa_exact (bracket)"));
        }
    }
    let mut failure = None;
    let tau = specfun::bisect_decreasing(
        |tau| match excess(tau) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(tau),
    }
}

pub fn threshold(p_fa_ch: f64, frames: u32, rule: ThresholdRule) -> Result<f64> {
    match rule {
        ThresholdRule::Asymptotic => threshold_from_pfa(p_fa_ch),
        ThresholdRule::ExactChiSquare => threshold_from_pfa_exact(p_fa_ch, frames),
    }
}

/// Standardized residual energy
/// `L = (sum_k (h_hat_k - h_k)^2 / sigma_h^2 - F) / sqrt(2F)`.
pub fn test_statistic(h_hat: &[f64], h: &[f64], sigma_h_sq: f64) -> Result<f64> {
    if h_hat.len() != h.len() {
        return Err(Error::DimensionMismatch { left: h_hat.len(), right: h.len() });
    }
    if h.is_empty() {
        return Err(Error::ZeroCount { name: "F" });
    }
    if !(sigma_h_sq > 0.0) {
        return Err(Error::Domain { function: "test_statistic (sigma_h_sq)", value: sigma_h_sq });
    }
    let f = h.len() as f64;
    let energy: f64 = h_hat.iter().zip(h).map(|(e, t)| (e - t) * (e - t)).sum();
    Ok((energy / sigma_h_sq - f) / (2.0 * f).sqrt())
}

/// Variance of the per-frame pilot estimate, `1 / (lambda_B * alpha n)`.
pub fn estimator_variance(params: &SystemParams) -> Result<f64> {
    if params.pilot_count() == 0 {
        return Err(Error::NoPilots);
    }
    Ok(1.0 / (params.lambda_b() * f64::from(params.pilot_count())))
}

/// Squared radius of the acceptance sphere, `(sqrt(2F) tau + F) sigma_h^2`,
/// floored at zero (an empty acceptance region).
pub fn radius_sq(frames: u32, tau: f64, sigma_h_sq: f64) -> f64 {
    let f = f64::from(frames);
    (((2.0 * f).sqrt() * tau + f) * sigma_h_sq).max(0.0)
}

fn log2_sphere_volume(frames: u32, radius: f64) -> Result<f64> {
    let f = f64::from(frames);
    if radius == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(0.5 * f * PI.log2() - log_gamma(0.5 * f + 1.0)? / LN_2 + f * radius.log2())
}

fn log2_cube_volume(frames: u32, edge: f64) -> f64 {
    // 2^F orthant cubes of edge E
    f64::from(frames) * (2.0 * edge).log2()
}

/// `log2` of the attack success probability, clamped at 0.
///
/// A degenerate cube (`h_min = h_max`) gives 0 (`P_succ = 1`); an empty
/// acceptance sphere gives `-inf`.
pub fn log2_p_succ(params: &SystemParams, tau: f64) -> Result<f64> {
    if params.edge() == 0.0 {
        return Ok(0.0);
    }
    let sigma_h_sq = estimator_variance(params)?;
    let radius = radius_sq(params.frames(), tau, sigma_h_sq).sqrt();
    let ratio = log2_sphere_volume(params.frames(), radius)? - log2_cube_volume(params.frames(), params.edge());
    Ok(ratio.min(0.0))
}

/// Full channel geometry with the asymptotic threshold.
pub fn equivalent_key_bits(params: &SystemParams, p_fa_ch: f64) -> Result<ChannelGeometry> {
    equivalent_key_bits_with(params, p_fa_ch, ThresholdRule::Asymptotic)
}

pub fn equivalent_key_bits_with(params: &SystemParams, p_fa_ch: f64, rule: ThresholdRule) -> Result<ChannelGeometry> {
    let g = geometry(params, threshold(p_fa_ch, params.frames(), rule)?)?;
    if g.boundary_effects_significant(params.edge()) {
        log::warn!(
            "sphere radius {:.3e} exceeds 10% of the cube edge {:.3e}; boundary effects are not modeled",
            g.radius,
            params.edge()
        );
    }
    Ok(g)
}

/// Geometry at an explicit threshold.
pub fn geometry(params: &SystemParams, tau: f64) -> Result<ChannelGeometry> {
    let sigma_h_sq = estimator_variance(params)?;
    let radius = radius_sq(params.frames(), tau, sigma_h_sq).sqrt();
    let log2_v_sphere = log2_sphere_volume(params.frames(), radius)?;
    let log2_v_cube = if params.edge() == 0.0 {
        f64::NEG_INFINITY
    } else {
        log2_cube_volume(params.frames(), params.edge())
    };
    let log2_p_succ = log2_p_succ(params, tau)?;
    Ok(ChannelGeometry {
        tau,
        sigma_h_sq,
        radius,
        log2_v_sphere,
        log2_v_cube,
        log2_p_succ,
        b_ch: -log2_p_succ + 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamsConfig;

    fn params(frames: u32, pilots: u32, db: f64, h_min: f64, h_max: f64) -> SystemParams {
        SystemParams::from_config(&ParamsConfig {
            n: 10,
            frames,
            alpha: None,
            pilot_count: Some(pilots),
            b_m: 600.0,
            p_fa: 1e-7,
            lambda_b_db: db,
            lambda_ratio: 0.3,
            h_min,
            h_max,
        })
        .unwrap()
    }

    /// Direct (non-log) evaluation; Gamma(F/2 + 1) by the recurrence from
    /// Gamma(1) = 1 or Gamma(1/2) = sqrt(pi).
    fn direct_p_succ(frames: u32, tau: f64, sigma_h: f64, edge: f64) -> f64 {
        let f = f64::from(frames);
        let mut gamma = if frames % 2 == 0 { 1.0 } else { PI.sqrt() };
        let mut z = if frames % 2 == 0 { 1.0 } else { 0.5 };
        while z < 0.5 * f + 1.0 - 1e-9 {
            gamma *= z;
            z += 1.0;
        }
        let base = PI.sqrt() * ((2.0 * f).sqrt() * tau + f).sqrt() * sigma_h / (2.0 * edge);
        (base.powf(f) / gamma).min(1.0)
    }

    #[test]
    fn gaussian_thresholds() {
        assert_eq!(threshold_from_pfa(0.5).unwrap(), 0.0);
        assert!((threshold_from_pfa(1e-7).unwrap() - 5.199_337_582_192_817).abs() < 1e-9);
        assert!((threshold_from_pfa(0.05).unwrap() - 1.644_853_626_951_472_7).abs() < 1e-12);
    }

    #[test]
    fn exact_threshold_two_frames_closed_form() {
        // chi2 with 2 dof: exp(-(2 tau + 2)/2) = p  =>  tau = -ln p - 1
        for p in [0.3, 0.05, 1e-4, 1e-9] {
            let tau = threshold_from_pfa_exact(p, 2).unwrap();
            let want = -f64::ln(p) - 1.0;
            assert!((tau - want).abs() < 1e-10 * want.abs().max(1.0), "p = {p}: {tau} vs {want}");
        }
    }

    #[test]
    fn exact_threshold_hundred_frames() {
        // mpmath root of gammainc(50, x/2) = 0.05
        let tau = threshold_from_pfa_exact(0.05, 100).unwrap();
        assert!((tau - 1.721_247_345_638_324).abs() < 1e-9);
        assert!((tau - 1.6449).abs() < 0.2);
    }

    #[test]
    fn exact_threshold_median_tends_to_zero() {
        let mut prev = f64::INFINITY;
        for f in [10, 100, 1000, 10_000] {
            let tau = threshold_from_pfa_exact(0.5, f).unwrap().abs();
            assert!(tau < prev);
            prev = tau;
        }
        assert!(prev < 0.01);
    }

    #[test]
    fn statistic_examples() {
        let h = [0.3, -0.7, 0.9, 0.5];
        let s2 = 0.04;
        assert!((test_statistic(&h, &h, s2).unwrap() + 2f64.sqrt()).abs() < 1e-15);
        let sigma = s2.sqrt();
        let hat: Vec<f64> = h.iter().enumerate().map(|(i, v)| if i % 2 == 0 { v + sigma } else { v - sigma }).collect();
        assert!(test_statistic(&hat, &h, s2).unwrap().abs() < 1e-12);
        let s2 = 0.25;
        let l = test_statistic(&[0.1 + 2.0 * 0.5, 0.4], &[0.1, 0.4], s2).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
        assert_eq!(
            test_statistic(&[1.0], &[1.0, 2.0], 1.0),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn two_frame_hand_value() {
        // sigma_h = 0.01 (30 dB, 10 pilots), tau = 0, E = 1
        let p = params(2, 10, 30.0, 0.0, 1.0);
        let got = log2_p_succ(&p, 0.0).unwrap();
        let want = (PI * 2.0 * 1e-4 / 4.0).log2();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn clamps_when_sphere_exceeds_cube() {
        let p = params(3, 1, -20.0, 0.9, 1.0);
        assert_eq!(log2_p_succ(&p, 5.0).unwrap(), 0.0);
        assert_eq!(equivalent_key_bits(&p, 1e-3).unwrap().b_ch, 0.0);
    }

    #[test]
    fn degenerate_cube_gives_no_bits() {
        let p = params(100, 5, 50.0, 0.8, 0.8);
        let g = equivalent_key_bits(&p, 1e-7).unwrap();
        assert_eq!(g.b_ch, 0.0);
        assert_eq!(g.log2_p_succ, 0.0);
    }

    #[test]
    fn hundred_frames_is_finite_and_large() {
        let p = params(100, 10, 50.0, 0.0, 1.0);
        let g = equivalent_key_bits(&p, 1e-7).unwrap();
        assert!(g.b_ch.is_finite());
        assert!(g.b_ch > 100.0 && g.b_ch < 1000.0, "{}", g.b_ch);
        assert_eq!(g.b_ch, -g.log2_p_succ);
        assert!((g.radius * g.radius - ((200f64).sqrt() * g.tau + 100.0) * g.sigma_h_sq).abs() < 1e-18);
        assert!((g.log2_p_succ - (g.log2_v_sphere - g.log2_v_cube).min(0.0)).abs() < 1e-9);
    }

    #[test]
    fn log_domain_is_stable_up_to_ten_thousand_frames() {
        for f in [1, 10, 100, 1000, 10_000] {
            let p = params(f, 10, 30.0, 0.2, 1.0);
            let g = equivalent_key_bits(&p, 1e-7).unwrap();
            assert!(g.b_ch.is_finite() && g.log2_v_sphere.is_finite(), "F = {f}");
        }
    }

    #[test]
    fn log_domain_matches_direct_formula() {
        for f in 1..=20 {
            for &(db, h_min) in &[(30.0, 0.0), (40.0, 0.5), (20.0, 0.9)] {
                let p = params(f, 4, db, h_min, 1.0);
                let tau = threshold_from_pfa(1e-3).unwrap();
                let direct = direct_p_succ(f, tau, estimator_variance(&p).unwrap().sqrt(), p.edge());
                let log_domain = log2_p_succ(&p, tau).unwrap().exp2();
                assert!(((log_domain - direct) / direct).abs() < 1e-10, "F = {f}: {log_domain} vs {direct}");
            }
        }
    }

    #[test]
    fn edge_scaling_adds_f_log2_c() {
        let base = params(50, 3, 40.0, 0.4, 0.6);
        let wide = base.with_h_min(0.2).unwrap(); // edge doubled
        let b0 = equivalent_key_bits(&base, 1e-5).unwrap().b_ch;
        let b1 = equivalent_key_bits(&wide, 1e-5).unwrap().b_ch;
        assert!((b1 - b0 - 50.0).abs() < 1e-9);
    }

    #[test]
    fn monotone_in_pilots_and_pfa() {
        let mut prev = 0.0;
        for pilots in 1..=10 {
            let b = equivalent_key_bits(&params(100, pilots, 30.0, 0.0, 1.0), 1e-7).unwrap().b_ch;
            assert!(b > prev);
            prev = b;
        }
        let p = params(100, 10, 30.0, 0.0, 1.0);
        let strict = equivalent_key_bits(&p, 1e-9).unwrap().b_ch;
        let loose = equivalent_key_bits(&p, 1e-3).unwrap().b_ch;
        assert!(loose > strict);
    }

    #[test]
    fn needs_pilots() {
        let p = params(10, 0, 30.0, 0.0, 1.0);
        assert_eq!(equivalent_key_bits(&p, 0.1), Err(Error::NoPilots));
    }

    #[test]
    fn exact_rule_is_selectable() {
        let p = params(100, 10, 30.0, 0.0, 1.0);
        let g = equivalent_key_bits_with(&p, 0.05, ThresholdRule::ExactChiSquare).unwrap();
        assert!((g.tau - 1.721_247_345_638_324).abs() < 1e-9);
    }
}
