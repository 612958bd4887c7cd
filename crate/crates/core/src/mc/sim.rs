use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::batch::TrialBatch;
use super::rng::map_blocks;
use crate::chsec;
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Below this many expected successes an attack run cannot resolve the
/// analytic probability.
pub const MIN_EXPECTED_EVENTS: f64 = 10.0;

/// Sample moments of the per-frame pilot estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PilotMoments {
    pub trials: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// `1 / (lambda_B * pilots)`
    pub expected_variance: f64,
}

#[derive(Clone, Copy, Default)]
struct Welford {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Welford) -> Welford {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Welford {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }
}

/// Symbol-level simulation of the pilot-based amplitude estimate.
///
/// Each pilot has unit modulus and a uniform random phase; the channel phase
/// is taken as already compensated. Noise is circular complex Gaussian with
/// variance `1 / lambda_B` per real dimension, so the real part of `y / x`
/// carries exactly the noise variance `sigma_B^2` and the average over
/// `pilots` symbols has variance `sigma_B^2 / pilots`.
pub fn simulate_pilot_estimation(h: f64, lambda_b: f64, pilots: u32, trials: u64, seed: u64) -> Result<PilotMoments> {
    if pilots == 0 {
        return Err(Error::NoPilots);
    }
    if !(lambda_b > 0.0) {
        return Err(Error::NonPositiveSnr { name: "lambda_B", value: lambda_b });
    }
    if trials < 2 {
        return Err(Error::Domain { function: "simulate_pilot_estimation (trials)", value: trials as f64 });
    }
    let sigma = lambda_b.recip().sqrt();
    let per_block = map_blocks(seed, trials, |rng, len| {
        let mut acc = Welford::default();
        for _ in 0..len {
            let mut sum = 0.0;
            for _ in 0..pilots {
                let x = Complex64::from_polar(1.0, TAU * rng.random::<f64>());
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let y = x * h + Complex64::new(re, im) * sigma;
                sum += (y / x).re;
            }
            acc.push(sum / f64::from(pilots));
        }
        acc
    });
    let total = per_block.into_iter().fold(Welford::default(), Welford::merge);
    Ok(PilotMoments {
        trials,
        mean: total.mean,
        variance: total.m2 / (total.count - 1.0),
        expected_variance: 1.0 / (lambda_b * f64::from(pilots)),
    })
}

/// One frame sequence of challenge amplitudes and one attack guess.
///
/// Both vectors follow the same law: magnitude uniform on
/// `[h_min, h_max]`, sign uniform on `{-1, +1}`, independently per frame.
/// The admissible set is therefore the union of `2^F` orthant cubes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChallengeDraw {
    pub h: Vec<f64>,
    pub a: Vec<f64>,
}

impl ChallengeDraw {
    pub fn sample<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> Self {
        let f = params.frames() as usize;
        let mut draw = ChallengeDraw { h: vec![0.0; f], a: vec![0.0; f] };
        draw.resample(params, rng);
        draw
    }

    pub fn resample<R: Rng + ?Sized>(&mut self, params: &SystemParams, rng: &mut R) {
        fill_signed_uniform(&mut self.h, params.h_min(), params.h_max(), rng);
        fill_signed_uniform(&mut self.a, params.h_min(), params.h_max(), rng);
    }
}

fn signed_uniform<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    let magnitude = lo + (hi - lo) * rng.random::<f64>();
    if rng.random::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

fn fill_signed_uniform<R: Rng + ?Sized>(out: &mut [f64], lo: f64, hi: f64, rng: &mut R) {
    for v in out {
        *v = signed_uniform(lo, hi, rng);
    }
}

/// Law of the true channel in false alarm runs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ChannelLaw {
    /// Same law as the challenge draw.
    #[default]
    Uniform,
    /// Every frame uses this amplitude.
    Pinned(f64),
}

/// Rejection rate of legitimate traffic: per trial the estimates are
/// `h_k + N(0, sigma_h^2)` and the message is rejected when `L > tau`.
pub fn measure_false_alarm(params: &SystemParams, tau: f64, trials: u64, seed: u64) -> Result<TrialBatch> {
    measure_false_alarm_with(params, tau, trials, seed, ChannelLaw::Uniform)
}

pub fn measure_false_alarm_with(
    params: &SystemParams,
    tau: f64,
    trials: u64,
    seed: u64,
    law: ChannelLaw,
) -> Result<TrialBatch> {
    if trials == 0 {
        return Err(Error::ZeroCount { name: "trials" });
    }
    let sigma_h_sq = chsec::estimator_variance(params)?;
    let sigma_h = sigma_h_sq.sqrt();
    let f = params.frames() as usize;
    let per_block = map_blocks(seed, trials, |rng, len| -> Result<u64> {
        let mut h = vec![0.0; f];
        let mut h_hat = vec![0.0; f];
        let mut rejected = 0;
        for _ in 0..len {
            match law {
                ChannelLaw::Uniform => fill_signed_uniform(&mut h, params.h_min(), params.h_max(), rng),
                ChannelLaw::Pinned(v) => h.fill(v),
            }
            for (est, truth) in h_hat.iter_mut().zip(&h) {
                let z: f64 = rng.sample(StandardNormal);
                *est = truth + sigma_h * z;
            }
            if chsec::test_statistic(&h_hat, &h, sigma_h_sq)? > tau {
                rejected += 1;
            }
        }
        Ok(rejected)
    });
    let rejected = per_block.into_iter().sum::<Result<u64>>()?;
    TrialBatch::new(trials, rejected, seed)
}

/// Analytic number of attack successes in `trials` runs.
pub fn expected_events(params: &SystemParams, tau: f64, trials: u64) -> Result<f64> {
    Ok(chsec::log2_p_succ(params, tau)?.exp2() * trials as f64)
}

/// Success rate of a uniform guessing attack with noiseless injection: the
/// attack succeeds when `sum_k (a_k - h_k)^2 <= (sqrt(2F) tau + F) sigma_h^2`.
///
/// Logs a warning when no success was seen and fewer than
/// [`MIN_EXPECTED_EVENTS`] were expected.
pub fn measure_attack_success(params: &SystemParams, tau: f64, trials: u64, seed: u64) -> Result<TrialBatch> {
    if trials == 0 {
        return Err(Error::ZeroCount { name: "trials" });
    }
    let sigma_h_sq = chsec::estimator_variance(params)?;
    let r2 = chsec::radius_sq(params.frames(), tau, sigma_h_sq);
    let accepting = chsec::radius_sq(params.frames(), tau, 1.0) > 0.0;
    let successes: u64 = map_blocks(seed, trials, |rng, len| {
        let mut draw = ChallengeDraw::sample(params, rng);
        let mut hits = 0;
        for i in 0..len {
            if i > 0 {
                draw.resample(params, rng);
            }
            let d2: f64 = draw.a.iter().zip(&draw.h).map(|(a, h)| (a - h) * (a - h)).sum();
            if accepting && d2 <= r2 {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum();
    let expected = expected_events(params, tau, trials)?;
    if successes == 0 && expected < MIN_EXPECTED_EVENTS {
        log::warn!(
            "insufficient resolution: {expected:.3e} expected successes in {trials} trials; the estimate cannot confirm P_succ"
        );
    }
    TrialBatch::new(trials, successes, seed)
}
