//! Coding-based security: finite-blocklength rates and wiretap key budgets.
//!
//! Two channel models are covered. The fixed-configuration channel keeps the
//! amplitude at `h_max` and spends all `nF` symbols on the codeword. The
//! block-fading channel of the hybrid scheme draws a fresh amplitude per
//! frame and carries `n'F` data symbols, `n' = (1 - alpha) n`. In both, the
//! key length is the smaller of what the legitimate rate leaves after the
//! message and what the secrecy gap over the eavesdropper allows, floored
//! at zero.

use std::f64::consts::{LN_2, LOG2_E};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::specfun::{q_inverse, uniform_expectation, QuadratureSpec};

/// Rates and key-bit budget of one coding configuration.
///
/// `b_key_1` and `b_key_2` keep their sign so a sweep shows how far below
/// zero a regime sits; only [`RateReport::b_key`] is clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    /// Legitimate mutual information (average over the fading law for the
    /// block-fading channel), bits per symbol.
    pub i_xy: f64,
    /// Eavesdropper mutual information, bits per symbol.
    pub i_xz: f64,
    pub dispersion: f64,
    /// Finite-blocklength achievable rate, bits per symbol.
    pub rate: f64,
    /// Codeword length in symbols.
    pub symbols: u64,
    pub b_key_1: f64,
    pub b_key_2: f64,
}

impl RateReport {
    pub fn b_key(&self) -> f64 {
        self.b_key_1.min(self.b_key_2).max(0.0)
    }
}

impl Serialize for RateReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            i_xy: f64,
            i_xz: f64,
            dispersion: f64,
            rate: f64,
            symbols: u64,
            b_key_1: f64,
            b_key_2: f64,
            b_key: f64,
        }
        Repr {
            i_xy: self.i_xy,
            i_xz: self.i_xz,
            dispersion: self.dispersion,
            rate: self.rate,
            symbols: self.symbols,
            b_key_1: self.b_key_1,
            b_key_2: self.b_key_2,
            b_key: self.b_key(),
        }
        .serialize(serializer)
    }
}

/// `log2(1 + h^2 lambda_B)`.
pub fn mutual_info_fixed(h: f64, lambda_b: f64) -> f64 {
    (h * h * lambda_b).ln_1p() / LN_2
}

/// `log2(1 + lambda_T)`, with no finite-length back-off.
pub fn eavesdropper_info(lambda_t: f64) -> f64 {
    lambda_t.ln_1p() / LN_2
}

/// Gaussian-channel dispersion at SNR `s`, in bits^2.
pub fn gaussian_dispersion(s: f64) -> f64 {
    s * (s + 2.0) * LOG2_E * LOG2_E / ((s + 1.0) * (s + 1.0))
}

/// Finite-blocklength rate of the fixed channel at `h_max` over all `nF`
/// symbols.
pub fn rate_cd(params: &SystemParams, p_fa_cd: f64) -> Result<f64> {
    let s = params.h_max() * params.h_max() * params.lambda_b();
    let symbols = f64::from(params.n()) * f64::from(params.frames());
    Ok(mutual_info_fixed(params.h_max(), params.lambda_b())
        - (gaussian_dispersion(s) / symbols).sqrt() * q_inverse(p_fa_cd)?)
}

/// Key budget of pure coding-based authentication (no pilots, amplitude
/// fixed at `h_max`).
pub fn b_key_cd(params: &SystemParams, p_fa_cd: f64) -> Result<RateReport> {
    let s = params.h_max() * params.h_max() * params.lambda_b();
    let symbols = u64::from(params.n()) * u64::from(params.frames());
    let rate = rate_cd(params, p_fa_cd)?;
    let i_xz = eavesdropper_info(params.lambda_t());
    let total = symbols as f64;
    Ok(RateReport {
        i_xy: mutual_info_fixed(params.h_max(), params.lambda_b()),
        i_xz,
        dispersion: gaussian_dispersion(s),
        rate,
        symbols,
        b_key_1: total * rate - params.b_m(),
        b_key_2: total * (rate - i_xz),
    })
}

/// Per-frame statistics of the legitimate channel under a uniform amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FadingMoments {
    /// `E[I_k]`
    pub mean_info: f64,
    /// `Var[I_k]`
    pub var_info: f64,
    /// `E[1 / (1 + h^2 lambda_B)]`
    pub mean_inv: f64,
}

pub fn fading_moments(h_min: f64, h_max: f64, lambda_b: f64, spec: QuadratureSpec) -> Result<FadingMoments> {
    let info = |h: f64| mutual_info_fixed(h, lambda_b);
    let inv = |h: f64| 1.0 / (1.0 + h * h * lambda_b);
    if h_min == h_max {
        return Ok(FadingMoments { mean_info: info(h_min), var_info: 0.0, mean_inv: inv(h_min) });
    }
    let mean_info = uniform_expectation(info, h_min, h_max, spec)?;
    // Centered second moment: E[I^2] - E[I]^2 cancels badly at high SNR.
    let var_info = uniform_expectation(
        |h| {
            let d = info(h) - mean_info;
            d * d
        },
        h_min,
        h_max,
        spec,
    )?;
    if var_info < -1e-9 {
        return Err(Error::Convergence("fading variance"));
    }
    let mean_inv = uniform_expectation(inv, h_min, h_max, spec)?;
    Ok(FadingMoments { mean_info, var_info: var_info.max(0.0), mean_inv })
}

fn block_fading_dispersion(n_data: u32, m: &FadingMoments) -> f64 {
    f64::from(n_data) * m.var_info + 1.0 - m.mean_inv * m.mean_inv
}

/// Block-fading dispersion `n' Var[I] + 1 - E^2[1 / (1 + h^2 lambda_B)]`.
pub fn dispersion_block_fading(params: &SystemParams) -> Result<f64> {
    dispersion_block_fading_with(params, QuadratureSpec::default())
}

pub fn dispersion_block_fading_with(params: &SystemParams, spec: QuadratureSpec) -> Result<f64> {
    let m = fading_moments(params.h_min(), params.h_max(), params.lambda_b(), spec)?;
    Ok(block_fading_dispersion(params.n_data(), &m))
}

/// Average finite-blocklength rate over `n'F` block-fading data symbols.
pub fn avg_rate_hybrid(params: &SystemParams, p_fa_cd: f64) -> Result<f64> {
    Ok(b_key_hybrid_with(params, p_fa_cd, QuadratureSpec::default())?.rate)
}

/// Key budget of the coding part of the hybrid scheme.
///
/// With `alpha = 1` there is no codeword: the report has zero rate and
/// `b_key = 0`.
pub fn b_key_hybrid(params: &SystemParams, p_fa_cd: f64) -> Result<RateReport> {
    b_key_hybrid_with(params, p_fa_cd, QuadratureSpec::default())
}

pub fn b_key_hybrid_with(params: &SystemParams, p_fa_cd: f64, spec: QuadratureSpec) -> Result<RateReport> {
    let m = fading_moments(params.h_min(), params.h_max(), params.lambda_b(), spec)?;
    let back_off = q_inverse(p_fa_cd)?;
    let i_xz = eavesdropper_info(params.lambda_t());
    let dispersion = block_fading_dispersion(params.n_data(), &m);
    let symbols = u64::from(params.n_data()) * u64::from(params.frames());
    if symbols == 0 {
        return Ok(RateReport {
            i_xy: m.mean_info,
            i_xz,
            dispersion,
            rate: 0.0,
            symbols,
            b_key_1: -params.b_m(),
            b_key_2: 0.0,
        });
    }
    let total = symbols as f64;
    let rate = m.mean_info - (dispersion / total).sqrt() * back_off;
    Ok(RateReport {
        i_xy: m.mean_info,
        i_xz,
        dispersion,
        rate,
        symbols,
        b_key_1: total * rate - params.b_m(),
        b_key_2: total * (rate - i_xz),
    })
}
