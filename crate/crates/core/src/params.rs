//! Scenario parameters, their JSON form, and the per-mechanism report.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Converts a decibel value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// JSON document describing one operating point.
///
/// SNRs are given in the form used by parameter studies: the legitimate SNR
/// in dB and the attacker SNR as a linear ratio to it. Exactly one of
/// `alpha` and `pilot_count` is needed; if both are present they must agree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub n: u32,
    #[serde(rename = "F")]
    pub frames: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pilot_count: Option<u32>,
    #[serde(rename = "b_M")]
    pub b_m: f64,
    #[serde(rename = "p_FA")]
    pub p_fa: f64,
    #[serde(rename = "lambda_B_dB")]
    pub lambda_b_db: f64,
    #[serde(rename = "lambda_T_over_lambda_B")]
    pub lambda_ratio: f64,
    pub h_min: f64,
    #[serde(default = "default_h_max")]
    pub h_max: f64,
}

fn default_h_max() -> f64 {
    1.0
}

/// Validated scenario description.
///
/// The pilot fraction is held as an integer pilot count, so `alpha * n` is
/// always an integer. SNRs keep their as-configured form (dB and ratio) and
/// the linear values are derived once at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    n: u32,
    frames: u32,
    pilots: u32,
    b_m: u64,
    p_fa: f64,
    lambda_b_db: f64,
    lambda_ratio: f64,
    h_min: f64,
    h_max: f64,
    lambda_b: f64,
    lambda_t: f64,
}

impl SystemParams {
    /// Builds parameters from the configuration document, validating every
    /// field.
    pub fn from_config(cfg: &ParamsConfig) -> Result<Self> {
        if cfg.n == 0 {
            return Err(Error::ZeroCount { name: "n" });
        }
        let pilots = resolve_pilots(cfg)?;
        if !(cfg.b_m.is_finite() && cfg.b_m >= 0.0 && cfg.b_m.fract() == 0.0)
            || cfg.b_m > u64::MAX as f64
        {
            return Err(Error::InvalidMessageLength(cfg.b_m));
        }
        let params = SystemParams {
            n: cfg.n,
            frames: cfg.frames,
            pilots,
            b_m: cfg.b_m as u64,
            p_fa: cfg.p_fa,
            lambda_b_db: cfg.lambda_b_db,
            lambda_ratio: cfg.lambda_ratio,
            h_min: cfg.h_min,
            h_max: cfg.h_max,
            lambda_b: db_to_linear(cfg.lambda_b_db),
            lambda_t: cfg.lambda_ratio * db_to_linear(cfg.lambda_b_db),
        };
        params.validate()
    }

    /// Parses and validates a JSON configuration document.
    pub fn from_json(text: &str) -> std::result::Result<Self, ConfigError> {
        let cfg: ParamsConfig = serde_json::from_str(text)?;
        Ok(Self::from_config(&cfg)?)
    }

    /// Emits the configuration document; `from_json(to_json())` reproduces
    /// `self` bit for bit.
    pub fn to_config(&self) -> ParamsConfig {
        ParamsConfig {
            n: self.n,
            frames: self.frames,
            alpha: None,
            pilot_count: Some(self.pilots),
            b_m: self.b_m as f64,
            p_fa: self.p_fa,
            lambda_b_db: self.lambda_b_db,
            lambda_ratio: self.lambda_ratio,
            h_min: self.h_min,
            h_max: self.h_max,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_config()).expect("config serializes")
    }

    /// Checks every invariant, returning the parameters unchanged on success.
    pub fn validate(self) -> Result<Self> {
        if self.n == 0 {
            return Err(Error::ZeroCount { name: "n" });
        }
        if self.frames == 0 {
            return Err(Error::ZeroCount { name: "F" });
        }
        if self.pilots > self.n {
            return Err(Error::TooManyPilots { pilots: self.pilots, n: self.n });
        }
        if !(self.p_fa > 0.0 && self.p_fa < 1.0) {
            return Err(Error::InvalidProbability { name: "p_FA", value: self.p_fa });
        }
        if !(self.lambda_b.is_finite() && self.lambda_b > 0.0) {
            return Err(Error::NonPositiveSnr { name: "lambda_B", value: self.lambda_b });
        }
        if !(self.lambda_t.is_finite() && self.lambda_t > 0.0) {
            return Err(Error::NonPositiveSnr { name: "lambda_T", value: self.lambda_t });
        }
        let range_ok = self.h_min.is_finite()
            && self.h_max.is_finite()
            && self.h_min >= 0.0
            && self.h_min <= self.h_max;
        if !range_ok {
            return Err(Error::InvalidRange { h_min: self.h_min, h_max: self.h_max });
        }
        Ok(self)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn frames(&self) -> u32 {
        self.frames
    }

    pub fn pilot_count(&self) -> u32 {
        self.pilots
    }

    /// Number of data symbols per frame, `(1 - alpha) n`.
    pub fn n_data(&self) -> u32 {
        self.n - self.pilots
    }

    pub fn alpha(&self) -> f64 {
        f64::from(self.pilots) / f64::from(self.n)
    }

    pub fn b_m(&self) -> f64 {
        self.b_m as f64
    }

    pub fn p_fa(&self) -> f64 {
        self.p_fa
    }

    pub fn lambda_b_db(&self) -> f64 {
        self.lambda_b_db
    }

    pub fn lambda_ratio(&self) -> f64 {
        self.lambda_ratio
    }

    /// Legitimate SNR scale, linear.
    pub fn lambda_b(&self) -> f64 {
        self.lambda_b
    }

    /// Attacker SNR, linear.
    pub fn lambda_t(&self) -> f64 {
        self.lambda_t
    }

    pub fn h_min(&self) -> f64 {
        self.h_min
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Edge of the admissible amplitude interval, `h_max - h_min`.
    pub fn edge(&self) -> f64 {
        self.h_max - self.h_min
    }

    pub fn with_pilot_count(mut self, pilots: u32) -> Result<Self> {
        self.pilots = pilots;
        self.validate()
    }

    pub fn with_h_min(mut self, h_min: f64) -> Result<Self> {
        self.h_min = h_min;
        self.validate()
    }

    pub fn with_h_max(mut self, h_max: f64) -> Result<Self> {
        self.h_max = h_max;
        self.validate()
    }

    pub fn with_frames(mut self, frames: u32) -> Result<Self> {
        self.frames = frames;
        self.validate()
    }

    pub fn with_b_m(mut self, b_m: u64) -> Result<Self> {
        self.b_m = b_m;
        self.validate()
    }

    pub fn with_p_fa(mut self, p_fa: f64) -> Result<Self> {
        self.p_fa = p_fa;
        self.validate()
    }

    pub fn with_lambda_b_db(mut self, db: f64) -> Result<Self> {
        self.lambda_b_db = db;
        self.lambda_b = db_to_linear(db);
        self.lambda_t = self.lambda_ratio * self.lambda_b;
        self.validate()
    }

    pub fn with_lambda_ratio(mut self, ratio: f64) -> Result<Self> {
        self.lambda_ratio = ratio;
        self.lambda_t = ratio * self.lambda_b;
        self.validate()
    }
}

fn resolve_pilots(cfg: &ParamsConfig) -> Result<u32> {
    let from_alpha = match cfg.alpha {
        Some(alpha) => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::InvalidPilotCount {
                    alpha,
                    n: cfg.n,
                    pilots: alpha * f64::from(cfg.n),
                });
            }
            let exact = alpha * f64::from(cfg.n);
            let rounded = exact.round();
            if (exact - rounded).abs() > 1e-9 {
                return Err(Error::InvalidPilotCount { alpha, n: cfg.n, pilots: exact });
            }
            Some(rounded as u32)
        }
        None => None,
    };
    match (from_alpha, cfg.pilot_count) {
        (Some(a), Some(p)) if a != p => Err(Error::InvalidPilotCount {
            alpha: cfg.alpha.unwrap_or_default(),
            n: cfg.n,
            pilots: f64::from(p),
        }),
        (Some(a), _) => Ok(a),
        (None, Some(p)) => Ok(p),
        (None, None) => Err(Error::InvalidPilotCount { alpha: f64::NAN, n: cfg.n, pilots: f64::NAN }),
    }
}

/// Failure to load a configuration document.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mechanism {
    /// Channel-based challenge-response only.
    Ch,
    /// Coding-based (wiretap key) only.
    Cd,
    Hybrid,
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mechanism::Ch => "CH",
            Mechanism::Cd => "CD",
            Mechanism::Hybrid => "HYBRID",
        })
    }
}

/// Equivalent secret-key bits of one mechanism at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecurityReport {
    mechanism: Mechanism,
    b_ch: f64,
    b_key: f64,
    alpha_used: f64,
    h_min_used: f64,
}

impl SecurityReport {
    pub fn channel(b_ch: f64, alpha_used: f64, h_min_used: f64) -> Self {
        SecurityReport { mechanism: Mechanism::Ch, b_ch, b_key: 0.0, alpha_used, h_min_used }
    }

    pub fn coding(b_key: f64, alpha_used: f64, h_min_used: f64) -> Self {
        SecurityReport { mechanism: Mechanism::Cd, b_ch: 0.0, b_key, alpha_used, h_min_used }
    }

    pub fn hybrid(b_ch: f64, b_key: f64, alpha_used: f64, h_min_used: f64) -> Self {
        SecurityReport { mechanism: Mechanism::Hybrid, b_ch, b_key, alpha_used, h_min_used }
    }

    pub fn mechanism(&self) -> Mechanism {
        self.mechanism
    }

    pub fn b_ch(&self) -> f64 {
        self.b_ch
    }

    pub fn b_key(&self) -> f64 {
        self.b_key
    }

    /// Total equivalent key length, always `b_ch + b_key`.
    pub fn b_tot(&self) -> f64 {
        self.b_ch + self.b_key
    }

    pub fn alpha_used(&self) -> f64 {
        self.alpha_used
    }

    pub fn h_min_used(&self) -> f64 {
        self.h_min_used
    }
}

impl Serialize for SecurityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            mechanism: Mechanism,
            alpha_used: f64,
            h_min_used: f64,
            b_ch: f64,
            b_key: f64,
            b_tot: f64,
        }
        Repr {
            mechanism: self.mechanism,
            alpha_used: self.alpha_used,
            h_min_used: self.h_min_used,
            b_ch: self.b_ch,
            b_key: self.b_key,
            b_tot: self.b_tot(),
        }
        .serialize(serializer)
    }
}
