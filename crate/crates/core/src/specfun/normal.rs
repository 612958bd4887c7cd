use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Gaussian tail probability `P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 0.0 {
        upper_tail(x)
    } else {
        1.0 - upper_tail(-x)
    }
}

/// `Q(x)` for `x >= 0`, i.e. `erfc(x / sqrt 2) / 2`.
fn upper_tail(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 0.0;
    }
    let t = x * FRAC_1_SQRT_2;
    // t^2 straight from x keeps the exponent argument exact to an ulp.
    let t2 = 0.5 * x * x;
    if t < 2.0 {
        0.5 * (1.0 - erf_series(t, t2))
    } else {
        0.5 * erfc_continued_fraction(t, t2)
    }
}

/// erf(t) = 2/sqrt(pi) exp(-t^2) sum_k (2t^2)^k t / (2k+1)!!, all terms positive.
fn erf_series(t: f64, t2: f64) -> f64 {
    let mut term = t;
    let mut sum = t;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= 2.0 * t2 / (2.0 * k + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI * (-t2).exp() * sum
}

/// erfc(t) = exp(-t^2)/sqrt(pi) / (t + (1/2)/(t + 1/(t + (3/2)/(t + ...)))),
/// evaluated with the modified Lentz method.
fn erfc_continued_fraction(t: f64, t2: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = t;
    let mut c = t;
    let mut d = 0.0;
    for k in 1..10_000 {
        let a = 0.5 * k as f64;
        d = t + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = t + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI * (-t2).exp() / f
}

/// Inverse of [`q_function`]: returns `x` with `Q(x) = p`.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain { function: "q_inverse", value: p });
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        // 1 - p is exact for p in [0.5, 1].
        return q_inverse(1.0 - p).map(|x| -x);
    }
    // Abramowitz & Stegun 26.2.23 as a start, then Newton on ln Q.
    let t = (-2.0 * p.ln()).sqrt();
    let mut x = t
        - (2.515_517 + 0.802_853 * t + 0.010_328 * t * t)
            / (1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t);
    let ln_p = p.ln();
    let mut last_step = f64::INFINITY;
    for _ in 0..100 {
        let q = q_function(x);
        let step = (q.ln() - ln_p) * q / normal_pdf(x);
        // stop once Newton has stopped shrinking (ulp-level chatter)
        if step.abs() >= last_step.abs() && step.abs() <= 1e-12 * x.abs().max(1.0) {
            return Ok(x);
        }
        x += step;
        if step == 0.0 {
            return Ok(x);
        }
        last_step = step;
    }
    Err(Error::Convergence("q_inverse"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // 50-digit mpmath erfc values.
    const Q_REFERENCE: &[(f64, f64)] = &[
        (0.3, 0.382_088_577_811_047_362_69),
        (1.0, 0.158_655_253_931_457_051_41),
        (-2.0, 0.977_249_868_051_820_792_8),
        (3.0, 1.349_898_031_630_094_526_7e-3),
        (5.199337582, 1.000_000_001_037_264_946_9e-7),
        (7.5, 3.190_891_672_910_896_227_8e-14),
        (8.0, 6.220_960_574_271_784_123_5e-16),
        (-8.0, 0.999_999_999_999_999_377_9),
        (12.0, 1.776_482_112_077_678_997_7e-33),
    ];

    #[test]
    fn q_matches_high_precision_reference() {
        for &(x, want) in Q_REFERENCE {
            assert!(rel(q_function(x), want) < 1e-12, "Q({x}) = {} vs {want}", q_function(x));
        }
        assert_eq!(q_function(0.0), 0.5);
    }

    #[test]
    fn q_is_continuous_across_branch_switch() {
        let x = 2.0 * std::f64::consts::SQRT_2;
        let below = q_function(x - 1e-12);
        let above = q_function(x + 1e-12);
        assert!(rel(below, above) < 1e-10);
    }

    #[test]
    fn q_reflection_and_monotonicity() {
        let mut prev = 1.0;
        for i in -800..=800 {
            let x = i as f64 / 100.0;
            let q = q_function(x);
            assert!((q - (1.0 - q_function(-x))).abs() < 1e-15);
            // Near -8 the values round to within an ulp of 1.
            assert!(q < prev || (x < -5.0 && q <= prev), "not decreasing at {x}");
            prev = q;
        }
    }

    #[test]
    fn q_inverse_reference_values() {
        assert_eq!(q_inverse(0.5).unwrap(), 0.0);
        let cases = [
            (1e-7, 5.199_337_582_192_816_931_6),
            (5e-8, 5.326_723_886_384_496_317_8),
            (0.05, 1.644_853_626_951_472_714_9),
            (0.01, 2.326_347_874_040_841_100_9),
            (1e-12, 7.034_483_825_301_131_929_8),
        ];
        for (p, want) in cases {
            assert!(rel(q_inverse(p).unwrap(), want) < 1e-12, "p = {p}");
            let upper = 1.0 - p;
            assert!((q_inverse(upper).unwrap() + q_inverse(1.0 - upper).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn q_inverse_rejects_out_of_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(q_inverse(p), Err(Error::Domain { .. })));
        }
    }

    #[test]
    fn q_inverse_round_trip_log_spaced() {
        let mut prev = f64::INFINITY;
        for i in 0..=240 {
            let p = 10f64.powf(-12.0 + i as f64 * (12.0 - 0.5f64.log10().abs()) / 240.0).min(0.5);
            let x = q_inverse(p).unwrap();
            assert!(rel(q_function(x), p) < 1e-9, "p = {p}");
            assert!(x <= prev);
            prev = x;
        }
    }
}
